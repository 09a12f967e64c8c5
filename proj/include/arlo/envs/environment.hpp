#pragma once

#include <memory>
#include <string>
#include <vector>

#include "arlo/core/dataset.hpp"
#include "arlo/core/mdp.hpp"
#include "arlo/core/policy.hpp"
#include "arlo/core/rng.hpp"

namespace arlo {

struct StepResult {
  Vector state;
  double reward = 0.0;
  bool absorbing = false;
};

/// Forward-model interaction with an MDP. An environment owns its noise
/// stream; `clone` yields a fully independent deep copy (stream included).
class Environment {
 public:
  virtual ~Environment() = default;

  [[nodiscard]] virtual const MdpSpec& spec() const = 0;
  [[nodiscard]] virtual std::string name() const = 0;
  virtual Vector reset() = 0;
  virtual StepResult step(const Vector& action) = 0;
  [[nodiscard]] virtual std::unique_ptr<Environment> clone() const = 0;

  virtual void seed(RngStream rng) { rng_ = std::move(rng); }
  [[nodiscard]] const RngStream& rng() const { return rng_; }

 protected:
  RngStream rng_;
};

using EnvPtr = std::unique_ptr<Environment>;
using SharedEnv = std::shared_ptr<const Environment>;

/// CRTP helper providing `clone` through the derived copy constructor.
template <class Derived>
class EnvironmentBase : public Environment {
 public:
  [[nodiscard]] std::unique_ptr<Environment> clone() const override {
    return std::make_unique<Derived>(static_cast<const Derived&>(*this));
  }
};

inline EnvPtr environment_copy(const Environment& env) { return env.clone(); }

inline EnvPtr seeded_copy(const Environment& env, RngStream rng) {
  auto copy = env.clone();
  copy->seed(std::move(rng));
  return copy;
}

/// Step cap used when the horizon is infinite.
inline constexpr std::size_t kDefaultStepCap = 10000;

/// Runs one episode: stops on an absorbing transition or at the horizon.
inline std::vector<Transition> rollout_episode(Environment& env, const Policy& policy, RngStream& policy_rng,
                                               std::size_t step_cap = kDefaultStepCap) {
  const auto& spec = env.spec();
  std::vector<Transition> out;
  Vector s = env.reset();
  for (std::size_t t = 0;; ++t) {
    if (!spec.horizon && t >= step_cap) {
      throw Error("runaway episode: no termination after " + std::to_string(step_cap) + " steps");
    }
    Transition tr;
    tr.state = s;
    tr.action = policy.act(s, t, policy_rng);
    StepResult r = env.step(tr.action);
    tr.reward = r.reward;
    tr.next_state = std::move(r.state);
    tr.absorbing = r.absorbing;
    tr.last = r.absorbing || (spec.horizon && t + 1 >= *spec.horizon);
    s = tr.next_state;
    const bool done = tr.last;
    out.push_back(std::move(tr));
    if (done) break;
  }
  return out;
}

/// Collects `n_episodes` trajectories with `policy` on a private copy of `env`.
inline Dataset collect_dataset(const Environment& env, const Policy& policy, std::size_t n_episodes,
                               RngStream rng) {
  auto local = seeded_copy(env, rng.child(0));
  RngStream policy_rng = rng.child(1);
  Dataset d;
  for (std::size_t e = 0; e < n_episodes; ++e) {
    auto traj = rollout_episode(*local, policy, policy_rng);
    d.append_trajectory(traj);
  }
  return d;
}

}  // namespace arlo
