#pragma once

#include <memory>
#include <vector>

#include "arlo/envs/environment.hpp"

namespace arlo {

struct QLearningResult {
  Matrix q;                                ///< n_states x n_actions
  std::vector<std::size_t> action_counts;  ///< behaviour actions taken
  std::shared_ptr<const TabularPolicy> policy;
};

/// Tabular epsilon-greedy Q-learning on a private copy of `env` (noise from
/// rng.child(0), behaviour from rng.child(1)). Greedy ties go to the lowest
/// action.
inline QLearningResult pg_q_learning(const Environment& env, std::size_t episodes, double alpha, double epsilon,
                                     RngStream rng) {
  const auto& spec = env.spec();
  if (!spec.state_space.is_discrete() || !spec.action_space.is_discrete()) {
    throw InvalidArgument("q_learning: state and action spaces must be discrete");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("q_learning: alpha must lie in (0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("q_learning: epsilon must lie in [0, 1]");
  const std::size_t S = spec.state_space.n();
  const std::size_t A = spec.action_space.n();
  auto local = seeded_copy(env, rng.child(0));
  RngStream behaviour = rng.child(1);

  QLearningResult out;
  out.q = Matrix::Zero(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(A));
  out.action_counts.assign(A, 0);
  auto greedy = [&](std::size_t s) {
    Eigen::Index best = 0;
    const auto row = static_cast<Eigen::Index>(s);
    for (Eigen::Index a = 1; a < out.q.cols(); ++a) {
      if (out.q(row, a) > out.q(row, best)) best = a;
    }
    return static_cast<std::size_t>(best);
  };
  for (std::size_t e = 0; e < episodes; ++e) {
    auto s = static_cast<std::size_t>(local->reset()[0]);
    for (std::size_t t = 0;; ++t) {
      if (!spec.horizon && t >= kDefaultStepCap) throw Error("runaway episode in q_learning");
      const std::size_t a = behaviour.bernoulli(epsilon) ? behaviour.index(A) : greedy(s);
      ++out.action_counts[a];
      const auto r = local->step(Vector::Constant(1, static_cast<double>(a)));
      const auto s2 = static_cast<std::size_t>(r.state[0]);
      const double bootstrap = r.absorbing ? 0.0 : spec.gamma * out.q.row(static_cast<Eigen::Index>(s2)).maxCoeff();
      double& cell = out.q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
      cell += alpha * (r.reward + bootstrap - cell);
      s = s2;
      if (r.absorbing || (spec.horizon && t + 1 >= *spec.horizon)) break;
    }
  }
  std::vector<std::size_t> actions(S);
  for (std::size_t s = 0; s < S; ++s) actions[s] = greedy(s);
  out.policy = std::make_shared<TabularPolicy>(std::move(actions), A);
  return out;
}

}  // namespace arlo
