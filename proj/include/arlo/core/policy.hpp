#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "arlo/core/error.hpp"
#include "arlo/core/json_util.hpp"
#include "arlo/core/rng.hpp"
#include "arlo/core/space.hpp"

namespace arlo {

/// Maps a state (and step index) to an action distribution. Every action
/// returned by `act` lies inside `action_space()`.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual Vector act(const Vector& state, std::size_t t, RngStream& rng) const = 0;
  [[nodiscard]] virtual bool deterministic() const = 0;
  [[nodiscard]] virtual const Space& action_space() const = 0;
  [[nodiscard]] virtual Json to_json() const = 0;
};

using PolicyPtr = std::shared_ptr<const Policy>;

class UniformRandomPolicy final : public Policy {
 public:
  explicit UniformRandomPolicy(Space action_space) : space_(std::move(action_space)) {}

  Vector act(const Vector&, std::size_t, RngStream& rng) const override { return space_.sample(rng); }
  bool deterministic() const override { return false; }
  const Space& action_space() const override { return space_; }
  Json to_json() const override {
    return {{"class", "uniform_random"}, {"action_space", space_.to_json()}, {"parameters", Json::object()}};
  }

 private:
  Space space_;
};

/// Greedy lookup table for discrete states and actions.
class TabularPolicy final : public Policy {
 public:
  TabularPolicy(std::vector<std::size_t> actions, std::size_t n_actions)
      : actions_(std::move(actions)), space_(Space::discrete(n_actions)) {
    for (auto a : actions_) {
      if (a >= n_actions) throw InvalidArgument("tabular policy: action index out of range");
    }
  }

  Vector act(const Vector& state, std::size_t, RngStream&) const override {
    const double s = state[0];
    if (!(s >= 0.0) || s != std::floor(s) || s >= static_cast<double>(actions_.size())) {
      throw InvalidArgument("tabular policy: state index out of range");
    }
    return Vector::Constant(1, static_cast<double>(actions_[static_cast<std::size_t>(s)]));
  }
  bool deterministic() const override { return true; }
  const Space& action_space() const override { return space_; }
  [[nodiscard]] const std::vector<std::size_t>& actions() const { return actions_; }

  Json to_json() const override {
    return {{"class", "tabular"},
            {"action_space", space_.to_json()},
            {"parameters", {{"actions", actions_}}}};
  }

 private:
  std::vector<std::size_t> actions_;
  Space space_;
};

/// a = clip(K s + sigma * xi), xi ~ N(0, I).
class LinearGaussianPolicy final : public Policy {
 public:
  LinearGaussianPolicy(Matrix gain, double log_std, Space action_space)
      : gain_(std::move(gain)), log_std_(log_std), space_(std::move(action_space)) {
    if (static_cast<std::size_t>(gain_.rows()) != space_.dim()) {
      throw InvalidArgument("linear gaussian policy: gain rows must equal the action dimension");
    }
  }

  Vector mean(const Vector& state) const { return gain_ * state; }

  Vector act(const Vector& state, std::size_t, RngStream& rng) const override {
    Vector a = gain_ * state;
    const double sigma = std::exp(log_std_);
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] += sigma * rng.normal();
    return space_.clip(a);
  }
  bool deterministic() const override { return false; }
  const Space& action_space() const override { return space_; }
  [[nodiscard]] const Matrix& gain() const { return gain_; }
  [[nodiscard]] double log_std() const { return log_std_; }

  Json to_json() const override {
    return {{"class", "linear_gaussian"},
            {"action_space", space_.to_json()},
            {"parameters", {{"gain", matrix_to_json(gain_)}, {"log_std", log_std_}}}};
  }

 private:
  Matrix gain_;
  double log_std_;
  Space space_;
};

/// a_t = clip(K_t s); the last gain is reused past the end of the schedule.
class TimeVaryingLinearPolicy final : public Policy {
 public:
  TimeVaryingLinearPolicy(std::vector<Matrix> gains, Space action_space)
      : gains_(std::move(gains)), space_(std::move(action_space)) {
    if (gains_.empty()) throw InvalidArgument("time-varying policy needs at least one gain");
  }

  Vector act(const Vector& state, std::size_t t, RngStream&) const override {
    const auto& k = gains_[std::min(t, gains_.size() - 1)];
    return space_.clip(k * state);
  }
  bool deterministic() const override { return true; }
  const Space& action_space() const override { return space_; }
  [[nodiscard]] const std::vector<Matrix>& gains() const { return gains_; }

  Json to_json() const override {
    Json gains = Json::array();
    for (const auto& k : gains_) gains.push_back(matrix_to_json(k));
    return {{"class", "time_varying_linear"},
            {"action_space", space_.to_json()},
            {"parameters", {{"gains", gains}}}};
  }

 private:
  std::vector<Matrix> gains_;
  Space space_;
};

}  // namespace arlo
