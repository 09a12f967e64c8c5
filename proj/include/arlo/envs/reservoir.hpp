#pragma once

#include <algorithm>
#include <string>

#include "arlo/envs/environment.hpp"

namespace arlo {

/// Synthetic water-reservoir control task with distractor features.
///
/// State: [level, inflow, d_1 .. d_k]. The release action drains the
/// reservoir, the inflow follows a clipped AR(1) process, and each d_i is
/// fresh uniform noise every step, so only the first two coordinates carry
/// information about the dynamics and the reward
///   r = -(level + inflow - release - target)^2.
struct ReservoirParams {
  double capacity = 10.0;
  double target = 5.0;
  double max_inflow = 3.0;
  double max_release = 3.0;
  double inflow_persistence = 0.7;
  double inflow_noise = 0.4;
  std::size_t n_distractors = 4;
  double gamma = 0.9;
  std::size_t horizon = 20;

  [[nodiscard]] std::size_t state_dim() const { return 2 + n_distractors; }

  void validate() const {
    if (!(capacity > 0.0 && max_inflow > 0.0 && max_release > 0.0)) {
      throw InvalidArgument("reservoir: capacity and flow limits must be positive");
    }
    if (!(inflow_persistence >= 0.0 && inflow_persistence < 1.0)) {
      throw InvalidArgument("reservoir: inflow_persistence must lie in [0, 1)");
    }
    if (inflow_noise < 0.0) throw InvalidArgument("reservoir: inflow_noise must be non-negative");
    if (horizon == 0) throw InvalidArgument("reservoir: horizon must be at least 1");
  }

  [[nodiscard]] MdpSpec spec() const {
    Vector low = Vector::Zero(static_cast<Eigen::Index>(state_dim()));
    Vector high = Vector::Ones(static_cast<Eigen::Index>(state_dim()));
    high[0] = capacity;
    high[1] = max_inflow;
    MdpSpec s{Space::box(low, high), Space::box(Vector::Zero(1), Vector::Constant(1, max_release)), gamma, horizon};
    s.validate();
    return s;
  }
};

class ReservoirEnvironment final : public EnvironmentBase<ReservoirEnvironment> {
 public:
  explicit ReservoirEnvironment(ReservoirParams params = {}) : params_(params) {
    params_.validate();
    spec_ = params_.spec();
  }

  const MdpSpec& spec() const override { return spec_; }
  std::string name() const override { return "reservoir"; }
  [[nodiscard]] const ReservoirParams& params() const { return params_; }

  Vector reset() override {
    state_.resize(static_cast<Eigen::Index>(params_.state_dim()));
    state_[0] = rng_.uniform(0.2, 0.8) * params_.capacity;
    state_[1] = rng_.uniform(0.0, params_.max_inflow);
    for (Eigen::Index i = 2; i < state_.size(); ++i) state_[i] = rng_.uniform();
    return state_;
  }

  StepResult step(const Vector& action) override {
    if (action.size() != 1) throw InvalidArgument("reservoir: action must be one-dimensional");
    const double release = std::clamp(action[0], 0.0, params_.max_release);
    const double level = state_[0];
    const double inflow = state_[1];
    const double gap = level + inflow - release - params_.target;
    const double reward = -gap * gap;

    const double mean_inflow = 0.5 * params_.max_inflow;
    const double next_inflow = params_.inflow_persistence * inflow +
                               (1.0 - params_.inflow_persistence) * mean_inflow +
                               params_.inflow_noise * rng_.normal();
    Vector next(state_.size());
    next[0] = std::clamp(level + inflow - release, 0.0, params_.capacity);
    next[1] = std::clamp(next_inflow, 0.0, params_.max_inflow);
    for (Eigen::Index i = 2; i < next.size(); ++i) next[i] = rng_.uniform();
    state_ = next;
    return {std::move(next), reward, false};
  }

 private:
  ReservoirParams params_;
  MdpSpec spec_;
  Vector state_;
};

}  // namespace arlo
