#pragma once

#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "arlo/envs/environment.hpp"

namespace arlo {

enum class Baseline { none, mean };

inline Baseline parse_baseline(const std::string& s) {
  if (s == "none") return Baseline::none;
  if (s == "mean") return Baseline::mean;
  throw ConfigError("unknown baseline '" + s + "'");
}

struct GpomdpConfig {
  double learning_rate = 1e-3;
  std::size_t n_epochs = 30;
  std::size_t n_episodes_per_fit = 10;
  double init_std = 1.0;
  Baseline baseline = Baseline::none;

  void validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw ConfigError("gpomdp: learning_rate must be non-negative");
    }
    if (!(init_std > 0.0) || !std::isfinite(init_std)) throw ConfigError("gpomdp: init_std must be positive");
    if (n_episodes_per_fit < 1) throw ConfigError("gpomdp: n_episodes_per_fit must be at least 1");
  }
};

/// Parameters of the linear-Gaussian policy a = K s + exp(log_std) * xi.
struct GaussianPolicyParams {
  Matrix gain;
  double log_std = 0.0;

  [[nodiscard]] double max_abs() const { return std::max(gain.cwiseAbs().maxCoeff(), std::abs(log_std)); }
};

struct PolicyGradientEstimate {
  Matrix gain;          ///< d J / d K
  double log_std = 0.0;  ///< d J / d log_std
  double mean_return = 0.0;
};

/// GPOMDP likelihood-ratio gradient of the discounted return:
///   g = mean_n sum_t gamma^t (r_t - b_t) sum_{k <= t} grad log pi(a_k | s_k)
/// with b_t the across-episode mean reward at step t when baseline = mean.
/// Unclipped actions are sent to the environment, which applies its own
/// clipping. Noise: environment from rng.child(0), policy from rng.child(1).
inline PolicyGradientEstimate gpomdp_gradient(const Environment& env, const GaussianPolicyParams& theta,
                                              std::size_t n_episodes, Baseline baseline, RngStream rng) {
  if (n_episodes < 1) throw InvalidArgument("gpomdp_gradient: n_episodes must be at least 1");
  const auto& spec = env.spec();
  const auto m = theta.gain.rows();
  const auto nstate = theta.gain.cols();
  if (static_cast<std::size_t>(m) != spec.action_space.dim() || static_cast<std::size_t>(nstate) != spec.state_space.dim()) {
    throw InvalidArgument("gpomdp_gradient: gain shape does not match the environment");
  }
  auto local = seeded_copy(env, rng.child(0));
  RngStream noise = rng.child(1);
  const double sigma = std::exp(theta.log_std);
  const double gamma = spec.gamma;

  struct Step {
    double discounted_reward;
    double reward;
    Matrix score_gain;
    double score_log_std;
  };
  std::vector<std::vector<Step>> episodes(n_episodes);
  double return_sum = 0.0;
  for (auto& ep : episodes) {
    Vector s = local->reset();
    Matrix score_gain = Matrix::Zero(m, nstate);
    double score_log_std = 0.0;
    double discount = 1.0;
    for (std::size_t t = 0;; ++t) {
      if (!spec.horizon && t >= kDefaultStepCap) throw Error("runaway episode in gpomdp");
      Vector xi(m);
      for (Eigen::Index i = 0; i < m; ++i) xi[i] = noise.normal();
      const Vector a = theta.gain * s + sigma * xi;
      score_gain.noalias() += (xi / sigma) * s.transpose();
      score_log_std += xi.squaredNorm() - static_cast<double>(m);
      const auto r = local->step(a);
      ep.push_back({discount * r.reward, r.reward, score_gain, score_log_std});
      return_sum += discount * r.reward;
      discount *= gamma;
      s = r.state;
      if (r.absorbing || (spec.horizon && t + 1 >= *spec.horizon)) break;
    }
  }

  std::vector<double> base;
  if (baseline == Baseline::mean) {
    std::vector<double> sum;
    std::vector<std::size_t> count;
    for (const auto& ep : episodes) {
      if (ep.size() > sum.size()) {
        sum.resize(ep.size(), 0.0);
        count.resize(ep.size(), 0);
      }
      for (std::size_t t = 0; t < ep.size(); ++t) {
        sum[t] += ep[t].reward;
        ++count[t];
      }
    }
    base.resize(sum.size());
    for (std::size_t t = 0; t < sum.size(); ++t) base[t] = sum[t] / static_cast<double>(count[t]);
  }

  PolicyGradientEstimate g{Matrix::Zero(m, nstate), 0.0, return_sum / static_cast<double>(n_episodes)};
  for (const auto& ep : episodes) {
    double discount = 1.0;
    for (std::size_t t = 0; t < ep.size(); ++t) {
      const double advantage = base.empty() ? ep[t].discounted_reward : discount * (ep[t].reward - base[t]);
      g.gain += advantage * ep[t].score_gain;
      g.log_std += advantage * ep[t].score_log_std;
      discount *= gamma;
    }
  }
  g.gain /= static_cast<double>(n_episodes);
  g.log_std /= static_cast<double>(n_episodes);
  return g;
}

struct GpomdpResult {
  GaussianPolicyParams theta;
  std::shared_ptr<const LinearGaussianPolicy> policy;
};

/// Gradient ascent with plain steps theta += learning_rate * g, starting from
/// K = 0 and log_std = ln(init_std). Epoch e estimates its gradient from
/// n_episodes_per_fit rollouts on rng.child(e). Aborts if any parameter
/// exceeds 1e6 in magnitude or becomes non-finite.
inline GpomdpResult pg_gpomdp(const Environment& env, const GpomdpConfig& cfg, RngStream rng) {
  cfg.validate();
  const auto& spec = env.spec();
  if (spec.action_space.is_discrete() || spec.state_space.is_discrete()) {
    throw InvalidArgument("gpomdp: state and action spaces must be continuous boxes");
  }
  GaussianPolicyParams theta{Matrix::Zero(static_cast<Eigen::Index>(spec.action_space.dim()),
                                          static_cast<Eigen::Index>(spec.state_space.dim())),
                             std::log(cfg.init_std)};
  for (std::size_t e = 0; e < cfg.n_epochs; ++e) {
    const auto g = gpomdp_gradient(env, theta, cfg.n_episodes_per_fit, cfg.baseline, rng.child(e));
    theta.gain += cfg.learning_rate * g.gain;
    theta.log_std += cfg.learning_rate * g.log_std;
    const double size = theta.max_abs();
    if (!std::isfinite(size) || size > 1e6) {
      std::ostringstream msg;
      msg << "gpomdp diverged at epoch " << e << ": max |theta| = " << size << ", |grad log_std| = "
          << std::abs(g.log_std) << ", max |grad K| = " << g.gain.cwiseAbs().maxCoeff();
      throw Error(msg.str());
    }
  }
  auto policy = std::make_shared<LinearGaussianPolicy>(theta.gain, theta.log_std, spec.action_space);
  return {std::move(theta), std::move(policy)};
}

}  // namespace arlo
