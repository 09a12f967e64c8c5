#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "arlo/envs/environment.hpp"

namespace arlo {

enum class ReturnKind { discounted, total, average };

inline std::string to_string(ReturnKind k) {
  switch (k) {
    case ReturnKind::discounted: return "discounted";
    case ReturnKind::total: return "total";
    case ReturnKind::average: return "average";
  }
  return "discounted";
}

inline ReturnKind parse_return_kind(const std::string& s) {
  if (s == "discounted") return ReturnKind::discounted;
  if (s == "total") return ReturnKind::total;
  if (s == "average") return ReturnKind::average;
  throw ConfigError("unknown return kind '" + s + "'");
}

struct ReturnEstimate {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation across episodes
  std::size_t n_episodes = 0;
  ReturnKind kind = ReturnKind::discounted;

  [[nodiscard]] double standard_error() const {
    return n_episodes > 0 ? std / std::sqrt(static_cast<double>(n_episodes)) : 0.0;
  }

  [[nodiscard]] Json to_json() const {
    return {{"mean", mean}, {"std", std}, {"n_episodes", n_episodes}, {"kind", to_string(kind)}};
  }

  static ReturnEstimate from_json(const Json& j) {
    return {j.at("mean").get<double>(), j.at("std").get<double>(), j.at("n_episodes").get<std::size_t>(),
            parse_return_kind(j.at("kind").get<std::string>())};
  }
};

inline double episode_return(std::span<const double> rewards, double gamma, ReturnKind kind) {
  if (rewards.empty()) return 0.0;
  double total = 0.0;
  if (kind == ReturnKind::discounted) {
    double discount = 1.0;
    for (double r : rewards) {
      total += discount * r;
      discount *= gamma;
    }
    return total;
  }
  for (double r : rewards) total += r;
  return kind == ReturnKind::average ? total / static_cast<double>(rewards.size()) : total;
}

inline ReturnEstimate summarize_returns(std::span<const double> returns, ReturnKind kind) {
  ReturnEstimate est;
  est.kind = kind;
  est.n_episodes = returns.size();
  if (returns.empty()) return est;
  double sum = 0.0;
  for (double g : returns) sum += g;
  est.mean = sum / static_cast<double>(returns.size());
  if (returns.size() > 1) {
    double ss = 0.0;
    for (double g : returns) ss += (g - est.mean) * (g - est.mean);
    est.std = std::sqrt(ss / static_cast<double>(returns.size() - 1));
  }
  return est;
}

/// Monte-Carlo estimate of a return index over `n_episodes` rollouts on a
/// private copy of `env` (seeded from rng.child(0); the policy draws from
/// rng.child(1)).
inline ReturnEstimate evaluate_policy(const Environment& env, const Policy& policy, std::size_t n_episodes,
                                      ReturnKind kind, RngStream rng, std::size_t step_cap = kDefaultStepCap) {
  if (n_episodes < 1) throw InvalidArgument("evaluate_policy: n_episodes must be at least 1");
  auto local = seeded_copy(env, rng.child(0));
  RngStream policy_rng = rng.child(1);
  const double gamma = env.spec().gamma;
  std::vector<double> returns;
  returns.reserve(n_episodes);
  std::vector<double> rewards;
  for (std::size_t e = 0; e < n_episodes; ++e) {
    const auto traj = rollout_episode(*local, policy, policy_rng, step_cap);
    rewards.clear();
    for (const auto& tr : traj) rewards.push_back(tr.reward);
    returns.push_back(episode_return(rewards, gamma, kind));
  }
  return summarize_returns(returns, kind);
}

}  // namespace arlo
