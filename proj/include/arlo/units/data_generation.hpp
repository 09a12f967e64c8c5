#pragma once

#include <vector>

#include "arlo/metrics/entropy.hpp"
#include "arlo/envs/environment.hpp"

namespace arlo {

/// `n_episodes` rollouts of the uniformly random policy.
inline Dataset dg_random_uniform(const Environment& env, std::size_t n_episodes, RngStream rng) {
  if (n_episodes < 1) throw ConfigError("random_uniform: n_episodes must be at least 1");
  UniformRandomPolicy policy(env.spec().action_space);
  return collect_dataset(env, policy, n_episodes, std::move(rng));
}

/// [s; a] for every transition.
inline std::vector<Vector> state_action_points(const Dataset& d) {
  std::vector<Vector> pts;
  pts.reserve(d.size());
  for (const auto& tr : d.transitions()) pts.push_back(concat(tr.state, tr.action));
  return pts;
}

/// Entropy index of a dataset: k-NN entropy of its state-action sample.
inline EntropyEstimate dataset_entropy(const Dataset& d, std::size_t k = 5) {
  const auto pts = state_action_points(d);
  return knn_entropy(pts, k);
}

}  // namespace arlo
