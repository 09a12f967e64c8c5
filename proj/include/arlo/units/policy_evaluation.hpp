#pragma once

#include "arlo/metrics/returns.hpp"

namespace arlo {

/// Monte-Carlo evaluation; the only policy-evaluation unit.
inline ReturnEstimate pe_monte_carlo(const Environment& env, const Policy& policy, std::size_t n_episodes,
                                     ReturnKind kind, RngStream rng) {
  return evaluate_policy(env, policy, n_episodes, kind, std::move(rng));
}

}  // namespace arlo
