#pragma once

#include <vector>

#include "arlo/tuner/genetic.hpp"

namespace arlo {

/// `budget` independent uniform samples, recorded as a single generation.
inline TuningTrace random_search_tune(const HyperparamSpace& space, const FitnessFn& fitness, std::size_t budget,
                                      RngStream rng, std::size_t threads = 1) {
  if (budget < 1) throw ConfigError("random search: budget must be at least 1");
  RngStream sample_rng = rng.child(detail::kInitStream);
  std::vector<HyperparamAssignment> population;
  population.reserve(budget);
  for (std::size_t i = 0; i < budget; ++i) population.push_back(space.sample(sample_rng));
  TuningTrace trace;
  trace.config = {{"type", "random_search"}, {"budget", budget}};
  trace.generations.push_back(
      detail::evaluate_generation(0, population, fitness, rng.child(detail::kEvalStream), threads));
  trace.finalize();
  return trace;
}

}  // namespace arlo
