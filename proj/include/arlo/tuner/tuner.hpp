#pragma once

#include <string>

#include "arlo/tuner/genetic.hpp"
#include "arlo/tuner/random_search.hpp"

namespace arlo {

/// Tuner selection as it appears in configuration files.
struct TunerConfig {
  enum class Type { genetic, random_search };
  Type type = Type::genetic;
  GeneticConfig genetic;
  std::size_t budget = 100;

  [[nodiscard]] Json to_json() const {
    if (type == Type::genetic) return genetic.to_json();
    return {{"type", "random_search"}, {"budget", budget}};
  }

  static TunerConfig from_json(const Json& j) {
    TunerConfig c;
    const std::string type = require(j, "type", "tuner").get<std::string>();
    if (type == "genetic") {
      c.type = Type::genetic;
      c.genetic = GeneticConfig::from_json(j);
    } else if (type == "random_search") {
      require_keys(j, {"type", "budget"}, "random_search tuner");
      c.type = Type::random_search;
      c.budget = get_or(j, "budget", c.budget);
      if (c.budget < 1) throw ConfigError("random search: budget must be at least 1");
    } else {
      throw ConfigError("unknown tuner type '" + type + "'");
    }
    return c;
  }
};

inline TuningTrace run_tuner(const HyperparamSpace& space, const FitnessFn& fitness, const TunerConfig& cfg,
                             RngStream rng, std::size_t threads = 1) {
  if (cfg.type == TunerConfig::Type::genetic) return genetic_tune(space, fitness, cfg.genetic, std::move(rng), threads);
  return random_search_tune(space, fitness, cfg.budget, std::move(rng), threads);
}

}  // namespace arlo
