#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "arlo/core/parallel.hpp"
#include "arlo/tuner/trace.hpp"

namespace arlo {

struct GeneticConfig {
  std::size_t n_generations = 50;
  std::size_t n_agents = 20;
  double mutation_prob = 0.5;
  std::size_t tournament_size = 3;
  double numeric_mutation_lo = 0.8;
  double numeric_mutation_hi = 1.2;

  void validate() const {
    if (n_generations < 1) throw ConfigError("genetic tuner: n_generations must be at least 1");
    if (n_agents < 2) throw ConfigError("genetic tuner: n_agents must be at least 2");
    if (tournament_size < 1 || tournament_size > n_agents) {
      throw ConfigError("genetic tuner: tournament_size must lie in [1, n_agents]");
    }
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
      throw ConfigError("genetic tuner: mutation_prob must lie in [0, 1]");
    }
    if (!(numeric_mutation_lo < numeric_mutation_hi)) {
      throw ConfigError("genetic tuner: numeric_mutation_lo must be below numeric_mutation_hi");
    }
  }

  [[nodiscard]] Json to_json() const {
    return {{"type", "genetic"},
            {"n_generations", n_generations},
            {"n_agents", n_agents},
            {"mutation_prob", mutation_prob},
            {"tournament_size", tournament_size},
            {"numeric_mutation_lo", numeric_mutation_lo},
            {"numeric_mutation_hi", numeric_mutation_hi}};
  }

  static GeneticConfig from_json(const Json& j) {
    require_keys(j, {"type", "n_generations", "n_agents", "mutation_prob", "tournament_size", "numeric_mutation_lo",
                     "numeric_mutation_hi"},
                 "genetic tuner");
    GeneticConfig c;
    c.n_generations = get_or(j, "n_generations", c.n_generations);
    c.n_agents = get_or(j, "n_agents", c.n_agents);
    c.mutation_prob = get_or(j, "mutation_prob", c.mutation_prob);
    c.tournament_size = get_or(j, "tournament_size", c.tournament_size);
    c.numeric_mutation_lo = get_or(j, "numeric_mutation_lo", c.numeric_mutation_lo);
    c.numeric_mutation_hi = get_or(j, "numeric_mutation_hi", c.numeric_mutation_hi);
    c.validate();
    return c;
  }
};

/// Multiplicative mutation of a real value, clamped into its range. On a log
/// scale the factor multiplies ln(value).
inline double mutate_real(double value, double factor, const RealRange& range) {
  double out;
  if (range.scale == Scale::log) {
    out = std::exp(std::log(value) * factor);
  } else {
    out = value * factor;
  }
  return std::clamp(out, range.lo, range.hi);
}

/// Each entry mutates independently with probability cfg.mutation_prob.
/// Categorical and integer entries are resampled over their whole domain;
/// reals are scaled by a factor drawn from [lo, hi).
inline HyperparamAssignment mutate(const HyperparamAssignment& a, const HyperparamSpace& space,
                                   const GeneticConfig& cfg, RngStream& rng) {
  HyperparamAssignment out = a;
  for (const auto& e : space.entries()) {
    if (!rng.bernoulli(cfg.mutation_prob)) continue;
    if (const auto* r = std::get_if<RealRange>(&e.domain)) {
      const double factor = rng.uniform(cfg.numeric_mutation_lo, cfg.numeric_mutation_hi);
      out.set(e.name, mutate_real(a.get_real(e.name), factor, *r));
    } else {
      out.set(e.name, HyperparamSpace::sample_domain(e.domain, rng));
    }
  }
  return out;
}

/// Draws `size` distinct members uniformly and returns the index of the
/// fittest; ties go to the lowest index.
inline std::size_t tournament_select(std::span<const double> fitness, std::size_t size, RngStream& rng) {
  const std::size_t n = fitness.size();
  if (size < 1 || size > n) throw InvalidArgument("tournament_select: size must lie in [1, population]");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < size; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
  std::size_t best = idx[0];
  for (std::size_t i = 1; i < size; ++i) {
    const std::size_t c = idx[i];
    if (fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best)) best = c;
  }
  return best;
}

namespace detail {

// Substreams of a tuner stream.
inline constexpr std::uint64_t kInitStream = 0;
inline constexpr std::uint64_t kEvalStream = 1;
inline constexpr std::uint64_t kSelectStream = 2;
inline constexpr std::uint64_t kMutateStream = 3;

inline TraceGeneration evaluate_generation(std::size_t index, const std::vector<HyperparamAssignment>& population,
                                           const FitnessFn& fitness, const RngStream& eval_root,
                                           std::size_t threads) {
  TraceGeneration g;
  g.index = index;
  g.members.resize(population.size());
  const RngStream gen_rng = eval_root.child(index);
  parallel_for(population.size(), threads, [&](std::size_t a) {
    g.members[a] = {population[a], safe_evaluate(fitness, population[a], gen_rng.child(a))};
  });
  return g;
}

}  // namespace detail

/// Genetic tuner: random initial population; each generation is evaluated,
/// its best member is copied unmutated into the next generation, and the
/// remaining n_agents - 1 slots are filled by tournament selection and then
/// mutated. Agent a of generation g is evaluated with rng path
/// (..., 1, g, a), so results do not depend on evaluation order.
inline TuningTrace genetic_tune(const HyperparamSpace& space, const FitnessFn& fitness, const GeneticConfig& cfg,
                                RngStream rng, std::size_t threads = 1) {
  cfg.validate();
  RngStream init_rng = rng.child(detail::kInitStream);
  const RngStream eval_root = rng.child(detail::kEvalStream);

  std::vector<HyperparamAssignment> population;
  population.reserve(cfg.n_agents);
  for (std::size_t a = 0; a < cfg.n_agents; ++a) population.push_back(space.sample(init_rng));

  TuningTrace trace;
  trace.config = cfg.to_json();
  for (std::size_t g = 0; g < cfg.n_generations; ++g) {
    trace.generations.push_back(detail::evaluate_generation(g, population, fitness, eval_root, threads));
    if (g + 1 == cfg.n_generations) break;

    const auto& members = trace.generations.back().members;
    std::vector<double> scores(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) scores[i] = members[i].fitness.score();
    std::size_t elite = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
      if (scores[i] > scores[elite]) elite = i;
    }

    RngStream select_rng = rng.child(detail::kSelectStream).child(g);
    RngStream mutate_rng = rng.child(detail::kMutateStream).child(g);
    std::vector<HyperparamAssignment> next;
    next.reserve(cfg.n_agents);
    next.push_back(members[elite].assignment);
    for (std::size_t j = 0; j + 1 < cfg.n_agents; ++j) {
      next.push_back(members[tournament_select(scores, cfg.tournament_size, select_rng)].assignment);
    }
    for (std::size_t j = 1; j < next.size(); ++j) next[j] = mutate(next[j], space, cfg, mutate_rng);
    population = std::move(next);
  }
  trace.finalize();
  return trace;
}

}  // namespace arlo
