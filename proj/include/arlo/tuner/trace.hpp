#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "arlo/core/hyperparams.hpp"

namespace arlo {

/// Outcome of one fitness evaluation. Failed evaluations rank below every
/// successful one.
struct Fitness {
  double mean = 0.0;
  double std = 0.0;
  bool failed = false;
  std::string error;

  [[nodiscard]] double score() const {
    return failed ? -std::numeric_limits<double>::infinity() : mean;
  }

  static Fitness failure(std::string why) { return {0.0, 0.0, true, std::move(why)}; }
};

using FitnessFn = std::function<Fitness(const HyperparamAssignment&, RngStream)>;

/// Calls `fn`, turning exceptions and non-finite values into failures.
inline Fitness safe_evaluate(const FitnessFn& fn, const HyperparamAssignment& h, RngStream rng) {
  try {
    Fitness f = fn(h, std::move(rng));
    if (!f.failed && !std::isfinite(f.mean)) return Fitness::failure("non-finite fitness");
    return f;
  } catch (const std::exception& e) {
    return Fitness::failure(e.what());
  }
}

struct TraceMember {
  HyperparamAssignment assignment;
  Fitness fitness;
};

struct TraceGeneration {
  std::size_t index = 0;
  std::vector<TraceMember> members;
  std::size_t best_index = 0;
};

/// Per-generation record of every evaluated assignment.
struct TuningTrace {
  Json config;
  std::vector<TraceGeneration> generations;
  HyperparamAssignment best_assignment;
  Fitness best_fitness = Fitness::failure("no evaluations");
  std::size_t best_generation = 0;
  std::size_t best_member = 0;

  [[nodiscard]] bool any_success() const { return !best_fitness.failed; }

  /// Recomputes per-generation bests and the overall best (first occurrence
  /// wins ties).
  void finalize() {
    bool found = false;
    for (auto& g : generations) {
      g.best_index = 0;
      for (std::size_t i = 1; i < g.members.size(); ++i) {
        if (g.members[i].fitness.score() > g.members[g.best_index].fitness.score()) g.best_index = i;
      }
      const auto& cand = g.members[g.best_index];
      if (!found || cand.fitness.score() > best_fitness.score()) {
        best_assignment = cand.assignment;
        best_fitness = cand.fitness;
        best_generation = g.index;
        best_member = g.best_index;
        found = true;
      }
    }
  }

  [[nodiscard]] Json to_json() const {
    Json gens = Json::array();
    for (const auto& g : generations) {
      Json members = Json::array();
      for (const auto& m : g.members) {
        Json jm{{"h", m.assignment.to_json()}, {"failed", m.fitness.failed}};
        jm["fitness_mean"] = m.fitness.failed ? Json(nullptr) : Json(m.fitness.mean);
        jm["fitness_std"] = m.fitness.failed ? Json(nullptr) : Json(m.fitness.std);
        if (m.fitness.failed) jm["error"] = m.fitness.error;
        members.push_back(std::move(jm));
      }
      gens.push_back({{"index", g.index}, {"members", members}, {"best_index", g.best_index}});
    }
    Json best{{"h", best_assignment.to_json()},
              {"generation", best_generation},
              {"member", best_member},
              {"failed", best_fitness.failed}};
    best["fitness"] = best_fitness.failed ? Json(nullptr) : Json(best_fitness.mean);
    return {{"config", config}, {"generations", gens}, {"best_overall", best}};
  }

  static TuningTrace from_json(const Json& j) {
    TuningTrace t;
    t.config = j.at("config");
    for (const auto& jg : j.at("generations")) {
      TraceGeneration g;
      g.index = jg.at("index").get<std::size_t>();
      g.best_index = jg.at("best_index").get<std::size_t>();
      for (const auto& jm : jg.at("members")) {
        TraceMember m;
        m.assignment = HyperparamAssignment::from_json(jm.at("h"));
        m.fitness.failed = jm.at("failed").get<bool>();
        if (m.fitness.failed) {
          m.fitness.error = get_or<std::string>(jm, "error", "");
        } else {
          m.fitness.mean = jm.at("fitness_mean").get<double>();
          m.fitness.std = jm.at("fitness_std").get<double>();
        }
        g.members.push_back(std::move(m));
      }
      t.generations.push_back(std::move(g));
    }
    const auto& b = j.at("best_overall");
    t.best_assignment = HyperparamAssignment::from_json(b.at("h"));
    t.best_generation = b.at("generation").get<std::size_t>();
    t.best_member = b.at("member").get<std::size_t>();
    t.best_fitness.failed = b.at("failed").get<bool>();
    if (!t.best_fitness.failed) {
      t.best_fitness = t.generations.at(t.best_generation).members.at(t.best_member).fitness;
    }
    return t;
  }
};

}  // namespace arlo
