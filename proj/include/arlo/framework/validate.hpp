#pragma once

#include <map>
#include <string>
#include <vector>

#include "arlo/framework/registry.hpp"
#include "arlo/framework/stage.hpp"
#include "arlo/framework/unit.hpp"

namespace arlo {

namespace detail {

inline void check_index(const IndexSpec& idx, StageKind kind, const std::string& where,
                        std::vector<std::string>& out) {
  const auto ok = admissible_indexes(kind);
  if (std::find(ok.begin(), ok.end(), idx.id) == ok.end()) {
    out.push_back(where + ": index '" + idx.id + "' does not apply to " + to_string(kind));
  }
  if (is_return_index(idx.id) && idx.n_episodes < 1) out.push_back(where + ": index needs n_episodes >= 1");
  if (!is_return_index(idx.id) && idx.k < 1) out.push_back(where + ": index needs k >= 1");
}

inline void check_algorithm(const std::string& algorithm, const HyperparamAssignment& h, PipelineKind pk,
                            StageKind kind, const AlgorithmRegistry& reg, const std::string& where,
                            std::vector<std::string>& out) {
  const auto* info = reg.find(algorithm);
  if (!info || info->stage != kind || (info->only && *info->only != pk)) {
    out.push_back(where + ": algorithm '" + algorithm + "' is not available for " + to_string(kind) + " in an " +
                  to_string(pk) + " pipeline");
    return;
  }
  try {
    resolve_hyperparams(*info, h);
  } catch (const ConfigError& e) {
    out.push_back(where + ": " + e.what());
  }
}

inline void check_tunable(const TunableUnit& t, PipelineKind pk, StageKind kind, const AlgorithmRegistry& reg,
                          const std::string& where, std::vector<std::string>& out) {
  check_algorithm(t.algorithm, t.hyperparams, pk, kind, reg, where, out);
  if (t.space.empty()) out.push_back(where + ": tunable unit has an empty search space");
  if (const auto* info = reg.find(t.algorithm)) {
    for (const auto& e : t.space.entries()) {
      if (!info->defaults.has(e.name)) {
        out.push_back(where + ": algorithm '" + t.algorithm + "' has no hyper-parameter '" + e.name + "'");
      }
    }
  }
  try {
    if (t.tuner.type == TunerConfig::Type::genetic) {
      t.tuner.genetic.validate();
    } else if (t.tuner.budget < 1) {
      throw ConfigError("random search budget must be at least 1");
    }
  } catch (const ConfigError& e) {
    out.push_back(where + ": " + e.what());
  }
  check_index(t.index, kind, where, out);
}

}  // namespace detail

/// Structural check of a pipeline against the slots supplied as input.
/// Returns human-readable violations; empty means valid.
inline std::vector<std::string> validate_pipeline(const Pipeline& p, const SlotSet& input,
                                                  const AlgorithmRegistry& reg = default_registry()) {
  std::vector<std::string> out;
  const auto& st = p.stages;
  const std::string pk = to_string(p.kind);

  if (!input.count(SlotType::Environment)) {
    out.push_back("pipeline input: an Environment is required (discount, spaces and evaluation come from it)");
  }

  std::map<StageKind, std::size_t> seen;
  for (std::size_t i = 0; i < st.size(); ++i) {
    const auto k = st[i].kind;
    if (!stage_rank(p.kind, k)) out.push_back("stage " + std::to_string(i) + ": " + to_string(k) + " is not allowed in an " + pk + " pipeline");
    if (seen.count(k)) {
      out.push_back("stage " + std::to_string(seen[k]) + " / stage " + std::to_string(i) + ": duplicate " + to_string(k));
    } else {
      seen[k] = i;
    }
  }
  if (!seen.count(StageKind::PolicyGeneration)) out.push_back("pipeline: a PolicyGeneration stage is required");

  for (std::size_t i = 0; i + 1 < st.size(); ++i) {
    for (std::size_t j = i + 1; j < st.size(); ++j) {
      if (static_cast<int>(st[i].kind) > static_cast<int>(st[j].kind)) {
        out.push_back("stage " + std::to_string(i) + " / stage " + std::to_string(j) + ": " + to_string(st[i].kind) +
                      " before " + to_string(st[j].kind));
      }
    }
  }

  SlotSet live = input;
  for (std::size_t i = 0; i < st.size(); ++i) {
    const auto k = st[i].kind;
    const std::string prev = i == 0 ? std::string("pipeline input") : "stage " + std::to_string(i - 1) + " (" + to_string(st[i - 1].kind) + ")";
    for (auto need : slot_signature(p.kind, k).inputs) {
      if (!live.count(need)) {
        out.push_back(prev + " -> stage " + std::to_string(i) + ": " + to_string(k) + " requires " + to_string(need));
      }
    }
    live = slots_after(p.kind, k, live);
  }

  for (std::size_t i = 0; i < st.size(); ++i) {
    const auto k = st[i].kind;
    const std::string where = "stage " + std::to_string(i) + " (" + to_string(k) + ")";
    const auto& u = st[i].unit;
    const bool fixed_only = k == StageKind::PolicyEvaluation || k == StageKind::DataPreparation;
    if (fixed_only && !std::holds_alternative<FixedUnit>(u)) {
      out.push_back(where + ": only fixed units are admitted");
      continue;
    }
    if (const auto* f = std::get_if<FixedUnit>(&u)) {
      detail::check_algorithm(f->algorithm, f->hyperparams, p.kind, k, reg, where, out);
    } else if (const auto* t = std::get_if<TunableUnit>(&u)) {
      detail::check_tunable(*t, p.kind, k, reg, where, out);
    } else {
      const auto& a = std::get<AutomaticUnit>(u);
      if (a.subunits.empty()) out.push_back(where + ": automatic unit needs at least one subunit");
      for (std::size_t j = 0; j < a.subunits.size(); ++j) {
        detail::check_tunable(a.subunits[j], p.kind, k, reg, where + " subunit " + std::to_string(j), out);
      }
      detail::check_index(a.index, k, where, out);
    }
  }
  return out;
}

}  // namespace arlo
