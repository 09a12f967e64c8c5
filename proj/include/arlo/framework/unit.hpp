#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "arlo/core/hyperparams.hpp"
#include "arlo/core/json_util.hpp"
#include "arlo/framework/stage.hpp"
#include "arlo/tuner/tuner.hpp"

namespace arlo {

/// Performance index used to score candidates while tuning.
///   dataset_entropy, mutual_information: k-NN estimators with `k` neighbours.
///   discounted_return, total_return, average_return: Monte-Carlo over `n_episodes`.
struct IndexSpec {
  std::string id;
  std::size_t n_episodes = 20;
  std::size_t k = 5;

  [[nodiscard]] Json to_json() const { return {{"id", id}, {"n_episodes", n_episodes}, {"k", k}}; }

  static IndexSpec from_json(const Json& j, const std::string& where) {
    require_keys(j, {"id", "n_episodes", "k"}, where);
    IndexSpec s;
    s.id = require(j, "id", where).get<std::string>();
    s.n_episodes = get_or(j, "n_episodes", s.n_episodes);
    s.k = get_or(j, "k", s.k);
    return s;
  }

  friend bool operator==(const IndexSpec&, const IndexSpec&) = default;
};

inline bool is_return_index(const std::string& id) {
  return id == "discounted_return" || id == "total_return" || id == "average_return";
}

/// Index ids each stage kind can be tuned against; the first is the default.
inline std::vector<std::string> admissible_indexes(StageKind k) {
  switch (k) {
    case StageKind::DataGeneration: return {"dataset_entropy"};
    case StageKind::FeatureEngineering: return {"mutual_information"};
    case StageKind::PolicyGeneration: return {"discounted_return", "total_return", "average_return"};
    default: return {};
  }
}

inline IndexSpec default_index(StageKind k) {
  const auto ids = admissible_indexes(k);
  return IndexSpec{ids.empty() ? std::string() : ids.front()};
}

struct FixedUnit {
  std::string algorithm;
  HyperparamAssignment hyperparams;
};

/// An algorithm whose hyper-parameters are searched over `space`; entries of
/// `hyperparams` not in the space stay fixed.
struct TunableUnit {
  std::string algorithm;
  HyperparamAssignment hyperparams;
  HyperparamSpace space;
  TunerConfig tuner;
  IndexSpec index;
};

/// Several tunable candidates; the best after tuning is kept.
struct AutomaticUnit {
  std::vector<TunableUnit> subunits;
  IndexSpec index;
};

using Unit = std::variant<FixedUnit, TunableUnit, AutomaticUnit>;

inline std::string unit_variant_name(const Unit& u) {
  if (std::holds_alternative<FixedUnit>(u)) return "fixed";
  if (std::holds_alternative<TunableUnit>(u)) return "tunable";
  return "automatic";
}

struct StageSpec {
  StageKind kind = StageKind::PolicyGeneration;
  Unit unit;
};

struct Pipeline {
  PipelineKind kind = PipelineKind::online;
  std::vector<StageSpec> stages;
  std::uint64_t global_seed = 0;
};

// ---- JSON ---------------------------------------------------------------

inline Json tunable_fields_to_json(const TunableUnit& u) {
  return {{"algorithm", u.algorithm},
          {"hyperparams", u.hyperparams.to_json()},
          {"space", u.space.to_json()},
          {"tuner", u.tuner.to_json()},
          {"index", u.index.to_json()}};
}

inline Json unit_to_json(const Unit& unit) {
  if (const auto* f = std::get_if<FixedUnit>(&unit)) {
    return {{"variant", "fixed"}, {"algorithm", f->algorithm}, {"hyperparams", f->hyperparams.to_json()}};
  }
  if (const auto* t = std::get_if<TunableUnit>(&unit)) {
    Json j = tunable_fields_to_json(*t);
    j["variant"] = "tunable";
    return j;
  }
  const auto& a = std::get<AutomaticUnit>(unit);
  Json subs = Json::array();
  for (const auto& s : a.subunits) subs.push_back(tunable_fields_to_json(s));
  return {{"variant", "automatic"}, {"subunits", subs}, {"index", a.index.to_json()}};
}

inline TunableUnit tunable_from_json(const Json& j, StageKind kind, const std::string& where,
                                     const IndexSpec* inherited) {
  TunableUnit t;
  t.algorithm = require(j, "algorithm", where).get<std::string>();
  if (auto it = j.find("hyperparams"); it != j.end()) t.hyperparams = HyperparamAssignment::from_json(*it);
  t.space = HyperparamSpace::from_json(require(j, "space", where));
  t.tuner = j.contains("tuner") ? TunerConfig::from_json(j.at("tuner")) : TunerConfig{};
  if (auto it = j.find("index"); it != j.end()) {
    t.index = IndexSpec::from_json(*it, where + " index");
  } else {
    t.index = inherited ? *inherited : default_index(kind);
  }
  return t;
}

inline Unit unit_from_json(const Json& j, StageKind kind, const std::string& where) {
  const std::string variant = require(j, "variant", where).get<std::string>();
  if (variant == "fixed") {
    require_keys(j, {"variant", "algorithm", "hyperparams"}, where);
    FixedUnit f;
    f.algorithm = require(j, "algorithm", where).get<std::string>();
    if (auto it = j.find("hyperparams"); it != j.end()) f.hyperparams = HyperparamAssignment::from_json(*it);
    return f;
  }
  if (variant == "tunable") {
    require_keys(j, {"variant", "algorithm", "hyperparams", "space", "tuner", "index"}, where);
    return tunable_from_json(j, kind, where, nullptr);
  }
  if (variant == "automatic") {
    require_keys(j, {"variant", "subunits", "index"}, where);
    AutomaticUnit a;
    a.index = j.contains("index") ? IndexSpec::from_json(j.at("index"), where + " index") : default_index(kind);
    const auto& subs = require(j, "subunits", where);
    if (!subs.is_array()) throw ConfigError(where + ": subunits must be an array");
    for (std::size_t i = 0; i < subs.size(); ++i) {
      const std::string w = where + " subunit " + std::to_string(i);
      require_keys(subs[i], {"algorithm", "hyperparams", "space", "tuner", "index"}, w);
      a.subunits.push_back(tunable_from_json(subs[i], kind, w, &a.index));
    }
    return a;
  }
  throw ConfigError(where + ": unknown unit variant '" + variant + "'");
}

inline Json stage_to_json(const StageSpec& s) { return {{"kind", to_string(s.kind)}, {"unit", unit_to_json(s.unit)}}; }

inline StageSpec stage_from_json(const Json& j, const std::string& where) {
  require_keys(j, {"kind", "unit"}, where);
  StageSpec s;
  s.kind = parse_stage_kind(require(j, "kind", where).get<std::string>());
  s.unit = unit_from_json(require(j, "unit", where), s.kind, where + " unit");
  return s;
}

}  // namespace arlo
