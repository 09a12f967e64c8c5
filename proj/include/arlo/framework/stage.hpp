#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "arlo/core/error.hpp"

namespace arlo {

enum class SlotType { Environment, Dataset, Policy, Scalar };

enum class StageKind { DataGeneration, DataPreparation, FeatureEngineering, PolicyGeneration, PolicyEvaluation };

enum class PipelineKind { online, offline };

using SlotSet = std::set<SlotType>;

inline std::string to_string(SlotType s) {
  switch (s) {
    case SlotType::Environment: return "Environment";
    case SlotType::Dataset: return "Dataset";
    case SlotType::Policy: return "Policy";
    case SlotType::Scalar: return "Scalar";
  }
  return "?";
}

inline std::string to_string(StageKind k) {
  switch (k) {
    case StageKind::DataGeneration: return "DataGeneration";
    case StageKind::DataPreparation: return "DataPreparation";
    case StageKind::FeatureEngineering: return "FeatureEngineering";
    case StageKind::PolicyGeneration: return "PolicyGeneration";
    case StageKind::PolicyEvaluation: return "PolicyEvaluation";
  }
  return "?";
}

inline std::string to_string(PipelineKind k) { return k == PipelineKind::online ? "online" : "offline"; }

inline StageKind parse_stage_kind(const std::string& s) {
  for (auto k : {StageKind::DataGeneration, StageKind::DataPreparation, StageKind::FeatureEngineering,
                 StageKind::PolicyGeneration, StageKind::PolicyEvaluation}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown stage kind '" + s + "'");
}

inline PipelineKind parse_pipeline_kind(const std::string& s) {
  if (s == "online") return PipelineKind::online;
  if (s == "offline") return PipelineKind::offline;
  throw ConfigError("unknown pipeline kind '" + s + "'");
}

/// Position of a stage kind in the fixed order, or nullopt if the kind is
/// not admitted by pipelines of kind `pk`.
inline std::optional<int> stage_rank(PipelineKind pk, StageKind k) {
  if (pk == PipelineKind::online && (k == StageKind::DataGeneration || k == StageKind::DataPreparation)) {
    return std::nullopt;
  }
  return static_cast<int>(k);
}

struct SlotSignature {
  SlotSet inputs;
  SlotSet outputs;
};

/// Declared slots per stage kind. Slots not consumed (the environment next
/// to a dataset, for instance) pass through untouched.
inline SlotSignature slot_signature(PipelineKind pk, StageKind k) {
  using S = SlotType;
  switch (k) {
    case StageKind::DataGeneration: return {{S::Environment}, {S::Environment, S::Dataset}};
    case StageKind::DataPreparation: return {{S::Dataset}, {S::Dataset}};
    case StageKind::FeatureEngineering:
      if (pk == PipelineKind::online) return {{S::Environment}, {S::Environment}};
      return {{S::Environment, S::Dataset}, {S::Environment, S::Dataset}};
    case StageKind::PolicyGeneration:
      if (pk == PipelineKind::online) return {{S::Environment}, {S::Policy}};
      return {{S::Dataset}, {S::Policy}};
    case StageKind::PolicyEvaluation: return {{S::Environment, S::Policy}, {S::Scalar}};
  }
  return {};
}

/// Live slots after a stage. Consumed inputs that the stage does not emit
/// again are dropped, except the environment, which always rides along.
inline SlotSet slots_after(PipelineKind pk, StageKind k, const SlotSet& live) {
  const auto sig = slot_signature(pk, k);
  SlotSet out;
  for (auto s : live) {
    if (s == SlotType::Environment || !sig.inputs.count(s)) out.insert(s);
  }
  for (auto s : sig.outputs) out.insert(s);
  return out;
}

}  // namespace arlo
