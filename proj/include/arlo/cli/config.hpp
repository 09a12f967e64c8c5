#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "arlo/cli/environment_spec.hpp"
#include "arlo/framework/unit.hpp"
#include "arlo/metrics/returns.hpp"

namespace arlo {

inline constexpr int kConfigVersion = 1;

/// Shorthand for a trailing fixed Monte-Carlo evaluation stage.
struct EvalSettings {
  std::size_t n_episodes = 100;
  ReturnKind kind = ReturnKind::discounted;
};

/// Declarative description of one run (JSON document, version 1):
///   { "version": 1, "pipeline": "online" | "offline", "environment": {...},
///     "dataset": "path.jsonl"?, "seed": int?, "output": dir?, "threads": int?,
///     "stages": [ {"kind": ..., "unit": {...}} ], "evaluation": {...}? }
struct RunConfig {
  PipelineKind pipeline = PipelineKind::online;
  EnvironmentSpec environment;
  std::optional<std::string> dataset;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::size_t threads = 1;
  std::vector<StageSpec> stages;
  std::optional<EvalSettings> evaluation;

  [[nodiscard]] Json to_json() const {
    Json st = Json::array();
    for (const auto& s : stages) st.push_back(stage_to_json(s));
    Json j{{"version", kConfigVersion},
           {"pipeline", to_string(pipeline)},
           {"environment", environment.to_json()},
           {"threads", threads},
           {"stages", st}};
    if (dataset) j["dataset"] = *dataset;
    if (seed) j["seed"] = *seed;
    if (output) j["output"] = *output;
    if (evaluation) j["evaluation"] = {{"n_episodes", evaluation->n_episodes}, {"kind", to_string(evaluation->kind)}};
    return j;
  }

  static RunConfig from_json(const Json& j) {
    const std::string where = "config";
    require_keys(j, {"version", "pipeline", "environment", "dataset", "seed", "output", "threads", "stages", "evaluation"},
                 where);
    try {
      const auto version = require(j, "version", where).get<int>();
      if (version != kConfigVersion) {
        throw ConfigError(where + ": unsupported version " + std::to_string(version) + " (expected " +
                          std::to_string(kConfigVersion) + ")");
      }
      RunConfig c;
      c.pipeline = parse_pipeline_kind(require(j, "pipeline", where).get<std::string>());
      c.environment = EnvironmentSpec::from_json(require(j, "environment", where));
      if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
      if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("output")) c.output = j.at("output").get<std::string>();
      c.threads = get_or<std::size_t>(j, "threads", 1);
      if (c.threads < 1) throw ConfigError(where + ": threads must be at least 1");
      const auto& st = require(j, "stages", where);
      if (!st.is_array()) throw ConfigError(where + ": stages must be an array");
      for (std::size_t i = 0; i < st.size(); ++i) c.stages.push_back(stage_from_json(st[i], "stage " + std::to_string(i)));
      if (j.contains("evaluation")) {
        const auto& e = j.at("evaluation");
        require_keys(e, {"n_episodes", "kind"}, "evaluation");
        EvalSettings s;
        s.n_episodes = get_or(e, "n_episodes", s.n_episodes);
        s.kind = parse_return_kind(get_or<std::string>(e, "kind", "discounted"));
        c.evaluation = s;
      }
      return c;
    } catch (const Json::exception& ex) {
      throw ConfigError(where + ": " + ex.what());
    }
  }

  /// The pipeline to run. The evaluation shorthand becomes a final fixed
  /// monte_carlo stage.
  [[nodiscard]] Pipeline to_pipeline(std::uint64_t global_seed) const {
    Pipeline p;
    p.kind = pipeline;
    p.stages = stages;
    p.global_seed = global_seed;
    if (evaluation) {
      for (const auto& s : stages) {
        if (s.kind == StageKind::PolicyEvaluation) {
          throw ConfigError("config: the evaluation block conflicts with an explicit PolicyEvaluation stage");
        }
      }
      p.stages.push_back({StageKind::PolicyEvaluation,
                          FixedUnit{"monte_carlo",
                                    HyperparamAssignment{{"n_episodes", static_cast<std::int64_t>(evaluation->n_episodes)},
                                                         {"kind", to_string(evaluation->kind)}}}});
    }
    return p;
  }
};

/// Applies `path=value` to a JSON document. The path is dot-separated;
/// numeric components index arrays. The value is parsed as JSON when
/// possible and taken as a string otherwise.
inline void apply_override(Json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::exception&) {
    value = text;
  }
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError("override '" + assignment + "': empty path component");
    parts.push_back(part);
  }
  Json* node = &root;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& key = parts[i];
    const bool last = i + 1 == parts.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw ConfigError("override '" + assignment + "': '" + key + "' is not an array index");
      }
      if (idx >= node->size()) throw ConfigError("override '" + assignment + "': index " + key + " out of range");
      node = &(*node)[idx];
    } else if (node->is_object() || node->is_null()) {
      if (node->is_null()) *node = Json::object();
      if (!last && !node->contains(key)) (*node)[key] = Json::object();
      node = &(*node)[key];
    } else {
      throw ConfigError("override '" + assignment + "': cannot descend into a scalar at '" + key + "'");
    }
    if (last) *node = value;
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& ex) {
    throw ConfigError("'" + path + "' is not valid JSON: " + ex.what());
  }
}

}  // namespace arlo
