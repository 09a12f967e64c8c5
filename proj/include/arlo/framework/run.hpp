#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arlo/framework/registry.hpp"
#include "arlo/framework/validate.hpp"
#include "arlo/tuner/tuner.hpp"

namespace arlo {

/// Sub-stream layout under a stage's stream.
inline constexpr std::uint64_t kStageExecute = 0;
inline constexpr std::uint64_t kStageTune = 1;
inline constexpr std::uint64_t kStageInternalData = 2;
inline constexpr std::uint64_t kStageReevaluate = 3;

class TuningFailed : public Error {
 public:
  TuningFailed(const std::string& what, TuningTrace trace) : Error(what), trace_(std::move(trace)) {}
  [[nodiscard]] const TuningTrace& trace() const { return trace_; }

 private:
  TuningTrace trace_;
};

class StageFailed : public Error {
 public:
  StageFailed(std::size_t index, StageKind kind, const std::string& cause, bool config_cause = false)
      : Error("stage " + std::to_string(index) + " (" + to_string(kind) + ") failed: " + cause),
        index_(index),
        kind_(kind),
        config_cause_(config_cause) {}
  [[nodiscard]] std::size_t index() const { return index_; }
  [[nodiscard]] StageKind kind() const { return kind_; }
  /// True when the cause was a rejected configuration value.
  [[nodiscard]] bool config_cause() const { return config_cause_; }

 private:
  std::size_t index_;
  StageKind kind_;
  bool config_cause_;
};

struct TuneOutcome {
  HyperparamAssignment hyperparams;  ///< full assignment (defaults, fixed part, tuned part)
  TuningTrace trace;
};

/// Searches the unit's space; the fitness of a candidate is the unit's
/// performance index. The trace records the searched entries only.
inline TuneOutcome tune_unit(const TunableUnit& u, const StageContext& ctx, RngStream rng,
                             const AlgorithmRegistry& reg = default_registry(), std::size_t threads = 1) {
  const auto& info = reg.at(u.algorithm);
  const auto base = resolve_hyperparams(info, u.hyperparams);
  const IndexSpec idx = u.index;
  FitnessFn fitness = [&info, &ctx, base, idx](const HyperparamAssignment& h, RngStream r) {
    return evaluate_index(info, base.merged(h), ctx, idx, std::move(r));
  };
  auto trace = run_tuner(u.space, fitness, u.tuner, std::move(rng), threads);
  if (!trace.any_success()) {
    std::string why = "tuning '" + u.algorithm + "': every evaluation failed";
    if (!trace.generations.empty() && !trace.generations.front().members.empty()) {
      why += " (first error: " + trace.generations.front().members.front().fitness.error + ")";
    }
    throw TuningFailed(why, std::move(trace));
  }
  return {base.merged(trace.best_assignment), std::move(trace)};
}

struct SubunitRecord {
  std::string algorithm;
  std::optional<TuningTrace> trace;
  HyperparamAssignment hyperparams;
  Fitness reevaluation = Fitness::failure("not evaluated");
  std::string error;  ///< set when tuning failed

  [[nodiscard]] bool ok() const { return error.empty(); }
};

struct AutomaticOutcome {
  std::size_t chosen = 0;
  std::vector<SubunitRecord> subunits;
};

/// Tunes each subunit (subunit j on tune_rng.child(j)), re-scores every tuned
/// candidate with the automatic index on reeval_rng.child(j), and keeps the
/// best (ties: lowest index). Failed subunits are recorded and skipped.
inline AutomaticOutcome resolve_automatic(const AutomaticUnit& u, const StageContext& ctx, RngStream tune_rng,
                                          RngStream reeval_rng, const AlgorithmRegistry& reg = default_registry(),
                                          std::size_t threads = 1) {
  if (u.subunits.empty()) throw ConfigError("automatic unit has no subunits");
  AutomaticOutcome out;
  bool any = false;
  for (std::size_t j = 0; j < u.subunits.size(); ++j) {
    const auto& sub = u.subunits[j];
    SubunitRecord rec;
    rec.algorithm = sub.algorithm;
    try {
      auto tuned = tune_unit(sub, ctx, tune_rng.child(j), reg, threads);
      rec.hyperparams = tuned.hyperparams;
      rec.trace = std::move(tuned.trace);
      const auto& info = reg.at(sub.algorithm);
      rec.reevaluation = safe_evaluate(
          [&](const HyperparamAssignment& h, RngStream r) { return evaluate_index(info, h, ctx, u.index, std::move(r)); },
          rec.hyperparams, reeval_rng.child(j));
    } catch (const TuningFailed& e) {
      rec.error = e.what();
      rec.trace = e.trace();
    }
    if (rec.ok() && !rec.reevaluation.failed) {
      if (!any || rec.reevaluation.score() > out.subunits[out.chosen].reevaluation.score()) out.chosen = j;
      any = true;
    }
    out.subunits.push_back(std::move(rec));
  }
  if (!any) {
    std::string why = "automatic unit: no subunit produced a usable candidate";
    for (std::size_t j = 0; j < out.subunits.size(); ++j) {
      const auto& s = out.subunits[j];
      why += "; subunit " + std::to_string(j) + " (" + s.algorithm + "): " +
             (s.ok() ? s.reevaluation.error : s.error);
    }
    throw Error(why);
  }
  return out;
}

struct StageReport {
  StageKind kind = StageKind::PolicyGeneration;
  std::string unit_variant;
  std::string algorithm;
  HyperparamAssignment chosen_hyperparams;
  std::optional<TuningTrace> trace;       ///< tunable
  std::optional<AutomaticOutcome> automatic;
  std::optional<FeatureTransform> transform;
  std::shared_ptr<const Dataset> dataset;  ///< dataset produced by this stage, if any
};

struct RunResult {
  PipelineKind pipeline_kind = PipelineKind::online;
  std::uint64_t seed = 0;
  std::string run_id;
  PolicyPtr final_policy;
  std::optional<ReturnEstimate> evaluation;
  std::vector<StageReport> stages;
  StageIO final_io;

  /// Paths under the run directory where each stage's traces are written.
  [[nodiscard]] static std::string trace_path(std::size_t stage, std::optional<std::size_t> sub = std::nullopt) {
    std::string p = "traces/stage" + std::to_string(stage);
    if (sub) p += "_sub" + std::to_string(*sub);
    return p + ".json";
  }

  [[nodiscard]] Json to_json() const {
    Json stages_json = Json::array();
    for (std::size_t i = 0; i < stages.size(); ++i) {
      const auto& s = stages[i];
      Json js{{"kind", to_string(s.kind)},
              {"unit_variant", s.unit_variant},
              {"algorithm", s.algorithm},
              {"chosen_hyperparams", s.chosen_hyperparams.to_json()}};
      js["trace_ref"] = s.trace ? Json(trace_path(i)) : Json(nullptr);
      if (s.automatic) {
        Json subs = Json::array();
        for (std::size_t j = 0; j < s.automatic->subunits.size(); ++j) {
          const auto& r = s.automatic->subunits[j];
          Json jr{{"algorithm", r.algorithm}, {"ok", r.ok()}};
          jr["trace_ref"] = r.trace ? Json(trace_path(i, j)) : Json(nullptr);
          if (r.ok()) {
            jr["chosen_hyperparams"] = r.hyperparams.to_json();
            jr["reevaluation"] = {{"failed", r.reevaluation.failed},
                                  {"mean", r.reevaluation.failed ? Json(nullptr) : Json(r.reevaluation.mean)},
                                  {"std", r.reevaluation.failed ? Json(nullptr) : Json(r.reevaluation.std)}};
            if (r.reevaluation.failed) jr["reevaluation"]["error"] = r.reevaluation.error;
          } else {
            jr["error"] = r.error;
          }
          subs.push_back(std::move(jr));
        }
        js["automatic"] = {{"chosen", s.automatic->chosen}, {"subunits", subs}};
      }
      if (s.transform) js["feature_transform"] = s.transform->to_json();
      stages_json.push_back(std::move(js));
    }
    Json j{{"run_id", run_id}, {"seed", seed}, {"pipeline_kind", to_string(pipeline_kind)}, {"stages", stages_json}};
    j["evaluation"] = evaluation ? evaluation->to_json() : Json(nullptr);
    return j;
  }
};

struct RunOptions {
  std::size_t threads = 1;
  std::string run_id = "run";
};

namespace detail {

inline void check_slots(const SlotSet& expected, const SlotSet& actual, std::size_t i, StageKind k) {
  if (expected != actual) {
    std::string e, a;
    for (auto s : expected) e += to_string(s) + " ";
    for (auto s : actual) a += to_string(s) + " ";
    throw StageFailed(i, k, "slot mismatch after stage: expected { " + e + "}, got { " + a + "}");
  }
}

}  // namespace detail

/// Executes the stages in order. Stage i uses rng.child(i); inside it the
/// execution draws from child(0), tuning from child(1), online feature
/// engineering's selection dataset from child(2), automatic re-scoring from
/// child(3).
inline RunResult run_pipeline(const Pipeline& p, const StageIO& input, RngStream rng,
                              const AlgorithmRegistry& reg = default_registry(), const RunOptions& opts = {}) {
  const auto diags = validate_pipeline(p, input.live(), reg);
  if (!diags.empty()) {
    std::string msg = "invalid pipeline:";
    for (const auto& d : diags) msg += "\n  " + d;
    throw ConfigError(msg);
  }
  RunResult result;
  result.pipeline_kind = p.kind;
  result.seed = p.global_seed;
  result.run_id = opts.run_id;
  StageIO io = input;
  for (std::size_t i = 0; i < p.stages.size(); ++i) {
    const auto& stage = p.stages[i];
    const RngStream srng = rng.child(i);
    StageReport rep;
    rep.kind = stage.kind;
    rep.unit_variant = unit_variant_name(stage.unit);
    try {
      StageContext ctx{p.kind, stage.kind, io, nullptr};
      if (stage.kind == StageKind::FeatureEngineering && p.kind == PipelineKind::online) {
        std::size_t episodes = 0;
        auto episodes_of = [&](const std::string& algo, const HyperparamAssignment& h) {
          episodes = std::max(episodes, resolve_hyperparams(reg.at(algo), h).get_count("internal_episodes"));
        };
        if (const auto* f = std::get_if<FixedUnit>(&stage.unit)) episodes_of(f->algorithm, f->hyperparams);
        if (const auto* t = std::get_if<TunableUnit>(&stage.unit)) episodes_of(t->algorithm, t->hyperparams);
        if (const auto* a = std::get_if<AutomaticUnit>(&stage.unit)) {
          for (const auto& s : a->subunits) episodes_of(s.algorithm, s.hyperparams);
        }
        ctx.internal_dataset = std::make_shared<const Dataset>(
            dg_random_uniform(*io.env, episodes, srng.child(kStageInternalData)));
      }

      const AlgorithmInfo* info = nullptr;
      HyperparamAssignment h;
      if (const auto* f = std::get_if<FixedUnit>(&stage.unit)) {
        info = &reg.at(f->algorithm);
        h = resolve_hyperparams(*info, f->hyperparams);
      } else if (const auto* t = std::get_if<TunableUnit>(&stage.unit)) {
        info = &reg.at(t->algorithm);
        auto tuned = tune_unit(*t, ctx, srng.child(kStageTune), reg, opts.threads);
        h = tuned.hyperparams;
        rep.trace = std::move(tuned.trace);
      } else {
        const auto& a = std::get<AutomaticUnit>(stage.unit);
        auto outcome = resolve_automatic(a, ctx, srng.child(kStageTune), srng.child(kStageReevaluate), reg, opts.threads);
        const auto& chosen = outcome.subunits[outcome.chosen];
        info = &reg.at(chosen.algorithm);
        h = chosen.hyperparams;
        rep.automatic = std::move(outcome);
      }
      rep.algorithm = info->id;
      rep.chosen_hyperparams = h;

      const SlotSet before = io.live();
      auto out = info->execute(h, ctx, srng.child(kStageExecute));
      detail::check_slots(slots_after(p.kind, stage.kind, before), out.io.live(), i, stage.kind);
      rep.transform = out.transform;
      if (out.io.dataset && out.io.dataset != io.dataset) rep.dataset = out.io.dataset;
      if (out.io.policy) result.final_policy = out.io.policy;
      if (out.io.evaluation) result.evaluation = out.io.evaluation;
      io = std::move(out.io);
    } catch (const StageFailed&) {
      throw;
    } catch (const ConfigError& e) {
      throw StageFailed(i, stage.kind, e.what(), true);
    } catch (const std::exception& e) {
      throw StageFailed(i, stage.kind, e.what());
    }
    result.stages.push_back(std::move(rep));
  }
  result.final_io = io;
  return result;
}

}  // namespace arlo
