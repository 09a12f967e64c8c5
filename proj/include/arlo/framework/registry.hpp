#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arlo/core/dataset.hpp"
#include "arlo/core/hyperparams.hpp"
#include "arlo/core/policy.hpp"
#include "arlo/envs/environment.hpp"
#include "arlo/framework/stage.hpp"
#include "arlo/framework/unit.hpp"
#include "arlo/metrics/returns.hpp"
#include "arlo/tuner/trace.hpp"
#include "arlo/units/data_generation.hpp"
#include "arlo/units/data_preparation.hpp"
#include "arlo/units/feature_engineering.hpp"
#include "arlo/units/fqi.hpp"
#include "arlo/units/gpomdp.hpp"
#include "arlo/units/lspi.hpp"
#include "arlo/units/policy_evaluation.hpp"
#include "arlo/units/q_learning.hpp"

namespace arlo {

/// Slot values flowing between stages.
struct StageIO {
  std::shared_ptr<const Environment> env;
  std::shared_ptr<const Dataset> dataset;
  PolicyPtr policy;
  std::optional<ReturnEstimate> evaluation;

  [[nodiscard]] SlotSet live() const {
    SlotSet s;
    if (env) s.insert(SlotType::Environment);
    if (dataset) s.insert(SlotType::Dataset);
    if (policy) s.insert(SlotType::Policy);
    if (evaluation) s.insert(SlotType::Scalar);
    return s;
  }
};

/// What a stage sees while running or being tuned.
struct StageContext {
  PipelineKind pipeline = PipelineKind::online;
  StageKind kind = StageKind::PolicyGeneration;
  StageIO input;
  /// Online feature engineering: the random-policy dataset the selection is
  /// computed on (drawn once per stage).
  std::shared_ptr<const Dataset> internal_dataset;
};

struct StageOutput {
  StageIO io;
  std::optional<FeatureTransform> transform;
};

using ExecuteFn = std::function<StageOutput(const HyperparamAssignment&, const StageContext&, RngStream)>;
using IndexFn = std::function<Fitness(const HyperparamAssignment&, const StageContext&, const IndexSpec&, RngStream)>;

struct AlgorithmInfo {
  std::string id;
  StageKind stage = StageKind::PolicyGeneration;
  std::optional<PipelineKind> only;  ///< restricts PG algorithms to online or offline
  HyperparamAssignment defaults;
  ExecuteFn execute;
  IndexFn index;  ///< optional override of the stage kind's generic index
};

class AlgorithmRegistry {
 public:
  void add(AlgorithmInfo info) {
    const std::string id = info.id;
    if (!info.execute && !info.index) throw ConfigError("algorithm '" + id + "' has neither execute nor index");
    algorithms_[id] = std::move(info);
  }

  [[nodiscard]] const AlgorithmInfo* find(const std::string& id) const {
    auto it = algorithms_.find(id);
    return it == algorithms_.end() ? nullptr : &it->second;
  }

  [[nodiscard]] const AlgorithmInfo& at(const std::string& id) const {
    const auto* a = find(id);
    if (!a) throw ConfigError("unknown algorithm '" + id + "'");
    return *a;
  }

  [[nodiscard]] std::vector<std::string> ids_for(PipelineKind pk, StageKind k) const {
    std::vector<std::string> out;
    for (const auto& [id, info] : algorithms_) {
      if (info.stage == k && (!info.only || *info.only == pk)) out.push_back(id);
    }
    return out;
  }

  [[nodiscard]] const std::map<std::string, AlgorithmInfo>& all() const { return algorithms_; }

 private:
  std::map<std::string, AlgorithmInfo> algorithms_;
};

/// Full hyper-parameters of a unit: defaults, overridden by `h`. Names the
/// algorithm does not know are rejected.
inline HyperparamAssignment resolve_hyperparams(const AlgorithmInfo& info, const HyperparamAssignment& h) {
  for (const auto& [name, value] : h.values()) {
    if (!info.defaults.has(name)) {
      throw ConfigError("algorithm '" + info.id + "' has no hyper-parameter '" + name + "'");
    }
  }
  return info.defaults.merged(h);
}

// ---- generic performance indexes -----------------------------------------

namespace detail {

inline const Environment& need_env(const StageContext& ctx) {
  if (!ctx.input.env) throw Error(to_string(ctx.kind) + ": no environment available");
  return *ctx.input.env;
}

inline const Dataset& need_dataset(const StageContext& ctx) {
  if (!ctx.input.dataset) throw Error(to_string(ctx.kind) + ": no dataset available");
  return *ctx.input.dataset;
}

inline ReturnKind return_kind_of(const IndexSpec& idx) {
  if (idx.id == "discounted_return") return ReturnKind::discounted;
  if (idx.id == "total_return") return ReturnKind::total;
  if (idx.id == "average_return") return ReturnKind::average;
  throw ConfigError("index '" + idx.id + "' is not a return index");
}

}  // namespace detail

/// Generic index for a stage kind. Every candidate gets private copies:
///   PG online:  train on rng.child(0), evaluate on rng.child(1);
///   PG offline: bootstrap the dataset with rng.child(0), train on
///               rng.child(1), evaluate on rng.child(2);
///   DG:         generate on rng.child(0), score the state-action entropy;
///   FE:         MI of the selected subset on the selection dataset.
inline Fitness generic_index(const AlgorithmInfo& info, const HyperparamAssignment& h, const StageContext& ctx,
                             const IndexSpec& idx, RngStream rng) {
  switch (ctx.kind) {
    case StageKind::PolicyGeneration: {
      const auto kind = detail::return_kind_of(idx);
      StageContext local = ctx;
      RngStream train = rng.child(0);
      RngStream eval = rng.child(1);
      if (ctx.pipeline == PipelineKind::offline) {
        RngStream boot = rng.child(0);
        local.input.dataset = std::make_shared<const Dataset>(dataset_bootstrap(detail::need_dataset(ctx), boot));
        train = rng.child(1);
        eval = rng.child(2);
      }
      const auto out = info.execute(h, local, train);
      if (!out.io.policy) throw Error(info.id + ": produced no policy");
      const auto est = evaluate_policy(detail::need_env(ctx), *out.io.policy, idx.n_episodes, kind, eval);
      return {est.mean, est.std, false, {}};
    }
    case StageKind::DataGeneration: {
      const auto out = info.execute(h, ctx, rng.child(0));
      const auto e = dataset_entropy(*out.io.dataset, idx.k);
      return {e.value, 0.0, false, {}};
    }
    case StageKind::FeatureEngineering: {
      const auto out = info.execute(h, ctx, rng.child(0));
      const Dataset& source = ctx.internal_dataset ? *ctx.internal_dataset : detail::need_dataset(ctx);
      const auto mi = feature_subset_mi(source, out.transform->selected, idx.k);
      return {mi.value, 0.0, false, {}};
    }
    default:
      throw ConfigError(to_string(ctx.kind) + " has no performance index");
  }
}

inline Fitness evaluate_index(const AlgorithmInfo& info, const HyperparamAssignment& h, const StageContext& ctx,
                              const IndexSpec& idx, RngStream rng) {
  if (info.index) return info.index(h, ctx, idx, std::move(rng));
  return generic_index(info, h, ctx, idx, std::move(rng));
}

// ---- built-in algorithms -------------------------------------------------

namespace detail {

inline StageIO with_policy(const StageContext& ctx, PolicyPtr policy) {
  StageIO io;
  io.env = ctx.input.env;
  io.policy = std::move(policy);
  return io;
}

inline FqiConfig fqi_config(const HyperparamAssignment& h, RegressorKind kind) {
  FqiConfig c;
  c.regressor = kind;
  c.n_iterations = h.get_count("n_iterations");
  c.grid_points = h.get_count("grid_points");
  if (kind == RegressorKind::knn) c.k = h.get_count("k");
  if (kind == RegressorKind::extra_trees) {
    c.n_estimators = h.get_count("n_estimators");
    c.min_samples_split = h.get_count("min_samples_split");
  }
  return c;
}

inline AlgorithmInfo fqi_algorithm(const std::string& id, RegressorKind kind, HyperparamAssignment defaults) {
  AlgorithmInfo a;
  a.id = id;
  a.stage = StageKind::PolicyGeneration;
  a.only = PipelineKind::offline;
  a.defaults = std::move(defaults);
  a.execute = [kind](const HyperparamAssignment& h, const StageContext& ctx, RngStream rng) {
    const auto& env = need_env(ctx);
    auto r = pg_fqi(need_dataset(ctx), fqi_config(h, kind), env.spec().gamma, env.spec().action_space, std::move(rng));
    return StageOutput{with_policy(ctx, r.policy), std::nullopt};
  };
  return a;
}

inline StageOutput feature_engineering(const HyperparamAssignment& h, const StageContext& ctx) {
  const bool online = ctx.pipeline == PipelineKind::online;
  const Dataset& source = online ? *ctx.internal_dataset : need_dataset(ctx);
  const auto n_features = h.get_count("n_features");
  const bool standardize = h.get_int("standardize") != 0;
  auto sel = fe_forward_mi_select(source, h.get_count("k"), n_features, standardize);
  StageOutput out;
  out.io.env = std::shared_ptr<const Environment>(fe_engineer_environment(need_env(ctx), sel.transform));
  if (!online) out.io.dataset = std::make_shared<const Dataset>(transform_dataset(source, sel.transform));
  out.transform = sel.transform;
  return out;
}

}  // namespace detail

inline AlgorithmRegistry builtin_registry() {
  AlgorithmRegistry r;
  using H = HyperparamAssignment;
  using detail::need_dataset;
  using detail::need_env;

  r.add({"random_uniform", StageKind::DataGeneration, std::nullopt, H{{"n_episodes", std::int64_t{50}}},
         [](const H& h, const StageContext& ctx, RngStream rng) {
           StageOutput out;
           out.io.env = ctx.input.env;
           out.io.dataset = std::make_shared<const Dataset>(
               dg_random_uniform(need_env(ctx), h.get_count("n_episodes"), std::move(rng)));
           return out;
         },
         {}});

  auto impute = [](Dataset (*fn)(const Dataset&)) {
    return [fn](const H&, const StageContext& ctx, RngStream) {
      StageOutput out;
      out.io.env = ctx.input.env;
      out.io.dataset = std::make_shared<const Dataset>(fn(need_dataset(ctx)));
      return out;
    };
  };
  r.add({"mean_impute", StageKind::DataPreparation, PipelineKind::offline, H{}, impute(&dp_mean_impute), {}});
  r.add({"knn1_impute", StageKind::DataPreparation, PipelineKind::offline, H{}, impute(&dp_1nn_impute), {}});

  r.add({"forward_mi", StageKind::FeatureEngineering, std::nullopt,
         H{{"k", std::int64_t{5}},
           {"n_features", std::int64_t{1}},
           {"standardize", std::int64_t{0}},
           {"internal_episodes", std::int64_t{50}}},
         [](const H& h, const StageContext& ctx, RngStream) { return detail::feature_engineering(h, ctx); },
         {}});

  r.add(detail::fqi_algorithm("fqi_tabular", RegressorKind::tabular_mean,
                              H{{"n_iterations", std::int64_t{20}}, {"grid_points", std::int64_t{8}}}));
  r.add(detail::fqi_algorithm(
      "fqi_knn", RegressorKind::knn,
      H{{"n_iterations", std::int64_t{20}}, {"k", std::int64_t{5}}, {"grid_points", std::int64_t{8}}}));
  r.add(detail::fqi_algorithm("fqi_extra_trees", RegressorKind::extra_trees,
                              H{{"n_iterations", std::int64_t{20}},
                                {"n_estimators", std::int64_t{50}},
                                {"min_samples_split", std::int64_t{5}},
                                {"grid_points", std::int64_t{8}}}));

  r.add({"lspi", StageKind::PolicyGeneration, PipelineKind::offline,
         H{{"n_iterations", std::int64_t{20}}, {"grid_points", std::int64_t{8}}},
         [](const H& h, const StageContext& ctx, RngStream) {
           const auto& env = need_env(ctx);
           const auto& spec = env.spec();
           auto res = pg_lspi(need_dataset(ctx), default_basis(spec.state_space, spec.action_space),
                              h.get_count("n_iterations"), spec.gamma, spec.action_space,
                              build_action_grid(spec.action_space, h.get_count("grid_points")));
           return StageOutput{detail::with_policy(ctx, res.policy), std::nullopt};
         },
         {}});

  r.add({"q_learning", StageKind::PolicyGeneration, PipelineKind::online,
         H{{"episodes", std::int64_t{500}}, {"alpha", 0.1}, {"epsilon", 0.2}},
         [](const H& h, const StageContext& ctx, RngStream rng) {
           auto res = pg_q_learning(need_env(ctx), h.get_count("episodes"), h.get_real("alpha"),
                                    h.get_real("epsilon"), std::move(rng));
           return StageOutput{detail::with_policy(ctx, res.policy), std::nullopt};
         },
         {}});

  const GpomdpConfig gd;
  r.add({"gpomdp", StageKind::PolicyGeneration, PipelineKind::online,
         H{{"learning_rate", gd.learning_rate},
           {"n_epochs", static_cast<std::int64_t>(gd.n_epochs)},
           {"n_episodes_per_fit", static_cast<std::int64_t>(gd.n_episodes_per_fit)},
           {"init_std", gd.init_std},
           {"baseline", std::string("none")}},
         [](const H& h, const StageContext& ctx, RngStream rng) {
           GpomdpConfig c;
           c.learning_rate = h.get_real("learning_rate");
           c.n_epochs = h.get_count("n_epochs");
           c.n_episodes_per_fit = h.get_count("n_episodes_per_fit");
           c.init_std = h.get_real("init_std");
           c.baseline = parse_baseline(h.get_string("baseline"));
           auto res = pg_gpomdp(need_env(ctx), c, std::move(rng));
           return StageOutput{detail::with_policy(ctx, res.policy), std::nullopt};
         },
         {}});

  r.add({"monte_carlo", StageKind::PolicyEvaluation, std::nullopt,
         H{{"n_episodes", std::int64_t{100}}, {"kind", std::string("discounted")}},
         [](const H& h, const StageContext& ctx, RngStream rng) {
           if (!ctx.input.policy) throw Error("PolicyEvaluation: no policy available");
           StageOutput out;
           out.io.env = ctx.input.env;
           out.io.evaluation = pe_monte_carlo(need_env(ctx), *ctx.input.policy, h.get_count("n_episodes"),
                                              parse_return_kind(h.get_string("kind")), std::move(rng));
           return out;
         },
         {}});
  return r;
}

inline const AlgorithmRegistry& default_registry() {
  static const AlgorithmRegistry r = builtin_registry();
  return r;
}

}  // namespace arlo
