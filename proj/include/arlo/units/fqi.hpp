#pragma once

#include <memory>
#include <string>
#include <vector>

#include "arlo/core/dataset.hpp"
#include "arlo/units/q_function.hpp"

namespace arlo {

enum class RegressorKind { tabular_mean, knn, extra_trees };

inline RegressorKind parse_regressor_kind(const std::string& s) {
  if (s == "tabular_mean") return RegressorKind::tabular_mean;
  if (s == "knn") return RegressorKind::knn;
  if (s == "extra_trees") return RegressorKind::extra_trees;
  throw ConfigError("unknown regressor '" + s + "'");
}

struct FqiConfig {
  std::size_t n_iterations = 20;
  RegressorKind regressor = RegressorKind::extra_trees;
  std::size_t k = 5;
  std::size_t n_estimators = 50;
  std::size_t min_samples_split = 5;
  std::size_t grid_points = 8;
  std::vector<Vector> action_grid;  ///< empty: built from the action space

  void validate() const {
    if (n_iterations < 1) throw ConfigError("fqi: n_iterations must be at least 1");
    if (regressor == RegressorKind::knn && k < 1) throw ConfigError("fqi: k must be at least 1");
    if (regressor == RegressorKind::extra_trees && (n_estimators < 1 || min_samples_split < 2)) {
      throw ConfigError("fqi: n_estimators >= 1 and min_samples_split >= 2 required");
    }
    if (grid_points < 1) throw ConfigError("fqi: grid_points must be at least 1");
  }
};

struct FqiResult {
  std::shared_ptr<const RegressorQFunction> q;
  std::vector<Vector> grid;
  PolicyPtr policy;
};

inline std::unique_ptr<Regressor> make_regressor(const FqiConfig& cfg, RngStream rng) {
  switch (cfg.regressor) {
    case RegressorKind::tabular_mean: return std::make_unique<TabularMeanRegressor>();
    case RegressorKind::knn: return std::make_unique<KnnRegressor>(cfg.k);
    case RegressorKind::extra_trees:
      return std::make_unique<ExtraTreesRegressor>(cfg.n_estimators, cfg.min_samples_split, std::move(rng));
  }
  throw ConfigError("fqi: unknown regressor");
}

/// Fitted Q-iteration. Q_0 = 0 and, for i = 1..n_iterations, Q_i is a fresh
/// regressor fitted on inputs [s; a] with targets
///   r + gamma * (1 - absorbing) * max_{a' in grid} Q_{i-1}(s', a').
/// The returned policy is greedy over the grid.
inline FqiResult pg_fqi(const Dataset& d, const FqiConfig& cfg, double gamma, const Space& action_space,
                        RngStream rng) {
  cfg.validate();
  if (d.empty()) throw InvalidArgument("fqi: empty dataset");
  auto grid = cfg.action_grid.empty() ? build_action_grid(action_space, cfg.grid_points) : cfg.action_grid;
  const auto n = static_cast<Eigen::Index>(d.size());
  const auto ds = static_cast<Eigen::Index>(d.state_dim());
  const auto da = static_cast<Eigen::Index>(d.action_dim());
  Matrix inputs(ds + da, n);
  Vector rewards(n), continuation(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& tr = d[static_cast<std::size_t>(j)];
    inputs.col(j).head(ds) = tr.state;
    inputs.col(j).tail(da) = tr.action;
    rewards[j] = tr.reward;
    continuation[j] = tr.absorbing ? 0.0 : gamma;
  }

  std::shared_ptr<const RegressorQFunction> q;
  Vector targets = rewards;
  for (std::size_t it = 1; it <= cfg.n_iterations; ++it) {
    if (q) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto& tr = d[static_cast<std::size_t>(j)];
        targets[j] = rewards[j] + (continuation[j] == 0.0 ? 0.0 : continuation[j] * greedy_value(*q, tr.next_state, grid));
      }
    }
    std::shared_ptr<Regressor> f = make_regressor(cfg, rng.child(it));
    try {
      f->fit(inputs, targets);
    } catch (const std::exception& e) {
      throw Error("fqi: regressor fit failed at iteration " + std::to_string(it) + ": " + e.what());
    }
    q = std::make_shared<RegressorQFunction>(std::move(f));
  }
  auto policy = std::make_shared<GridGreedyQPolicy>(q, grid, action_space);
  return {q, std::move(grid), std::move(policy)};
}

}  // namespace arlo
