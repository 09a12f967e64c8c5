#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "arlo/core/policy.hpp"
#include "arlo/units/regressors.hpp"

namespace arlo {

/// Candidate actions for greedy maximisation. Discrete spaces enumerate every
/// action; boxes use an evenly spaced grid with at most `points_per_dim`
/// points per dimension and at most `max_actions` combinations in total.
inline std::vector<Vector> build_action_grid(const Space& space, std::size_t points_per_dim = 8,
                                             std::size_t max_actions = 64) {
  std::vector<Vector> grid;
  if (space.is_discrete()) {
    for (std::size_t a = 0; a < space.n(); ++a) grid.push_back(Vector::Constant(1, static_cast<double>(a)));
    return grid;
  }
  if (points_per_dim < 1 || max_actions < 1) throw InvalidArgument("action grid: sizes must be positive");
  const std::size_t dim = space.dim();
  std::size_t per = points_per_dim;
  auto total = [&](std::size_t p) {
    double t = 1.0;
    for (std::size_t i = 0; i < dim; ++i) t *= static_cast<double>(p);
    return t;
  };
  while (per > 1 && total(per) > static_cast<double>(max_actions)) --per;
  std::vector<std::size_t> digit(dim, 0);
  const auto count = static_cast<std::size_t>(total(per));
  for (std::size_t c = 0; c < count; ++c) {
    Vector a(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      const auto e = static_cast<Eigen::Index>(i);
      a[e] = per == 1 ? 0.5 * (space.low()[e] + space.high()[e])
                      : space.low()[e] + (space.high()[e] - space.low()[e]) * static_cast<double>(digit[i]) /
                                             static_cast<double>(per - 1);
    }
    grid.push_back(std::move(a));
    for (std::size_t i = dim; i-- > 0;) {
      if (++digit[i] < per) break;
      digit[i] = 0;
    }
  }
  return grid;
}

inline Json action_grid_to_json(const std::vector<Vector>& grid) {
  Json j = Json::array();
  for (const auto& a : grid) j.push_back(vector_to_json(a));
  return j;
}

inline std::vector<Vector> action_grid_from_json(const Json& j) {
  std::vector<Vector> grid;
  for (const auto& a : j) grid.push_back(vector_from_json(a, "action grid"));
  if (grid.empty()) throw InvalidArgument("action grid must not be empty");
  return grid;
}

/// State-action value function.
class QFunction {
 public:
  virtual ~QFunction() = default;
  [[nodiscard]] virtual double value(const Vector& state, const Vector& action) const = 0;
  [[nodiscard]] virtual Json to_json() const = 0;
};

using QFunctionPtr = std::shared_ptr<const QFunction>;

/// Index of the best action in `grid`; ties go to the lowest index.
inline std::size_t greedy_index(const QFunction& q, const Vector& state, const std::vector<Vector>& grid) {
  std::size_t best = 0;
  double best_value = q.value(state, grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = q.value(state, grid[i]);
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return best;
}

inline double greedy_value(const QFunction& q, const Vector& state, const std::vector<Vector>& grid) {
  double best = q.value(state, grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) best = std::max(best, q.value(state, grid[i]));
  return best;
}

/// Q(s, a) = f([s; a]) for a fitted regressor f.
class RegressorQFunction final : public QFunction {
 public:
  explicit RegressorQFunction(std::shared_ptr<const Regressor> f) : f_(std::move(f)) {}
  [[nodiscard]] double value(const Vector& state, const Vector& action) const override {
    return f_->predict(concat(state, action));
  }
  [[nodiscard]] Json to_json() const override { return {{"type", "regressor"}, {"regressor", f_->to_json()}}; }
  [[nodiscard]] const Regressor& regressor() const { return *f_; }

 private:
  std::shared_ptr<const Regressor> f_;
};

/// Feature map for linear Q-functions.
///   one_hot: indicator of (s, a) for discrete spaces
///   poly2:   [1, z, z_i z_j for i <= j] with z = [s; a]
struct LinearBasis {
  enum class Kind { one_hot, poly2 };
  Kind kind = Kind::poly2;
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::size_t input_dim = 0;

  static LinearBasis one_hot(std::size_t n_states, std::size_t n_actions) {
    return {Kind::one_hot, n_states, n_actions, 2};
  }
  static LinearBasis poly2(std::size_t state_dim, std::size_t action_dim) {
    return {Kind::poly2, 0, 0, state_dim + action_dim};
  }

  [[nodiscard]] std::size_t size() const {
    if (kind == Kind::one_hot) return n_states * n_actions;
    return 1 + input_dim + input_dim * (input_dim + 1) / 2;
  }

  [[nodiscard]] Vector operator()(const Vector& state, const Vector& action) const {
    Vector phi = Vector::Zero(static_cast<Eigen::Index>(size()));
    if (kind == Kind::one_hot) {
      const double s = state[0], a = action[0];
      if (!(s >= 0 && a >= 0 && s < static_cast<double>(n_states) && a < static_cast<double>(n_actions)) ||
          s != std::floor(s) || a != std::floor(a)) {
        throw InvalidArgument("one-hot basis: state or action index out of range");
      }
      phi[static_cast<Eigen::Index>(static_cast<std::size_t>(s) * n_actions + static_cast<std::size_t>(a))] = 1.0;
      return phi;
    }
    const Vector z = concat(state, action);
    if (static_cast<std::size_t>(z.size()) != input_dim) throw InvalidArgument("poly2 basis: dimension mismatch");
    Eigen::Index k = 0;
    phi[k++] = 1.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) phi[k++] = z[i];
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      for (Eigen::Index j = i; j < z.size(); ++j) phi[k++] = z[i] * z[j];
    }
    return phi;
  }

  [[nodiscard]] Json to_json() const {
    if (kind == Kind::one_hot) return {{"kind", "one_hot"}, {"n_states", n_states}, {"n_actions", n_actions}};
    return {{"kind", "poly2"}, {"input_dim", input_dim}};
  }

  static LinearBasis from_json(const Json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "one_hot") return one_hot(j.at("n_states").get<std::size_t>(), j.at("n_actions").get<std::size_t>());
    if (kind == "poly2") return {Kind::poly2, 0, 0, j.at("input_dim").get<std::size_t>()};
    throw InvalidArgument("unknown basis kind '" + kind + "'");
  }
};

class LinearQFunction final : public QFunction {
 public:
  LinearQFunction(LinearBasis basis, Vector weights) : basis_(std::move(basis)), w_(std::move(weights)) {
    if (static_cast<std::size_t>(w_.size()) != basis_.size()) throw InvalidArgument("linear Q: weight size mismatch");
  }
  [[nodiscard]] double value(const Vector& state, const Vector& action) const override {
    return basis_(state, action).dot(w_);
  }
  [[nodiscard]] Json to_json() const override {
    return {{"type", "linear"}, {"basis", basis_.to_json()}, {"weights", vector_to_json(w_)}};
  }
  [[nodiscard]] const Vector& weights() const { return w_; }
  [[nodiscard]] const LinearBasis& basis() const { return basis_; }

 private:
  LinearBasis basis_;
  Vector w_;
};

inline QFunctionPtr q_function_from_json(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "regressor") {
    return std::make_shared<RegressorQFunction>(std::shared_ptr<const Regressor>(regressor_from_json(j.at("regressor"))));
  }
  if (type == "linear") {
    return std::make_shared<LinearQFunction>(LinearBasis::from_json(j.at("basis")),
                                             vector_from_json(j.at("weights"), "linear Q weights"));
  }
  throw InvalidArgument("unknown Q-function type '" + type + "'");
}

/// Deterministic greedy policy over a finite action grid.
class GridGreedyQPolicy final : public Policy {
 public:
  GridGreedyQPolicy(QFunctionPtr q, std::vector<Vector> grid, Space action_space)
      : q_(std::move(q)), grid_(std::move(grid)), space_(std::move(action_space)) {
    if (grid_.empty()) throw InvalidArgument("greedy policy: empty action grid");
    for (const auto& a : grid_) {
      if (!space_.contains(a)) throw InvalidArgument("greedy policy: grid action outside the action space");
    }
  }
  Vector act(const Vector& state, std::size_t, RngStream&) const override {
    return grid_[greedy_index(*q_, state, grid_)];
  }
  bool deterministic() const override { return true; }
  const Space& action_space() const override { return space_; }
  [[nodiscard]] const QFunction& q() const { return *q_; }
  [[nodiscard]] const std::vector<Vector>& grid() const { return grid_; }
  Json to_json() const override {
    return {{"class", "grid_greedy_q"},
            {"action_space", space_.to_json()},
            {"parameters", {{"q", q_->to_json()}}},
            {"action_grid", action_grid_to_json(grid_)}};
  }

 private:
  QFunctionPtr q_;
  std::vector<Vector> grid_;
  Space space_;
};

}  // namespace arlo
