#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "arlo/core/error.hpp"
#include "arlo/core/json_util.hpp"
#include "arlo/core/rng.hpp"

namespace arlo {

/// Scalar regressor over real inputs. Training inputs are the columns of a
/// d x n matrix.
class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual void fit(const Matrix& inputs, const Vector& targets) = 0;
  [[nodiscard]] virtual double predict(const Vector& x) const = 0;
  [[nodiscard]] virtual Json to_json() const = 0;
};

using RegressorPtr = std::shared_ptr<const Regressor>;

namespace detail {
inline void check_training_set(const Matrix& inputs, const Vector& targets, const char* what) {
  if (inputs.cols() == 0) throw InvalidArgument(std::string(what) + ": empty training set");
  if (inputs.cols() != targets.size()) throw InvalidArgument(std::string(what) + ": inputs and targets differ in size");
}
}  // namespace detail

/// Mean target per distinct input vector; unseen inputs predict 0.
class TabularMeanRegressor final : public Regressor {
 public:
  void fit(const Matrix& inputs, const Vector& targets) override {
    detail::check_training_set(inputs, targets, "tabular regressor");
    std::map<std::vector<double>, std::pair<double, std::size_t>> acc;
    for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
      auto& cell = acc[key(inputs.col(j))];
      cell.first += targets[j];
      ++cell.second;
    }
    table_.clear();
    for (const auto& [k, v] : acc) table_[k] = v.first / static_cast<double>(v.second);
  }

  [[nodiscard]] double predict(const Vector& x) const override {
    auto it = table_.find(key(x));
    return it == table_.end() ? 0.0 : it->second;
  }

  [[nodiscard]] Json to_json() const override {
    Json cells = Json::array();
    for (const auto& [k, v] : table_) cells.push_back({{"x", k}, {"y", v}});
    return {{"type", "tabular_mean"}, {"cells", cells}};
  }

  static std::unique_ptr<TabularMeanRegressor> from_json(const Json& j) {
    auto r = std::make_unique<TabularMeanRegressor>();
    for (const auto& c : j.at("cells")) r->table_[c.at("x").get<std::vector<double>>()] = c.at("y").get<double>();
    return r;
  }

  [[nodiscard]] std::size_t n_cells() const { return table_.size(); }

 private:
  static std::vector<double> key(const Eigen::Ref<const Vector>& x) { return {x.data(), x.data() + x.size()}; }
  std::map<std::vector<double>, double> table_;
};

/// Brute-force k-nearest-neighbour mean under the Euclidean distance. Ties in
/// distance keep the lower training index.
class KnnRegressor final : public Regressor {
 public:
  explicit KnnRegressor(std::size_t k) : k_(k) {
    if (k_ < 1) throw InvalidArgument("knn regressor: k must be at least 1");
  }

  void fit(const Matrix& inputs, const Vector& targets) override {
    detail::check_training_set(inputs, targets, "knn regressor");
    inputs_ = inputs;
    targets_ = targets;
  }

  [[nodiscard]] double predict(const Vector& x) const override {
    const auto n = static_cast<std::size_t>(inputs_.cols());
    if (n == 0) throw Error("knn regressor: predict before fit");
    const std::size_t k = std::min(k_, n);
    std::vector<std::pair<double, std::size_t>> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = {(inputs_.col(static_cast<Eigen::Index>(j)) - x).squaredNorm(), j};
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += targets_[static_cast<Eigen::Index>(d[i].second)];
    return sum / static_cast<double>(k);
  }

  [[nodiscard]] Json to_json() const override {
    return {{"type", "knn"}, {"k", k_}, {"inputs", matrix_to_json(inputs_)}, {"targets", vector_to_json(targets_)}};
  }

  static std::unique_ptr<KnnRegressor> from_json(const Json& j) {
    auto r = std::make_unique<KnnRegressor>(j.at("k").get<std::size_t>());
    r->inputs_ = matrix_from_json(j.at("inputs"), "knn inputs");
    r->targets_ = vector_from_json(j.at("targets"), "knn targets");
    return r;
  }


 private:
  std::size_t k_;
  Matrix inputs_;
  Vector targets_;
};

/// Forest of totally randomized trees: each split takes a uniformly chosen
/// non-constant feature and a uniform threshold strictly between the node's
/// minimum and maximum of that feature. Nodes with fewer than
/// `min_samples_split` samples, constant targets or constant inputs become
/// leaves predicting the mean target. Depth is unlimited.
class ExtraTreesRegressor final : public Regressor {
 public:
  ExtraTreesRegressor(std::size_t n_estimators, std::size_t min_samples_split, RngStream rng)
      : n_estimators_(n_estimators), min_samples_split_(min_samples_split), rng_(std::move(rng)) {
    if (n_estimators_ < 1) throw InvalidArgument("extra trees: n_estimators must be at least 1");
    if (min_samples_split_ < 2) throw InvalidArgument("extra trees: min_samples_split must be at least 2");
  }

  void fit(const Matrix& inputs, const Vector& targets) override {
    detail::check_training_set(inputs, targets, "extra trees");
    trees_.assign(n_estimators_, Tree{});
    for (std::size_t t = 0; t < n_estimators_; ++t) {
      RngStream r = rng_.child(t);
      build(trees_[t], inputs, targets, r);
    }
  }

  [[nodiscard]] double predict(const Vector& x) const override {
    if (trees_.empty()) throw Error("extra trees: predict before fit");
    double sum = 0.0;
    for (const auto& tree : trees_) {
      std::size_t i = 0;
      while (tree.feature[i] >= 0) {
        i = x[tree.feature[i]] < tree.value[i] ? static_cast<std::size_t>(tree.left[i])
                                               : static_cast<std::size_t>(tree.right[i]);
      }
      sum += tree.value[i];
    }
    return sum / static_cast<double>(trees_.size());
  }

  [[nodiscard]] Json to_json() const override {
    Json trees = Json::array();
    for (const auto& t : trees_) {
      trees.push_back({{"feature", t.feature}, {"value", t.value}, {"left", t.left}, {"right", t.right}});
    }
    return {{"type", "extra_trees"},
            {"n_estimators", n_estimators_},
            {"min_samples_split", min_samples_split_},
            {"trees", trees}};
  }

  static std::unique_ptr<ExtraTreesRegressor> from_json(const Json& j) {
    auto r = std::make_unique<ExtraTreesRegressor>(j.at("n_estimators").get<std::size_t>(),
                                                   j.at("min_samples_split").get<std::size_t>(), RngStream(0));
    for (const auto& jt : j.at("trees")) {
      Tree t;
      t.feature = jt.at("feature").get<std::vector<Eigen::Index>>();
      t.value = jt.at("value").get<std::vector<double>>();
      t.left = jt.at("left").get<std::vector<std::int64_t>>();
      t.right = jt.at("right").get<std::vector<std::int64_t>>();
      r->trees_.push_back(std::move(t));
    }
    return r;
  }


 private:
  // Node i is a leaf iff feature[i] < 0; value holds the threshold of inner
  // nodes and the prediction of leaves.
  struct Tree {
    std::vector<Eigen::Index> feature;
    std::vector<double> value;
    std::vector<std::int64_t> left;
    std::vector<std::int64_t> right;
  };

  void build(Tree& tree, const Matrix& X, const Vector& y, RngStream& rng) const {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(X.cols()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    struct Task {
      std::size_t node, begin, end;
    };
    std::vector<Task> stack;
    tree.feature.push_back(-1);
    tree.value.push_back(0.0);
    tree.left.push_back(-1);
    tree.right.push_back(-1);
    stack.push_back({0, 0, idx.size()});
    std::vector<Eigen::Index> candidates;
    std::vector<double> lo(static_cast<std::size_t>(X.rows())), hi(static_cast<std::size_t>(X.rows()));
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      const std::size_t count = task.end - task.begin;
      double sum = 0.0;
      double y_min = y[idx[task.begin]], y_max = y_min;
      for (std::size_t i = task.begin; i < task.end; ++i) {
        sum += y[idx[i]];
        y_min = std::min(y_min, y[idx[i]]);
        y_max = std::max(y_max, y[idx[i]]);
      }
      tree.value[task.node] = sum / static_cast<double>(count);
      if (count < min_samples_split_ || y_min == y_max) continue;

      candidates.clear();
      for (Eigen::Index f = 0; f < X.rows(); ++f) {
        double a = X(f, idx[task.begin]), b = a;
        for (std::size_t i = task.begin + 1; i < task.end; ++i) {
          a = std::min(a, X(f, idx[i]));
          b = std::max(b, X(f, idx[i]));
        }
        lo[static_cast<std::size_t>(f)] = a;
        hi[static_cast<std::size_t>(f)] = b;
        if (a < b) candidates.push_back(f);
      }
      if (candidates.empty()) continue;
      const Eigen::Index f = candidates[rng.index(candidates.size())];
      const double a = lo[static_cast<std::size_t>(f)], b = hi[static_cast<std::size_t>(f)];
      double threshold = a;
      while (!(threshold > a && threshold <= b)) threshold = a + (b - a) * rng.uniform();

      auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(task.begin),
                                idx.begin() + static_cast<std::ptrdiff_t>(task.end),
                                [&](Eigen::Index j) { return X(f, j) < threshold; });
      const auto split = static_cast<std::size_t>(mid - idx.begin());
      const auto left = static_cast<std::int64_t>(tree.feature.size());
      for (int c = 0; c < 2; ++c) {
        tree.feature.push_back(-1);
        tree.value.push_back(0.0);
        tree.left.push_back(-1);
        tree.right.push_back(-1);
      }
      tree.feature[task.node] = f;
      tree.value[task.node] = threshold;
      tree.left[task.node] = left;
      tree.right[task.node] = left + 1;
      stack.push_back({static_cast<std::size_t>(left + 1), split, task.end});
      stack.push_back({static_cast<std::size_t>(left), task.begin, split});
    }
  }

  std::size_t n_estimators_;
  std::size_t min_samples_split_;
  RngStream rng_;
  std::vector<Tree> trees_;
};

inline std::unique_ptr<Regressor> regressor_from_json(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "tabular_mean") return TabularMeanRegressor::from_json(j);
  if (type == "knn") return KnnRegressor::from_json(j);
  if (type == "extra_trees") return ExtraTreesRegressor::from_json(j);
  throw InvalidArgument("unknown regressor type '" + type + "'");
}

}  // namespace arlo
