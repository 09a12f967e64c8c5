#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "arlo/envs/environment.hpp"
#include "arlo/metrics/mutual_information.hpp"

namespace arlo {

/// Observation map: keep `selected` state coordinates (in that order), then
/// optionally z-score them. Rewards pass through unchanged.
struct FeatureTransform {
  std::vector<std::size_t> selected;
  std::optional<Vector> mean;  ///< set together with `scale`
  std::optional<Vector> scale;

  static FeatureTransform identity(std::size_t state_dim) {
    FeatureTransform t;
    for (std::size_t i = 0; i < state_dim; ++i) t.selected.push_back(i);
    return t;
  }

  [[nodiscard]] bool standardized() const { return mean.has_value(); }
  [[nodiscard]] std::size_t output_dim() const { return selected.size(); }

  void validate(std::size_t state_dim) const {
    if (selected.empty()) throw InvalidArgument("feature transform: no features selected");
    std::set<std::size_t> seen;
    for (auto i : selected) {
      if (i >= state_dim) throw InvalidArgument("feature transform: feature index out of range");
      if (!seen.insert(i).second) throw InvalidArgument("feature transform: duplicate feature index");
    }
    if (mean.has_value() != scale.has_value()) throw InvalidArgument("feature transform: incomplete standardization");
    if (mean && (static_cast<std::size_t>(mean->size()) != selected.size() ||
                 static_cast<std::size_t>(scale->size()) != selected.size() || (scale->array() <= 0.0).any())) {
      throw InvalidArgument("feature transform: bad standardization statistics");
    }
  }

  [[nodiscard]] Vector apply(const Vector& s) const {
    Vector out(static_cast<Eigen::Index>(selected.size()));
    for (std::size_t i = 0; i < selected.size(); ++i) {
      out[static_cast<Eigen::Index>(i)] = s[static_cast<Eigen::Index>(selected[i])];
    }
    if (mean) out = ((out - *mean).array() / scale->array()).matrix();
    return out;
  }

  [[nodiscard]] Space apply(const Space& space) const {
    validate(space.dim());
    if (space.is_discrete()) {
      if (standardized()) throw InvalidArgument("feature transform: cannot standardize a discrete state");
      return space;
    }
    Vector lo = apply(space.low());
    Vector hi = apply(space.high());
    return Space::box(lo.cwiseMin(hi), lo.cwiseMax(hi));
  }

  [[nodiscard]] Json to_json() const {
    Json j{{"selected", selected}, {"reward_shape", "identity"}};
    if (mean) j["standardization"] = {{"mean", vector_to_json(*mean)}, {"std", vector_to_json(*scale)}};
    return j;
  }

  static FeatureTransform from_json(const Json& j) {
    FeatureTransform t;
    t.selected = j.at("selected").get<std::vector<std::size_t>>();
    if (j.contains("standardization")) {
      t.mean = vector_from_json(j["standardization"].at("mean"), "standardization mean");
      t.scale = vector_from_json(j["standardization"].at("std"), "standardization std");
    }
    return t;
  }
};

/// Adds z-score statistics of the selected coordinates, computed over the
/// dataset states. Constant coordinates get scale 1.
inline FeatureTransform with_standardization(FeatureTransform t, const Dataset& d) {
  const auto k = static_cast<Eigen::Index>(t.selected.size());
  Vector sum = Vector::Zero(k), sq = Vector::Zero(k);
  for (const auto& tr : d.transitions()) {
    for (Eigen::Index i = 0; i < k; ++i) {
      const double v = tr.state[static_cast<Eigen::Index>(t.selected[static_cast<std::size_t>(i)])];
      sum[i] += v;
      sq[i] += v * v;
    }
  }
  const double n = static_cast<double>(d.size());
  Vector mean = sum / n;
  Vector scale(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double var = std::max(sq[i] / n - mean[i] * mean[i], 0.0);
    scale[i] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  t.mean = mean;
  t.scale = scale;
  return t;
}

inline Dataset transform_dataset(const Dataset& d, const FeatureTransform& t) {
  t.validate(d.state_dim());
  std::vector<Transition> out;
  out.reserve(d.size());
  for (const auto& tr : d.transitions()) {
    Transition x = tr;
    x.state = t.apply(tr.state);
    x.next_state = t.apply(tr.next_state);
    out.push_back(std::move(x));
  }
  return Dataset(std::move(out));
}

/// Environment seen through a feature transform. Dynamics and rewards are
/// those of the wrapped environment.
class EngineeredEnvironment final : public Environment {
 public:
  EngineeredEnvironment(const Environment& inner, FeatureTransform t) : inner_(inner.clone()), t_(std::move(t)) {
    spec_ = inner_->spec();
    spec_.state_space = t_.apply(spec_.state_space);
  }
  EngineeredEnvironment(const EngineeredEnvironment& o) : Environment(o), inner_(o.inner_->clone()), t_(o.t_), spec_(o.spec_) {}

  const MdpSpec& spec() const override { return spec_; }
  std::string name() const override { return "engineered(" + inner_->name() + ")"; }
  Vector reset() override { return t_.apply(inner_->reset()); }
  StepResult step(const Vector& action) override {
    auto r = inner_->step(action);
    r.state = t_.apply(r.state);
    return r;
  }
  [[nodiscard]] std::unique_ptr<Environment> clone() const override {
    return std::make_unique<EngineeredEnvironment>(*this);
  }
  void seed(RngStream rng) override {
    inner_->seed(rng);
    Environment::seed(std::move(rng));
  }
  [[nodiscard]] const FeatureTransform& transform() const { return t_; }
  [[nodiscard]] const Environment& inner() const { return *inner_; }

 private:
  EnvPtr inner_;
  FeatureTransform t_;
  MdpSpec spec_;
};

inline EnvPtr fe_engineer_environment(const Environment& env, const FeatureTransform& t) {
  return std::make_unique<EngineeredEnvironment>(env, t);
}

namespace detail {

inline void zscore_columns(std::vector<Vector>& pts) {
  if (pts.empty()) return;
  const auto dim = pts.front().size();
  const double n = static_cast<double>(pts.size());
  for (Eigen::Index c = 0; c < dim; ++c) {
    double sum = 0.0, sq = 0.0;
    for (const auto& p : pts) sum += p[c];
    const double mean = sum / n;
    for (const auto& p : pts) sq += (p[c] - mean) * (p[c] - mean);
    const double sd = std::sqrt(sq / n);
    const double scale = sd > 0.0 ? sd : 1.0;
    for (auto& p : pts) p[c] = (p[c] - mean) / scale;
  }
}

}  // namespace detail

/// MI between [s_subset, a] and [s'_subset, r] over the dataset, each column
/// z-scored before estimation.
inline MiEstimate feature_subset_mi(const Dataset& d, std::span<const std::size_t> subset, std::size_t k) {
  if (subset.empty()) throw InvalidArgument("feature_subset_mi: empty subset");
  const auto ns = static_cast<Eigen::Index>(subset.size());
  const auto da = static_cast<Eigen::Index>(d.action_dim());
  std::vector<Vector> x, y;
  x.reserve(d.size());
  y.reserve(d.size());
  for (const auto& tr : d.transitions()) {
    Vector xi(ns + da), yi(ns + 1);
    for (Eigen::Index i = 0; i < ns; ++i) {
      const auto f = static_cast<Eigen::Index>(subset[static_cast<std::size_t>(i)]);
      if (f >= tr.state.size()) throw InvalidArgument("feature_subset_mi: feature index out of range");
      xi[i] = tr.state[f];
      yi[i] = tr.next_state[f];
    }
    xi.tail(da) = tr.action;
    yi[ns] = tr.reward;
    x.push_back(std::move(xi));
    y.push_back(std::move(yi));
  }
  detail::zscore_columns(x);
  detail::zscore_columns(y);
  return knn_mutual_information(x, y, k);
}

struct FeatureSelection {
  FeatureTransform transform;
  std::vector<double> step_scores;  ///< MI after each greedy addition
  MiEstimate final_mi;
};

/// Greedy forward selection: starting from the empty set, repeatedly add the
/// feature whose inclusion maximises feature_subset_mi (ties: lowest index)
/// until `n_features` are chosen.
inline FeatureSelection fe_forward_mi_select(const Dataset& d, std::size_t k, std::size_t n_features,
                                             bool standardize = false) {
  const std::size_t dim = d.state_dim();
  if (n_features < 1 || n_features > dim) throw InvalidArgument("forward selection: n_features must lie in [1, state dim]");
  FeatureSelection out;
  std::vector<std::size_t> chosen;
  std::vector<bool> used(dim, false);
  while (chosen.size() < n_features) {
    std::size_t best = dim;
    MiEstimate best_mi;
    for (std::size_t f = 0; f < dim; ++f) {
      if (used[f]) continue;
      auto trial = chosen;
      trial.push_back(f);
      const auto mi = feature_subset_mi(d, trial, k);
      if (best == dim || mi.value > best_mi.value) {
        best = f;
        best_mi = mi;
      }
    }
    chosen.push_back(best);
    used[best] = true;
    out.step_scores.push_back(best_mi.value);
    out.final_mi = best_mi;
  }
  out.transform.selected = chosen;
  if (standardize) out.transform = with_standardization(out.transform, d);
  return out;
}

}  // namespace arlo
