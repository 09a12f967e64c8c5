#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "arlo/core/dataset.hpp"

namespace arlo {

// Missing values are NaN. A transition is viewed as the row
// [s, a, r, s_next]; imputation works column-wise on that layout.
namespace detail {

struct RowLayout {
  Eigen::Index ds = 0, da = 0;
  [[nodiscard]] Eigen::Index width() const { return 2 * ds + da + 1; }

  [[nodiscard]] Vector row(const Transition& t) const {
    Vector v(width());
    v << t.state, t.action, t.reward, t.next_state;
    return v;
  }

  [[nodiscard]] Transition transition(const Vector& v, const Transition& like) const {
    Transition t = like;
    t.state = v.head(ds);
    t.action = v.segment(ds, da);
    t.reward = v[ds + da];
    t.next_state = v.tail(ds);
    return t;
  }

  [[nodiscard]] std::string column_name(Eigen::Index c) const {
    if (c < ds) return "s[" + std::to_string(c) + "]";
    if (c < ds + da) return "a[" + std::to_string(c - ds) + "]";
    if (c == ds + da) return "r";
    return "s_next[" + std::to_string(c - ds - da - 1) + "]";
  }
};

inline RowLayout layout_of(const Dataset& d) {
  return {static_cast<Eigen::Index>(d.state_dim()), static_cast<Eigen::Index>(d.action_dim())};
}

inline Dataset rebuild(const Dataset& d, const std::vector<Vector>& rows, const RowLayout& L) {
  std::vector<Transition> out;
  out.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out.push_back(L.transition(rows[i], d[i]));
  return Dataset(std::move(out));
}

}  // namespace detail

inline bool has_missing(const Dataset& d) {
  for (const auto& t : d.transitions()) {
    if (t.state.hasNaN() || t.action.hasNaN() || std::isnan(t.reward) || t.next_state.hasNaN()) return true;
  }
  return false;
}

/// Replaces each missing entry by the mean of the observed values of its column.
inline Dataset dp_mean_impute(const Dataset& d) {
  if (!has_missing(d)) return d;
  const auto L = detail::layout_of(d);
  std::vector<Vector> rows;
  rows.reserve(d.size());
  for (const auto& t : d.transitions()) rows.push_back(L.row(t));
  for (Eigen::Index c = 0; c < L.width(); ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    bool missing = false;
    for (const auto& r : rows) {
      if (std::isnan(r[c])) {
        missing = true;
      } else {
        sum += r[c];
        ++count;
      }
    }
    if (!missing) continue;
    if (count == 0) throw InvalidArgument("mean imputation: column " + L.column_name(c) + " has no observed value");
    const double mean = sum / static_cast<double>(count);
    for (auto& r : rows) {
      if (std::isnan(r[c])) r[c] = mean;
    }
  }
  return detail::rebuild(d, rows, L);
}

/// Copies the missing entries of each incomplete row from the nearest complete
/// row, measured on the coordinates the incomplete row observes (Euclidean).
/// Ties go to the lowest row index.
inline Dataset dp_1nn_impute(const Dataset& d) {
  if (!has_missing(d)) return d;
  const auto L = detail::layout_of(d);
  std::vector<Vector> rows;
  rows.reserve(d.size());
  for (const auto& t : d.transitions()) rows.push_back(L.row(t));
  std::vector<std::size_t> donors;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].hasNaN()) donors.push_back(i);
  }
  if (donors.empty()) throw InvalidArgument("1-NN imputation: no complete row to copy from");
  auto out = rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].hasNaN()) continue;
    std::size_t best = donors[0];
    double best_d = std::numeric_limits<double>::infinity();
    for (auto j : donors) {
      double dist = 0.0;
      for (Eigen::Index c = 0; c < L.width(); ++c) {
        if (!std::isnan(rows[i][c])) dist += (rows[i][c] - rows[j][c]) * (rows[i][c] - rows[j][c]);
      }
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    for (Eigen::Index c = 0; c < L.width(); ++c) {
      if (std::isnan(out[i][c])) out[i][c] = rows[best][c];
    }
  }
  return detail::rebuild(d, out, L);
}

}  // namespace arlo
