#pragma once

#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "arlo/metrics/knn.hpp"

namespace arlo {

struct MiEstimate {
  double value = 0.0;  ///< max(raw, 0), nats
  double raw = 0.0;
  std::size_t k = 0;
  bool degenerate = false;  ///< a marginal was constant
};

/// Kraskov-Stoegbauer-Grassberger estimator (algorithm 1) with the max-norm
/// on the joint space:
///   I = psi(k) + psi(n) - < psi(n_x + 1) + psi(n_y + 1) >
/// n_x(i), n_y(i) count marginal neighbours strictly inside the distance to
/// the k-th joint neighbour. Neighbour counts are accumulated in a histogram
/// before summation, so the estimate is exactly symmetric in (x, y) and
/// invariant to joint permutations of the samples.
inline MiEstimate knn_mutual_information(std::span<const Vector> x, std::span<const Vector> y, std::size_t k) {
  if (x.size() != y.size()) throw InvalidArgument("knn_mutual_information: x and y differ in length");
  const auto mx = detail::pack_points(x, "knn_mutual_information");
  const auto my = detail::pack_points(y, "knn_mutual_information");
  if (k < 1) throw InvalidArgument("knn_mutual_information: k must be at least 1");
  if (mx.n <= k) throw InvalidArgument("knn_mutual_information: need more than k samples");
  if (mx.dim == 0 || my.dim == 0) throw InvalidArgument("knn_mutual_information: empty dimension");

  if (detail::all_rows_equal(mx) || detail::all_rows_equal(my)) return {0.0, 0.0, k, true};

  const std::size_t n = mx.n;
  std::vector<double> dx(n), dy(n), joint(n - 1);
  std::map<std::size_t, std::size_t> histogram;
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = mx.row(i);
    const double* yi = my.row(i);
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double ax = 0.0;
      const double* xj = mx.row(j);
      for (std::size_t d = 0; d < mx.dim; ++d) ax = std::max(ax, std::abs(xi[d] - xj[d]));
      double ay = 0.0;
      const double* yj = my.row(j);
      for (std::size_t d = 0; d < my.dim; ++d) ay = std::max(ay, std::abs(yi[d] - yj[d]));
      dx[j] = ax;
      dy[j] = ay;
      if (j != i) joint[c++] = std::max(ax, ay);
    }
    std::nth_element(joint.begin(), joint.begin() + static_cast<std::ptrdiff_t>(k - 1), joint.end());
    const double eps = joint[k - 1];
    std::size_t nx = 0, ny = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      nx += dx[j] < eps;
      ny += dy[j] < eps;
    }
    ++histogram[nx];
    ++histogram[ny];
  }
  double marginal = 0.0;
  for (const auto& [count, times] : histogram) {
    marginal += static_cast<double>(times) * boost::math::digamma(static_cast<double>(count) + 1.0);
  }
  const double raw = boost::math::digamma(static_cast<double>(k)) + boost::math::digamma(static_cast<double>(n)) -
                     marginal / static_cast<double>(n);
  return {std::max(raw, 0.0), raw, k, false};
}

}  // namespace arlo
