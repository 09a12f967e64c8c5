#pragma once

#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "arlo/metrics/knn.hpp"

namespace arlo {

struct EntropyEstimate {
  double value = 0.0;  ///< nats
  std::size_t k = 0;
  std::size_t n_samples = 0;
};

/// Kozachenko-Leonenko k-NN differential entropy estimate:
///   H = (d/n) sum_i ln rho_k(i) + ln V_d + psi(n) - psi(k)
/// with rho_k(i) the Euclidean distance to the k-th neighbour of point i.
/// Distances are floored at 1e-12. The log terms are summed in sorted order
/// so the result does not depend on the order of the points.
inline EntropyEstimate knn_entropy(std::span<const Vector> points, std::size_t k) {
  const auto m = detail::pack_points(points, "knn_entropy");
  if (k < 1) throw InvalidArgument("knn_entropy: k must be at least 1");
  if (m.n <= k) throw InvalidArgument("knn_entropy: need more than k samples");
  if (m.dim == 0) throw InvalidArgument("knn_entropy: points have dimension 0");

  std::vector<double> radius(m.n);
  std::vector<double> dist(m.n - 1);
  for (std::size_t i = 0; i < m.n; ++i) {
    const double* xi = m.row(i);
    std::size_t c = 0;
    for (std::size_t j = 0; j < m.n; ++j) {
      if (j == i) continue;
      const double* xj = m.row(j);
      double sq = 0.0;
      for (std::size_t d = 0; d < m.dim; ++d) {
        const double diff = xi[d] - xj[d];
        sq += diff * diff;
      }
      dist[c++] = sq;
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    radius[i] = std::max(std::sqrt(dist[k - 1]), 1e-12);
  }
  std::sort(radius.begin(), radius.end());
  double log_sum = 0.0;
  for (double r : radius) log_sum += std::log(r);

  const double d = static_cast<double>(m.dim);
  const double n = static_cast<double>(m.n);
  const double log_unit_ball = 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0);
  const double value = d * log_sum / n + log_unit_ball + boost::math::digamma(n) -
                       boost::math::digamma(static_cast<double>(k));
  return {value, k, m.n};
}

}  // namespace arlo
