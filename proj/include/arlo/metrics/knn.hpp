#pragma once

#include <span>
#include <vector>

#include "arlo/core/error.hpp"
#include "arlo/core/types.hpp"

namespace arlo::detail {

/// Row-major copy of equally sized points.
struct PointMatrix {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  [[nodiscard]] const double* row(std::size_t i) const { return data.data() + i * dim; }
};

inline PointMatrix pack_points(std::span<const Vector> points, const char* what) {
  PointMatrix m;
  m.n = points.size();
  m.dim = points.empty() ? 0 : static_cast<std::size_t>(points.front().size());
  m.data.resize(m.n * m.dim);
  for (std::size_t i = 0; i < m.n; ++i) {
    if (static_cast<std::size_t>(points[i].size()) != m.dim) {
      throw InvalidArgument(std::string(what) + ": points have different dimensions");
    }
    for (std::size_t d = 0; d < m.dim; ++d) m.data[i * m.dim + d] = points[i][static_cast<Eigen::Index>(d)];
  }
  return m;
}

inline bool all_rows_equal(const PointMatrix& m) {
  for (std::size_t i = 1; i < m.n; ++i) {
    for (std::size_t d = 0; d < m.dim; ++d) {
      if (m.data[i * m.dim + d] != m.data[d]) return false;
    }
  }
  return true;
}

}  // namespace arlo::detail
