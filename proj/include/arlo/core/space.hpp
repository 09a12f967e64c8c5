#pragma once

#include <cmath>
#include <string>

#include "arlo/core/error.hpp"
#include "arlo/core/json_util.hpp"
#include "arlo/core/rng.hpp"
#include "arlo/core/types.hpp"

namespace arlo {

/// State or action space: either `discrete(n)` (one integer-valued coordinate
/// in [0, n)) or an axis-aligned `box(low, high)`.
class Space {
 public:
  enum class Kind { discrete, box };

  Space() = default;

  static Space discrete(std::size_t n) {
    if (n < 1) throw InvalidArgument("discrete space needs n >= 1");
    Space s;
    s.kind_ = Kind::discrete;
    s.n_ = n;
    s.low_ = Vector::Zero(1);
    s.high_ = Vector::Constant(1, static_cast<double>(n - 1));
    return s;
  }

  static Space box(Vector low, Vector high) {
    if (low.size() != high.size() || low.size() == 0) {
      throw InvalidArgument("box space bounds must be non-empty and of equal length");
    }
    for (Eigen::Index i = 0; i < low.size(); ++i) {
      if (!(low[i] <= high[i])) throw InvalidArgument("box space needs low <= high");
    }
    Space s;
    s.kind_ = Kind::box;
    s.low_ = std::move(low);
    s.high_ = std::move(high);
    return s;
  }

  static Space symmetric_box(std::size_t dim, double bound) {
    return box(Vector::Constant(static_cast<Eigen::Index>(dim), -bound),
               Vector::Constant(static_cast<Eigen::Index>(dim), bound));
  }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool is_discrete() const { return kind_ == Kind::discrete; }
  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(low_.size()); }
  [[nodiscard]] const Vector& low() const { return low_; }
  [[nodiscard]] const Vector& high() const { return high_; }

  [[nodiscard]] bool contains(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != dim()) {
      throw InvalidArgument("space_contains: expected dimension " + std::to_string(dim()) +
                            ", got " + std::to_string(x.size()));
    }
    if (kind_ == Kind::discrete) {
      const double v = x[0];
      return std::isfinite(v) && v == std::floor(v) && v >= 0.0 && v < static_cast<double>(n_);
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!(x[i] >= low_[i] && x[i] <= high_[i])) return false;
    }
    return true;
  }

  [[nodiscard]] Vector clip(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != dim()) {
      throw InvalidArgument("space clip: dimension mismatch");
    }
    if (kind_ == Kind::discrete) {
      double v = std::round(x[0]);
      if (!(v >= 0.0)) v = 0.0;
      if (v > static_cast<double>(n_ - 1)) v = static_cast<double>(n_ - 1);
      return Vector::Constant(1, v);
    }
    return x.cwiseMax(low_).cwiseMin(high_);
  }

  Vector sample(RngStream& rng) const {
    if (kind_ == Kind::discrete) return Vector::Constant(1, static_cast<double>(rng.index(n_)));
    Vector out(low_.size());
    for (Eigen::Index i = 0; i < low_.size(); ++i) out[i] = rng.uniform(low_[i], high_[i]);
    return out;
  }

  bool operator==(const Space& o) const {
    return kind_ == o.kind_ && n_ == o.n_ && low_ == o.low_ && high_ == o.high_;
  }

  [[nodiscard]] Json to_json() const {
    if (kind_ == Kind::discrete) return {{"type", "discrete"}, {"n", n_}};
    return {{"type", "box"}, {"low", vector_to_json(low_)}, {"high", vector_to_json(high_)}};
  }

  static Space from_json(const Json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "discrete") return discrete(j.at("n").get<std::size_t>());
    if (type == "box") return box(vector_from_json(j.at("low"), "low"), vector_from_json(j.at("high"), "high"));
    throw InvalidArgument("unknown space type '" + type + "'");
  }

 private:
  Kind kind_ = Kind::box;
  std::size_t n_ = 0;
  Vector low_;
  Vector high_;
};

inline bool space_contains(const Space& space, const Vector& x) { return space.contains(x); }

}  // namespace arlo
