#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace arlo {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_path(std::uint64_t root, const std::vector<std::uint64_t>& path) {
  std::uint64_t h = splitmix64(root ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t p : path) {
    h = splitmix64(h ^ splitmix64(p + 0xbb67ae8584caa73bULL));
  }
  return h;
}

}  // namespace detail

/// Reproducible random stream addressed by (root_seed, path).
///
/// The engine seed is a hash of the full address, so a child stream never
/// depends on how many draws its parent has made. Two streams built from the
/// same address produce the same sequence; distinct paths give unrelated
/// sequences. All draws are implemented here rather than through
/// `<random>` distributions, whose output is implementation-defined.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() : RngStream(0) {}

  explicit RngStream(std::uint64_t root_seed, std::vector<std::uint64_t> path = {})
      : root_(root_seed), path_(std::move(path)), engine_(detail::hash_path(root_, path_)) {}

  [[nodiscard]] RngStream child(std::uint64_t index) const {
    auto p = path_;
    p.push_back(index);
    return RngStream(root_, std::move(p));
  }

  [[nodiscard]] std::uint64_t root_seed() const { return root_; }
  [[nodiscard]] const std::vector<std::uint64_t>& path() const { return path_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Unbiased (rejection sampling).
  std::uint64_t index(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit range
    return lo + static_cast<std::int64_t>(index(span));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal draw (Marsaglia polar method).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  std::uint64_t root_;
  std::vector<std::uint64_t> path_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace arlo
