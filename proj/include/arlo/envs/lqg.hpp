#pragma once

#include <string>
#include <utility>
#include <vector>

#include "arlo/envs/environment.hpp"

namespace arlo {

/// Linear-quadratic-Gaussian regulator.
///   s' = clip(A s + B clip(a) + eps),  eps ~ N(0, diag(noise_std)^2)
///   r  = -s^T Q s - clip(a)^T R clip(a)
/// States and actions are clipped to [-bound, bound] per coordinate.
struct LqgParams {
  Matrix A;
  Matrix B;
  Matrix Q;
  Matrix R;
  Matrix noise_std;  ///< diagonal
  double bound = 3.5;
  double gamma = 0.9;
  std::size_t horizon = 15;
  Vector init_low;   ///< mu0 is uniform on [init_low, init_high]
  Vector init_high;

  [[nodiscard]] std::size_t state_dim() const { return static_cast<std::size_t>(A.rows()); }
  [[nodiscard]] std::size_t action_dim() const { return static_cast<std::size_t>(B.cols()); }

  void validate() const {
    const auto n = A.rows();
    const auto m = B.cols();
    if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != m || R.cols() != m ||
        noise_std.rows() != n || noise_std.cols() != n || init_low.size() != n || init_high.size() != n) {
      throw InvalidArgument("lqg: inconsistent matrix dimensions");
    }
    auto psd = [](const Matrix& M, const char* what) {
      if (!M.isApprox(M.transpose(), 1e-12)) throw InvalidArgument(std::string("lqg: ") + what + " not symmetric");
      Eigen::SelfAdjointEigenSolver<Matrix> es(M);
      if (es.eigenvalues().minCoeff() < -1e-12) {
        throw InvalidArgument(std::string("lqg: ") + what + " not positive semi-definite");
      }
    };
    psd(Q, "Q");
    psd(R, "R");
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j && noise_std(i, j) != 0.0) throw InvalidArgument("lqg: noise_std must be diagonal");
      }
      if (noise_std(i, i) < 0.0) throw InvalidArgument("lqg: noise_std must be non-negative");
      if (init_low[i] > init_high[i]) throw InvalidArgument("lqg: init_low > init_high");
    }
    if (!(bound > 0.0)) throw InvalidArgument("lqg: bound must be positive");
    if (horizon == 0) throw InvalidArgument("lqg: horizon must be at least 1");
  }

  [[nodiscard]] MdpSpec spec() const {
    MdpSpec s{Space::symmetric_box(state_dim(), bound), Space::symmetric_box(action_dim(), bound), gamma,
              horizon};
    s.validate();
    return s;
  }
};

/// Two-dimensional regulator with three actuators; the middle actuator only
/// adds cost. mu0 defaults to uniform on [-2, 2]^2.
inline LqgParams default_lqg() {
  LqgParams p;
  p.A = Matrix::Identity(2, 2);
  p.B = Matrix::Zero(2, 3);
  p.B(0, 0) = 1.0;
  p.B(1, 2) = 1.0;
  p.Q = 0.7 * Matrix::Identity(2, 2);
  p.R = 0.3 * Matrix::Identity(3, 3);
  p.noise_std = 0.1 * Matrix::Identity(2, 2);
  p.bound = 3.5;
  p.gamma = 0.9;
  p.horizon = 15;
  p.init_low = Vector::Constant(2, -2.0);
  p.init_high = Vector::Constant(2, 2.0);
  return p;
}

inline Vector clip_symmetric(const Vector& x, double bound) { return x.cwiseMax(-bound).cwiseMin(bound); }

/// One transition. Always draws one normal per state coordinate so the stream
/// position does not depend on the noise level.
inline std::pair<Vector, double> lqg_step(const LqgParams& p, const Vector& s, const Vector& a, RngStream& rng) {
  if (static_cast<std::size_t>(s.size()) != p.state_dim() || static_cast<std::size_t>(a.size()) != p.action_dim()) {
    throw InvalidArgument("lqg_step: dimension mismatch");
  }
  const Vector sc = clip_symmetric(s, p.bound);
  const Vector ac = clip_symmetric(a, p.bound);
  const double reward = -sc.dot(p.Q * sc) - ac.dot(p.R * ac);
  Vector next = p.A * sc + p.B * ac;
  for (Eigen::Index i = 0; i < next.size(); ++i) next[i] += p.noise_std(i, i) * rng.normal();
  return {clip_symmetric(next, p.bound), reward};
}

class LqgEnvironment final : public EnvironmentBase<LqgEnvironment> {
 public:
  explicit LqgEnvironment(LqgParams params = default_lqg()) : params_(std::move(params)) {
    params_.validate();
    spec_ = params_.spec();
  }

  const MdpSpec& spec() const override { return spec_; }
  std::string name() const override { return "lqg"; }
  [[nodiscard]] const LqgParams& params() const { return params_; }

  Vector reset() override {
    Vector s(params_.init_low.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = rng_.uniform(params_.init_low[i], params_.init_high[i]);
    state_ = clip_symmetric(s, params_.bound);
    return state_;
  }

  StepResult step(const Vector& action) override {
    auto [next, reward] = lqg_step(params_, state_, action, rng_);
    state_ = next;
    return {std::move(next), reward, false};
  }

 private:
  LqgParams params_;
  MdpSpec spec_;
  Vector state_;
};

}  // namespace arlo
