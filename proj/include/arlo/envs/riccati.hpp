#pragma once

#include <vector>

#include "arlo/envs/lqg.hpp"

namespace arlo {

/// Finite-horizon optimal linear controller for an LqgParams instance
/// (noise-free clipping ignored). cost_matrices and noise_offsets have
/// horizon + 1 entries with P_T = 0 and c_T = 0; the optimal expected return
/// from s0 is -s0^T P_0 s0 - c_0.
struct RiccatiSolution {
  std::vector<Matrix> gains;          ///< K_0 .. K_{T-1}, each m x n
  std::vector<Matrix> cost_matrices;  ///< P_0 .. P_T
  std::vector<double> noise_offsets;  ///< c_0 .. c_T

  [[nodiscard]] double expected_return(const Vector& s0) const {
    return -s0.dot(cost_matrices.front() * s0) - noise_offsets.front();
  }
};

inline RiccatiSolution riccati_solve(const LqgParams& p) {
  p.validate();
  const auto n = static_cast<Eigen::Index>(p.state_dim());
  const std::size_t T = p.horizon;
  const Matrix sigma = p.noise_std * p.noise_std;
  RiccatiSolution sol;
  sol.gains.assign(T, Matrix());
  sol.cost_matrices.assign(T + 1, Matrix::Zero(n, n));
  sol.noise_offsets.assign(T + 1, 0.0);
  for (std::size_t k = T; k-- > 0;) {
    const Matrix& next = sol.cost_matrices[k + 1];
    const Matrix gram = p.R + p.gamma * p.B.transpose() * next * p.B;
    Eigen::FullPivLU<Matrix> lu(gram);
    if (!lu.isInvertible()) {
      throw Error("riccati_solve: R + gamma B^T P B is singular at step " + std::to_string(k));
    }
    sol.gains[k] = -p.gamma * lu.solve(p.B.transpose() * next * p.A);
    Matrix P = p.Q + p.gamma * p.A.transpose() * next * (p.A + p.B * sol.gains[k]);
    sol.cost_matrices[k] = 0.5 * (P + P.transpose());
    sol.noise_offsets[k] = p.gamma * ((next * sigma).trace() + sol.noise_offsets[k + 1]);
  }
  return sol;
}

/// Closed-form return averaged over the uniform initial distribution.
inline double riccati_mean_return(const RiccatiSolution& sol, const LqgParams& p) {
  const Vector mean = 0.5 * (p.init_low + p.init_high);
  const Vector width = p.init_high - p.init_low;
  Matrix second = mean * mean.transpose();
  second.diagonal() += width.cwiseProduct(width) / 12.0;
  return -(sol.cost_matrices.front() * second).trace() - sol.noise_offsets.front();
}

inline PolicyPtr riccati_policy(const RiccatiSolution& sol, const Space& action_space) {
  return std::make_shared<TimeVaryingLinearPolicy>(sol.gains, action_space);
}

}  // namespace arlo
