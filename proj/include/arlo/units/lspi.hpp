#pragma once

#include <memory>
#include <string>
#include <vector>

#include "arlo/core/dataset.hpp"
#include "arlo/units/q_function.hpp"

namespace arlo {

struct LspiResult {
  std::shared_ptr<const LinearQFunction> q;
  std::vector<Vector> grid;
  PolicyPtr policy;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Basis chosen from the spaces: one-hot when states and actions are both
/// discrete, quadratic otherwise.
inline LinearBasis default_basis(const Space& state_space, const Space& action_space) {
  if (state_space.is_discrete() && action_space.is_discrete()) {
    return LinearBasis::one_hot(state_space.n(), action_space.n());
  }
  return LinearBasis::poly2(state_space.dim(), action_space.dim());
}

/// Least-squares policy iteration. Each iteration solves the LSTD-Q system
///   (sum phi (phi - gamma (1 - absorbing) phi'_pi)^T + ridge I) w = sum phi r
/// for the greedy policy of the previous weights (initially `initial_weights`,
/// zero by default). Stops after `n_iterations` solves or once the greedy
/// actions at every next state in the dataset stop changing.
inline LspiResult pg_lspi(const Dataset& d, const LinearBasis& basis, std::size_t n_iterations, double gamma,
                          const Space& action_space, std::vector<Vector> grid = {}, double ridge = 1e-6,
                          std::optional<Vector> initial_weights = std::nullopt) {
  if (d.empty()) throw InvalidArgument("lspi: empty dataset");
  if (n_iterations < 1) throw ConfigError("lspi: n_iterations must be at least 1");
  if (grid.empty()) grid = build_action_grid(action_space);
  const auto k = static_cast<Eigen::Index>(basis.size());
  const std::size_t n = d.size();

  std::vector<Vector> phi(n);
  for (std::size_t j = 0; j < n; ++j) phi[j] = basis(d[j].state, d[j].action);
  std::vector<std::vector<Vector>> phi_next(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    phi_next[g].resize(n);
    for (std::size_t j = 0; j < n; ++j) phi_next[g][j] = basis(d[j].next_state, grid[g]);
  }
  auto greedy_next = [&](const Vector& w) {
    std::vector<std::size_t> choice(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      double best = phi_next[0][j].dot(w);
      for (std::size_t g = 1; g < grid.size(); ++g) {
        const double v = phi_next[g][j].dot(w);
        if (v > best) {
          best = v;
          choice[j] = g;
        }
      }
    }
    return choice;
  };

  Vector w = initial_weights ? *initial_weights : Vector::Zero(k);
  if (w.size() != k) throw InvalidArgument("lspi: initial weights have the wrong size");
  auto pi = greedy_next(w);
  LspiResult out;
  for (std::size_t it = 1; it <= n_iterations; ++it) {
    Matrix A = ridge * Matrix::Identity(k, k);
    Vector b = Vector::Zero(k);
    for (std::size_t j = 0; j < n; ++j) {
      const double c = d[j].absorbing ? 0.0 : gamma;
      A.noalias() += phi[j] * (phi[j] - c * phi_next[pi[j]][j]).transpose();
      b += d[j].reward * phi[j];
    }
    Eigen::FullPivLU<Matrix> lu(A);
    if (!lu.isInvertible()) throw Error("lspi: singular LSTD-Q system at iteration " + std::to_string(it));
    w = lu.solve(b);
    if (!w.allFinite()) throw Error("lspi: non-finite weights at iteration " + std::to_string(it));
    out.iterations = it;
    auto next_pi = greedy_next(w);
    if (next_pi == pi) {
      out.converged = true;
      break;
    }
    pi = std::move(next_pi);
  }
  out.q = std::make_shared<LinearQFunction>(basis, w);
  out.grid = grid;
  out.policy = std::make_shared<GridGreedyQPolicy>(out.q, std::move(grid), action_space);
  return out;
}

}  // namespace arlo
