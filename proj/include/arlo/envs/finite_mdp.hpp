#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arlo/envs/environment.hpp"

namespace arlo {

/// Explicit tabular MDP. P is stored as [s][a][s'] in a flat vector.
struct FiniteMdp {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> P;
  Matrix R;  ///< n_states x n_actions
  double gamma = 0.9;
  std::optional<std::size_t> horizon;
  Vector mu0;

  [[nodiscard]] double p(std::size_t s, std::size_t a, std::size_t s2) const {
    return P[(s * n_actions + a) * n_states + s2];
  }
  double& p(std::size_t s, std::size_t a, std::size_t s2) { return P[(s * n_actions + a) * n_states + s2]; }

  void validate() const {
    if (n_states == 0 || n_actions == 0) throw InvalidArgument("finite mdp: empty state or action set");
    if (P.size() != n_states * n_actions * n_states) throw InvalidArgument("finite mdp: P has the wrong size");
    if (static_cast<std::size_t>(R.rows()) != n_states || static_cast<std::size_t>(R.cols()) != n_actions) {
      throw InvalidArgument("finite mdp: R has the wrong shape");
    }
    if (static_cast<std::size_t>(mu0.size()) != n_states) throw InvalidArgument("finite mdp: mu0 has the wrong size");
    for (std::size_t s = 0; s < n_states; ++s) {
      for (std::size_t a = 0; a < n_actions; ++a) {
        double total = 0.0;
        for (std::size_t s2 = 0; s2 < n_states; ++s2) {
          if (!(p(s, a, s2) >= 0.0)) throw InvalidArgument("finite mdp: negative probability");
          total += p(s, a, s2);
        }
        if (std::abs(total - 1.0) > 1e-12) {
          throw InvalidArgument("finite mdp: P[" + std::to_string(s) + "," + std::to_string(a) + ",:] sums to " +
                                std::to_string(total));
        }
      }
    }
    if ((mu0.array() < 0.0).any() || std::abs(mu0.sum() - 1.0) > 1e-12) {
      throw InvalidArgument("finite mdp: mu0 is not a distribution");
    }
    spec().validate();
  }

  [[nodiscard]] MdpSpec spec() const {
    return MdpSpec{Space::discrete(n_states), Space::discrete(n_actions), gamma, horizon};
  }
};

namespace detail {
inline std::size_t sample_categorical(const double* probs, std::size_t n, RngStream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (probs[i] > 0.0) last_positive = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last_positive;
}
}  // namespace detail

inline std::pair<std::size_t, double> finite_step(const FiniteMdp& mdp, std::size_t s, std::size_t a, RngStream& rng) {
  if (s >= mdp.n_states || a >= mdp.n_actions) throw InvalidArgument("finite_step: index out of range");
  const double* row = &mdp.P[(s * mdp.n_actions + a) * mdp.n_states];
  return {detail::sample_categorical(row, mdp.n_states, rng), mdp.R(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a))};
}

/// Q_0 = 0, Q_{k+1}(s,a) = R(s,a) + gamma sum_s' P(s'|s,a) max_a' Q_k(s',a').
/// One optimal Bellman backup of a Q-table.
inline Matrix bellman_backup(const FiniteMdp& mdp, const Matrix& q) {
  const auto S = static_cast<Eigen::Index>(mdp.n_states);
  const auto A = static_cast<Eigen::Index>(mdp.n_actions);
  const Vector v = q.rowwise().maxCoeff();
  Matrix next(S, A);
  for (Eigen::Index s = 0; s < S; ++s) {
    for (Eigen::Index a = 0; a < A; ++a) {
      double expect = 0.0;
      for (Eigen::Index s2 = 0; s2 < S; ++s2) {
        expect += mdp.p(static_cast<std::size_t>(s), static_cast<std::size_t>(a), static_cast<std::size_t>(s2)) * v[s2];
      }
      next(s, a) = mdp.R(s, a) + mdp.gamma * expect;
    }
  }
  return next;
}

inline Matrix value_iteration(const FiniteMdp& mdp, std::size_t n_iters) {
  Matrix q = Matrix::Zero(static_cast<Eigen::Index>(mdp.n_states), static_cast<Eigen::Index>(mdp.n_actions));
  for (std::size_t k = 0; k < n_iters; ++k) q = bellman_backup(mdp, q);
  return q;
}

/// Backups until the sup-norm change drops below `tol`; returns the table
/// and the number of backups done.
inline std::pair<Matrix, std::size_t> value_iteration_converged(const FiniteMdp& mdp, double tol = 1e-12,
                                                                std::size_t max_iters = 1000000) {
  Matrix q = Matrix::Zero(static_cast<Eigen::Index>(mdp.n_states), static_cast<Eigen::Index>(mdp.n_actions));
  std::size_t k = 0;
  while (k < max_iters) {
    Matrix next = bellman_backup(mdp, q);
    ++k;
    const double delta = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (delta < tol) break;
  }
  return {q, k};
}

/// Greedy actions of a Q-table; ties go to the lowest action index.
inline std::vector<std::size_t> greedy_actions(const Matrix& q) {
  std::vector<std::size_t> out(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    Eigen::Index best = 0;
    for (Eigen::Index a = 1; a < q.cols(); ++a) {
      if (q(s, a) > q(s, best)) best = a;
    }
    out[static_cast<std::size_t>(s)] = static_cast<std::size_t>(best);
  }
  return out;
}

/// Deterministic ring of `n` states. Action 0 stays, action 1 advances to
/// (s + 1) mod n. Staying in the last state pays 1; everything else pays 0.
inline FiniteMdp chain_mdp(std::size_t n_states, double gamma, std::optional<std::size_t> horizon) {
  if (n_states < 2) throw InvalidArgument("chain_mdp: need at least two states");
  FiniteMdp m;
  m.n_states = n_states;
  m.n_actions = 2;
  m.P.assign(n_states * 2 * n_states, 0.0);
  m.R = Matrix::Zero(static_cast<Eigen::Index>(n_states), 2);
  for (std::size_t s = 0; s < n_states; ++s) {
    m.p(s, 0, s) = 1.0;
    m.p(s, 1, (s + 1) % n_states) = 1.0;
  }
  m.R(static_cast<Eigen::Index>(n_states - 1), 0) = 1.0;
  m.gamma = gamma;
  m.horizon = horizon;
  m.mu0 = Vector::Zero(static_cast<Eigen::Index>(n_states));
  m.mu0[0] = 1.0;
  m.validate();
  return m;
}

/// Random MDP whose transition probabilities are multiples of 1/denominator,
/// so a dataset holding every (s, a, s') the right number of times has an
/// empirical model equal to the true one. Rewards are uniform in [0, 1).
inline FiniteMdp random_finite_mdp(std::size_t n_states, std::size_t n_actions, std::size_t denominator, double gamma,
                                   std::optional<std::size_t> horizon, RngStream& rng) {
  if (denominator == 0) throw InvalidArgument("random_finite_mdp: denominator must be positive");
  FiniteMdp m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.P.assign(n_states * n_actions * n_states, 0.0);
  m.R.resize(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_actions));
  for (std::size_t s = 0; s < n_states; ++s) {
    for (std::size_t a = 0; a < n_actions; ++a) {
      std::vector<std::size_t> counts(n_states, 0);
      for (std::size_t k = 0; k < denominator; ++k) ++counts[rng.index(n_states)];
      for (std::size_t s2 = 0; s2 < n_states; ++s2) {
        m.p(s, a, s2) = static_cast<double>(counts[s2]) / static_cast<double>(denominator);
      }
      m.R(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) = rng.uniform();
    }
  }
  m.gamma = gamma;
  m.horizon = horizon;
  m.mu0 = Vector::Constant(static_cast<Eigen::Index>(n_states), 1.0 / static_cast<double>(n_states));
  m.validate();
  return m;
}

/// Generative-model dataset: every (s, a, s') appears P(s'|s,a) * multiplicity
/// times, each as a one-step trajectory.
inline Dataset generative_dataset(const FiniteMdp& mdp, std::size_t multiplicity) {
  Dataset d;
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2) {
        const double copies = mdp.p(s, a, s2) * static_cast<double>(multiplicity);
        const double rounded = std::round(copies);
        if (std::abs(copies - rounded) > 1e-9) {
          throw InvalidArgument("generative_dataset: P * multiplicity is not integral");
        }
        Transition tr{Vector::Constant(1, static_cast<double>(s)), Vector::Constant(1, static_cast<double>(a)),
                      mdp.R(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)),
                      Vector::Constant(1, static_cast<double>(s2)), false, true};
        for (std::size_t c = 0; c < static_cast<std::size_t>(rounded); ++c) {
          d.append_trajectory(std::span<const Transition>(&tr, 1));
        }
      }
    }
  }
  return d;
}

class FiniteMdpEnvironment final : public EnvironmentBase<FiniteMdpEnvironment> {
 public:
  explicit FiniteMdpEnvironment(FiniteMdp mdp) : mdp_(std::move(mdp)) {
    mdp_.validate();
    spec_ = mdp_.spec();
  }

  const MdpSpec& spec() const override { return spec_; }
  std::string name() const override { return "finite"; }
  [[nodiscard]] const FiniteMdp& mdp() const { return mdp_; }

  Vector reset() override {
    state_ = detail::sample_categorical(mdp_.mu0.data(), mdp_.n_states, rng_);
    return Vector::Constant(1, static_cast<double>(state_));
  }

  StepResult step(const Vector& action) override {
    if (action.size() != 1 || !spec_.action_space.contains(action)) {
      throw InvalidArgument("finite environment: invalid action");
    }
    auto [next, reward] = finite_step(mdp_, state_, static_cast<std::size_t>(action[0]), rng_);
    state_ = next;
    return {Vector::Constant(1, static_cast<double>(next)), reward, false};
  }

 private:
  FiniteMdp mdp_;
  MdpSpec spec_;
  std::size_t state_ = 0;
};

}  // namespace arlo
