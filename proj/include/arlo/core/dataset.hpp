#pragma once

#include <span>
#include <string>
#include <vector>

#include "arlo/core/error.hpp"
#include "arlo/core/mdp.hpp"
#include "arlo/core/rng.hpp"

namespace arlo {

/// Ordered transitions grouped into trajectories.
///
/// Invariants: each trajectory is non-empty, only its final transition has
/// `last` set, and all records share the same state/action dimensions.
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(std::vector<Transition> transitions) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < transitions.size(); ++i) {
      if (transitions[i].last) {
        append_trajectory(std::span<const Transition>(transitions).subspan(start, i + 1 - start));
        start = i + 1;
      }
    }
    if (start != transitions.size()) {
      throw InvalidArgument("dataset: final trajectory is not terminated by a last flag");
    }
  }

  void append_trajectory(std::span<const Transition> trajectory) {
    if (trajectory.empty()) throw InvalidArgument("dataset: empty trajectory");
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
      const bool final = i + 1 == trajectory.size();
      if (trajectory[i].last != final) {
        throw InvalidArgument("dataset: last flag must be set exactly on the final transition");
      }
      check_dims(trajectory[i]);
    }
    offsets_.push_back(transitions_.size());
    transitions_.insert(transitions_.end(), trajectory.begin(), trajectory.end());
  }

  [[nodiscard]] bool empty() const { return transitions_.empty(); }
  [[nodiscard]] std::size_t size() const { return transitions_.size(); }
  [[nodiscard]] std::size_t n_trajectories() const { return offsets_.size(); }
  [[nodiscard]] const std::vector<Transition>& transitions() const { return transitions_; }
  [[nodiscard]] const std::vector<std::size_t>& trajectory_offsets() const { return offsets_; }
  [[nodiscard]] const Transition& operator[](std::size_t i) const { return transitions_[i]; }

  [[nodiscard]] std::span<const Transition> trajectory(std::size_t i) const {
    const std::size_t begin = offsets_.at(i);
    const std::size_t end = i + 1 < offsets_.size() ? offsets_[i + 1] : transitions_.size();
    return std::span<const Transition>(transitions_).subspan(begin, end - begin);
  }

  [[nodiscard]] std::size_t state_dim() const {
    return empty() ? 0 : static_cast<std::size_t>(transitions_.front().state.size());
  }
  [[nodiscard]] std::size_t action_dim() const {
    return empty() ? 0 : static_cast<std::size_t>(transitions_.front().action.size());
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.offsets_ == b.offsets_ && a.transitions_ == b.transitions_;
  }

 private:
  void check_dims(const Transition& t) const {
    if (t.state.size() != t.next_state.size()) {
      throw InvalidArgument("dataset: state and next_state dimensions differ");
    }
    if (transitions_.empty()) return;
    const auto& ref = transitions_.front();
    if (t.state.size() != ref.state.size() || t.action.size() != ref.action.size()) {
      throw InvalidArgument("dataset: inconsistent state/action dimensions");
    }
  }

  std::vector<Transition> transitions_;
  std::vector<std::size_t> offsets_;
};

inline std::vector<std::span<const Transition>> split_trajectories(const Dataset& d) {
  std::vector<std::span<const Transition>> out;
  out.reserve(d.n_trajectories());
  for (std::size_t i = 0; i < d.n_trajectories(); ++i) out.push_back(d.trajectory(i));
  return out;
}

/// Resamples whole trajectories with replacement; the result has as many
/// trajectories as `d`.
inline Dataset dataset_bootstrap(const Dataset& d, RngStream& rng) {
  if (d.empty()) throw InvalidArgument("dataset_bootstrap: empty dataset");
  Dataset out;
  const std::size_t n = d.n_trajectories();
  for (std::size_t i = 0; i < n; ++i) out.append_trajectory(d.trajectory(rng.index(n)));
  return out;
}

}  // namespace arlo
