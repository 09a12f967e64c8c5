#pragma once

#include <optional>

#include "arlo/core/error.hpp"
#include "arlo/core/space.hpp"

namespace arlo {

/// Static description of an MDP: spaces, discount and horizon. Transition
/// model, reward and initial distribution stay behind the Environment.
struct MdpSpec {
  Space state_space;
  Space action_space;
  double gamma = 1.0;
  std::optional<std::size_t> horizon;  ///< nullopt means infinite

  void validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0, 1]");
    if (!horizon && gamma >= 1.0) throw InvalidArgument("an infinite horizon requires gamma < 1");
    if (horizon && *horizon == 0) throw InvalidArgument("horizon must be at least 1");
  }

  [[nodiscard]] Json to_json() const {
    Json j{{"state_space", state_space.to_json()},
           {"action_space", action_space.to_json()},
           {"gamma", gamma}};
    j["horizon"] = horizon ? Json(*horizon) : Json(nullptr);
    return j;
  }
};

/// One (s, a, r, s') record.
struct Transition {
  Vector state;
  Vector action;
  double reward = 0.0;
  Vector next_state;
  bool absorbing = false;
  bool last = false;

  friend bool operator==(const Transition& a, const Transition& b) {
    return bitwise_equal(a.state, b.state) && bitwise_equal(a.action, b.action) &&
           bitwise_equal(a.reward, b.reward) && bitwise_equal(a.next_state, b.next_state) &&
           a.absorbing == b.absorbing && a.last == b.last;
  }
};

}  // namespace arlo
