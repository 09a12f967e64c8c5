#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "arlo/core/dataset.hpp"
#include "arlo/core/json_util.hpp"

namespace arlo {

// JSON Lines: one transition per line with keys
// episode, t, s, a, r, s_next, absorbing, last. Missing values are null.

inline void write_dataset_jsonl(std::ostream& os, const Dataset& d) {
  for (std::size_t e = 0; e < d.n_trajectories(); ++e) {
    const auto traj = d.trajectory(e);
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const Transition& tr = traj[t];
      Json line{{"episode", e},
                {"t", t},
                {"s", vector_to_json(tr.state)},
                {"a", vector_to_json(tr.action)},
                {"s_next", vector_to_json(tr.next_state)},
                {"absorbing", tr.absorbing},
                {"last", tr.last}};
      line["r"] = std::isnan(tr.reward) ? Json(nullptr) : Json(tr.reward);
      os << line.dump() << '\n';
    }
  }
}

inline Dataset read_dataset_jsonl(std::istream& is) {
  std::vector<Transition> transitions;
  std::string text;
  std::size_t line_no = 0;
  std::int64_t episode = -1;
  std::int64_t expected_t = 0;
  bool open = false;  // inside an unterminated trajectory
  while (std::getline(is, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "dataset line " + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception& ex) {
      throw InvalidArgument(where + ": " + ex.what());
    }
    try {
      require_keys(j, {"episode", "t", "s", "a", "r", "s_next", "absorbing", "last"}, where);
    } catch (const ConfigError& ex) {
      throw InvalidArgument(ex.what());
    }
    const auto ep = j.at("episode").get<std::int64_t>();
    const auto t = j.at("t").get<std::int64_t>();
    if (open) {
      if (ep != episode || t != expected_t) {
        throw InvalidArgument(where + ": expected episode " + std::to_string(episode) + " step " +
                              std::to_string(expected_t));
      }
    } else {
      if (ep != episode + 1 || t != 0) {
        throw InvalidArgument(where + ": expected the start of episode " + std::to_string(episode + 1));
      }
      episode = ep;
    }
    Transition tr;
    tr.state = vector_from_json(j.at("s"), where + " s");
    tr.action = vector_from_json(j.at("a"), where + " a");
    tr.next_state = vector_from_json(j.at("s_next"), where + " s_next");
    const auto& r = j.at("r");
    tr.reward = r.is_null() ? std::numeric_limits<double>::quiet_NaN() : r.get<double>();
    tr.absorbing = j.at("absorbing").get<bool>();
    tr.last = j.at("last").get<bool>();
    open = !tr.last;
    expected_t = tr.last ? 0 : t + 1;
    transitions.push_back(std::move(tr));
  }
  if (open) throw InvalidArgument("dataset: final episode is not terminated by a last flag");
  return Dataset(std::move(transitions));
}

}  // namespace arlo
