#pragma once

#include "arlo/units/q_function.hpp"

namespace arlo {

/// Rebuilds any policy written by Policy::to_json.
inline PolicyPtr policy_from_json(const Json& j) {
  const auto cls = j.at("class").get<std::string>();
  const Space space = Space::from_json(j.at("action_space"));
  const Json& p = j.at("parameters");
  if (cls == "uniform_random") return std::make_shared<UniformRandomPolicy>(space);
  if (cls == "tabular") {
    return std::make_shared<TabularPolicy>(p.at("actions").get<std::vector<std::size_t>>(), space.n());
  }
  if (cls == "linear_gaussian") {
    return std::make_shared<LinearGaussianPolicy>(matrix_from_json(p.at("gain"), "gain"),
                                                  p.at("log_std").get<double>(), space);
  }
  if (cls == "time_varying_linear") {
    std::vector<Matrix> gains;
    for (const auto& g : p.at("gains")) gains.push_back(matrix_from_json(g, "gain"));
    return std::make_shared<TimeVaryingLinearPolicy>(std::move(gains), space);
  }
  if (cls == "grid_greedy_q") {
    return std::make_shared<GridGreedyQPolicy>(q_function_from_json(p.at("q")),
                                               action_grid_from_json(j.at("action_grid")), space);
  }
  throw InvalidArgument("unknown policy class '" + cls + "'");
}

}  // namespace arlo
