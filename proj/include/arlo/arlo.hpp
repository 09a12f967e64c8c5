#pragma once

// Umbrella header.
#include "arlo/cli/commands.hpp"
#include "arlo/cli/config.hpp"
#include "arlo/cli/environment_spec.hpp"
#include "arlo/cli/hash.hpp"
#include "arlo/core/dataset.hpp"
#include "arlo/core/dataset_io.hpp"
#include "arlo/core/error.hpp"
#include "arlo/core/hyperparams.hpp"
#include "arlo/core/json_util.hpp"
#include "arlo/core/mdp.hpp"
#include "arlo/core/parallel.hpp"
#include "arlo/core/policy.hpp"
#include "arlo/core/rng.hpp"
#include "arlo/core/space.hpp"
#include "arlo/core/types.hpp"
#include "arlo/envs/environment.hpp"
#include "arlo/envs/finite_mdp.hpp"
#include "arlo/envs/lqg.hpp"
#include "arlo/envs/reservoir.hpp"
#include "arlo/envs/riccati.hpp"
#include "arlo/framework/registry.hpp"
#include "arlo/framework/run.hpp"
#include "arlo/framework/stage.hpp"
#include "arlo/framework/unit.hpp"
#include "arlo/framework/validate.hpp"
#include "arlo/metrics/entropy.hpp"
#include "arlo/metrics/knn.hpp"
#include "arlo/metrics/mutual_information.hpp"
#include "arlo/metrics/returns.hpp"
#include "arlo/tuner/genetic.hpp"
#include "arlo/tuner/random_search.hpp"
#include "arlo/tuner/trace.hpp"
#include "arlo/tuner/tuner.hpp"
#include "arlo/units/data_generation.hpp"
#include "arlo/units/data_preparation.hpp"
#include "arlo/units/feature_engineering.hpp"
#include "arlo/units/fqi.hpp"
#include "arlo/units/gpomdp.hpp"
#include "arlo/units/lspi.hpp"
#include "arlo/units/policy_evaluation.hpp"
#include "arlo/units/policy_io.hpp"
#include "arlo/units/q_function.hpp"
#include "arlo/units/q_learning.hpp"
#include "arlo/units/regressors.hpp"
