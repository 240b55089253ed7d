#pragma once

// Seeded random fixtures shared by the self-test command and the test suites.

#include "crsmdp/model.hpp"

#include <random>

namespace crsmdp {

using Rng = std::mt19937_64;

struct RandomModelSpec {
    int num_states = 2;
    int num_actions = 2;
    double beta_min = 0.3;
    double beta_max = 0.8;
    double max_abs_gamma = 1.0;
    double cost_min = -1.0;
    double cost_max = 1.0;
};

/// Dense random transitions and costs, no constraints.
MdpModel random_model(Rng& rng, const RandomModelSpec& spec = {});

/// Random row-stochastic rule; with `sparse` some entries are zeroed.
DecisionRule random_rule(Rng& rng, int num_states, int num_actions, bool sparse = false);

/// Ultimately stationary policy with a random prefix of length <= max_prefix.
MarkovPolicy random_policy(Rng& rng, int num_states, int num_actions, int max_prefix = 4);

}  // namespace crsmdp
