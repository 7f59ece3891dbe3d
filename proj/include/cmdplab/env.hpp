#pragma once

#include "cmdplab/cmdp.hpp"
#include "cmdplab/rng.hpp"

namespace cmdplab {

/// One episode: steps[h] = (state, action, next_state) at step h.
struct Trajectory {
    struct Step {
        int state;
        int action;
        int next_state;
    };
    std::vector<Step> steps;
};

struct GeneratedEnv {
    TabularCmdp cmdp;
    double threshold = 0.0;   // b^1
    double slater_gap = 0.0;  // max_pi V[r^1] - b^1; equals b^1 under the half-max rule
};

/// Random CMDP: Dirichlet(0.1) kernel rows, sparse conflicting rewards
/// r^1 = 1 - r^0, threshold b^1 = half the unconstrained optimum of r^1.
GeneratedEnv generate_random_cmdp(std::uint64_t seed, int num_states, int num_actions,
                                  int horizon);

Trajectory rollout(const TabularCmdp& cmdp, const Policy& policy, Rng& rng);

}  // namespace cmdplab
