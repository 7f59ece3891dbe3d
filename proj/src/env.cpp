#include "cmdplab/env.hpp"

#include "cmdplab/oracle.hpp"

namespace cmdplab {

GeneratedEnv generate_random_cmdp(std::uint64_t seed, int num_states, int num_actions,
                                  int horizon) {
    if (num_states < 1 || num_actions < 1 || horizon < 1)
        throw std::invalid_argument("generate_random_cmdp: dimensions must be >= 1");
    Rng rng(seed);
    TabularCmdp m;
    m.num_states = num_states;
    m.num_actions = num_actions;
    m.horizon = horizon;
    m.num_constraints = 1;
    m.kernel.resize(static_cast<std::size_t>(horizon) * num_states * num_actions *
                    num_states);
    const std::size_t cells =
        static_cast<std::size_t>(horizon) * num_states * num_actions;
    std::vector<double> r0(cells), r1(cells);

    for (int h = 0; h < horizon; ++h)
        for (int x = 0; x < num_states; ++x)
            for (int a = 0; a < num_actions; ++a) {
                auto row = rng.next_dirichlet(0.1, num_states);
                for (int y = 0; y < num_states; ++y)
                    m.kernel[m.kidx(h, x, a, y)] = row[y];
            }
    for (std::size_t i = 0; i < cells; ++i) {
        r0[i] = rng.next_double() < 0.5 ? 0.0 : rng.next_double();
        r1[i] = 1.0 - r0[i];
    }
    m.initial_state = rng.next_index(num_states);
    m.rewards.push_back(std::move(r0));
    m.rewards.push_back(std::move(r1));
    m.thresholds.push_back(0.0);
    m.validate();

    GeneratedEnv env;
    double vmax = unconstrained_max(m, 1).first;
    env.threshold = 0.5 * vmax;
    env.slater_gap = vmax - env.threshold;
    m.thresholds[0] = env.threshold;
    env.cmdp = std::move(m);
    return env;
}

Trajectory rollout(const TabularCmdp& cmdp, const Policy& policy, Rng& rng) {
    Trajectory traj;
    traj.steps.reserve(cmdp.horizon);
    int x = cmdp.initial_state;
    for (int h = 0; h < cmdp.horizon; ++h) {
        int a = rng.next_categorical(policy.row(h, x), cmdp.num_actions);
        int y = rng.next_categorical(cmdp.kernel_row(h, x, a), cmdp.num_states);
        traj.steps.push_back({x, a, y});
        x = y;
    }
    return traj;
}

}  // namespace cmdplab
