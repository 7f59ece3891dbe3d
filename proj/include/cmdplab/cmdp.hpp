#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cmdplab {

struct DegenerateEntropyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite-horizon tabular CMDP: one objective reward (index 0) plus
/// num_constraints constraint rewards, each with a threshold.
struct TabularCmdp {
    int num_states = 0;
    int num_actions = 0;
    int horizon = 0;
    int num_constraints = 0;
    std::vector<double> kernel;                 // [h][x][a][y]
    std::vector<std::vector<double>> rewards;   // n -> [h][x][a]
    std::vector<double> thresholds;             // n = 1..N, stored 0-based
    int initial_state = 0;

    std::size_t kidx(int h, int x, int a, int y) const {
        return ((static_cast<std::size_t>(h) * num_states + x) * num_actions + a) *
                   num_states + y;
    }
    std::size_t sidx(int h, int x, int a) const {
        return (static_cast<std::size_t>(h) * num_states + x) * num_actions + a;
    }
    const double* kernel_row(int h, int x, int a) const {
        return kernel.data() + kidx(h, x, a, 0);
    }

    /// Checks all structural invariants. Rows whose sums drift from 1 by
    /// less than 1e-6 are renormalized in place; larger drift throws.
    void validate();
};

/// Step-indexed row-stochastic action distributions.
struct Policy {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> probs;  // [h][x][a]

    std::size_t idx(int h, int x, int a) const {
        return (static_cast<std::size_t>(h) * num_states + x) * num_actions + a;
    }
    double* row(int h, int x) { return probs.data() + idx(h, x, 0); }
    const double* row(int h, int x) const { return probs.data() + idx(h, x, 0); }

    static Policy uniform(int horizon, int num_states, int num_actions);
    bool strictly_positive() const;
    void validate() const;
};

struct ValueTables {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    double tau = 0.0;
    std::vector<double> v;  // [h][x], h in 0..H (v at H is the terminal zero row)
    std::vector<double> q;  // [h][x][a]

    double value(int h, int x) const {
        return v[static_cast<std::size_t>(h) * num_states + x];
    }
    double qvalue(int h, int x, int a) const {
        return q[(static_cast<std::size_t>(h) * num_states + x) * num_actions + a];
    }
    double initial_value(const TabularCmdp& m) const { return value(0, m.initial_state); }
};

struct OccupancyMeasure {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> w;  // [h][x][a]

    double at(int h, int x, int a) const {
        return w[(static_cast<std::size_t>(h) * num_states + x) * num_actions + a];
    }
};

/// Exact regularized policy evaluation under the true kernel: backward
/// induction Q_h = r_h + P_h V_{h+1}, V_h = pi_h (Q_h - tau ln pi_h).
ValueTables eval_policy_exact(const TabularCmdp& cmdp, int reward_index,
                              const Policy& policy, double tau);

/// Same backward pass for an arbitrary reward tensor laid out [h][x][a].
ValueTables eval_policy_exact_reward(const TabularCmdp& cmdp,
                                     const std::vector<double>& reward,
                                     const Policy& policy, double tau);

/// Forward recursion from the point mass at the initial state.
OccupancyMeasure occupancy(const TabularCmdp& cmdp, const Policy& policy);

double value_from_occupancy(const OccupancyMeasure& w, const std::vector<double>& reward);

/// Residual of V[P,r,tau] = V[P,r] + tau * V[P, -ln pi] at the initial state.
double entropy_value_identity_check(const TabularCmdp& cmdp, const Policy& policy,
                                    int reward_index, double tau);

/// JSON round-trip, numbers emitted with 17 significant digits.
std::string cmdp_to_json(const TabularCmdp& cmdp);
TabularCmdp cmdp_from_json(const std::string& text);
TabularCmdp load_cmdp(const std::string& path);
void save_cmdp(const TabularCmdp& cmdp, const std::string& path);

}  // namespace cmdplab
