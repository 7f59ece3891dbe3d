#pragma once

#include <cstdint>

#include "cmdplab/cmdp.hpp"
#include "cmdplab/env.hpp"

namespace cmdplab {

/// Visit counts and the empirical transition kernel P_bar = m / (n v 1).
/// Unvisited cells keep an all-zero empirical row.
struct EmpiricalModel {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<std::int64_t> n;  // [h][x][a]
    std::vector<std::int64_t> m;  // [h][x][a][y]

    static EmpiricalModel empty(int horizon, int num_states, int num_actions);

    std::size_t sidx(int h, int x, int a) const {
        return (static_cast<std::size_t>(h) * num_states + x) * num_actions + a;
    }
    std::size_t kidx(int h, int x, int a, int y) const {
        return sidx(h, x, a) * num_states + y;
    }
    std::int64_t count(int h, int x, int a) const { return n[sidx(h, x, a)]; }
    double phat(int h, int x, int a, int y) const {
        std::int64_t c = n[sidx(h, x, a)];
        return static_cast<double>(m[kidx(h, x, a, y)]) / static_cast<double>(c > 0 ? c : 1);
    }
    /// Empirical row into `out` (length num_states).
    void phat_row(int h, int x, int a, double* out) const;
};

void update_counts(EmpiricalModel& model, const Trajectory& traj);

struct BonusTable {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    double scale = 1.0;  // multiplies every entry on read
    std::vector<double> beta;  // [h][x][a], unscaled

    double at(int h, int x, int a) const {
        return scale * beta[(static_cast<std::size_t>(h) * num_states + x) * num_actions + a];
    }
};

/// ln(ln(max{x, e})).
double llnp(double x);

/// Per-cell Uniform-PAC bonus:
///   phi(n) = min{1, sqrt((2 llnp(2n) + 2 ln(48 X^2 A H / delta)) / (n v 1))}
///   beta(x,a) = sum_y [2 sqrt(Pbar(y|x,a)) phi + 5 phi^2]
double upac_bonus_cell(std::int64_t n, const double* phat_row, int num_states,
                       double delta, int X, int A, int H);

BonusTable upac_bonus(const EmpiricalModel& model, double delta, double scale = 1.0);

/// Episode-budget bonus: ln(K/delta)/(n v 1) + sqrt(ln(K/delta)/(n v 1)).
double naive_bonus_cell(std::int64_t n, double delta, std::int64_t budget);

BonusTable naive_bonus(const EmpiricalModel& model, double delta, std::int64_t budget,
                       double scale = 1.0);

}  // namespace cmdplab
