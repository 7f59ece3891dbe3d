#pragma once

#include <utility>

#include "cmdplab/cmdp.hpp"
#include "cmdplab/simplex.hpp"

namespace cmdplab {

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Backward-induction optimum of a single reward; returns the value at the
/// initial state and a greedy deterministic policy attaining it.
std::pair<double, Policy> unconstrained_max(const TabularCmdp& cmdp, int reward_index);

struct CmdpSolution {
    double value = 0.0;
    OccupancyMeasure occupancy;
    Policy policy;
};

/// Constrained optimum via the occupancy-measure LP. Throws InfeasibleError
/// when no policy satisfies the constraints.
CmdpSolution solve_cmdp_lp(const TabularCmdp& cmdp);

/// Enumerates deterministic policies (N = 1 additionally searches tight
/// two-policy mixtures). Guarded to <= 10^6 deterministic policies.
double brute_force_constrained_opt(const TabularCmdp& cmdp);

/// max_pi V[P, r^1](x1) - b^1. Throws InfeasibleError when nonpositive.
double slater_gap(const TabularCmdp& cmdp);

struct SaddlePoint {
    Policy policy;
    std::vector<double> lambda;
    double lagrangian = 0.0;
    int iterations = 0;
};

/// Exact regularized Lagrange value
///   L_tau = V[P,r0,tau](x1) + sum_n lambda_n (V[P,rn](x1) - b_n) + tau/2 |lambda|^2.
double regularized_lagrangian(const TabularCmdp& cmdp, const Policy& policy,
                              const std::vector<double>& lambda, double tau);

/// Exact-model primal-dual iteration with fixed tau until the iterates are
/// stationary; approximates the unique saddle point of L_tau.
SaddlePoint regularized_saddle(const TabularCmdp& cmdp, double tau,
                               long max_iterations = 1000000, double tolerance = 1e-8);

}  // namespace cmdplab
