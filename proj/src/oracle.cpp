#include "cmdplab/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "cmdplab/algorithms.hpp"

namespace cmdplab {

std::pair<double, Policy> unconstrained_max(const TabularCmdp& cmdp, int reward_index) {
    if (reward_index < 0 || reward_index > cmdp.num_constraints)
        throw std::invalid_argument("unconstrained_max: reward index out of range");
    const int H = cmdp.horizon, X = cmdp.num_states, A = cmdp.num_actions;
    const auto& r = cmdp.rewards[reward_index];
    Policy greedy = Policy::uniform(H, X, A);
    std::vector<double> v(X, 0.0), vprev(X);
    for (int h = H - 1; h >= 0; --h) {
        vprev = v;
        for (int x = 0; x < X; ++x) {
            double best = -1e300;
            int best_a = 0;
            for (int a = 0; a < A; ++a) {
                const double* p = cmdp.kernel_row(h, x, a);
                double qa = r[cmdp.sidx(h, x, a)];
                for (int y = 0; y < X; ++y) qa += p[y] * vprev[y];
                if (qa > best) {
                    best = qa;
                    best_a = a;
                }
            }
            v[x] = best;
            double* row = greedy.row(h, x);
            std::fill(row, row + A, 0.0);
            row[best_a] = 1.0;
        }
    }
    return {v[cmdp.initial_state], greedy};
}

CmdpSolution solve_cmdp_lp(const TabularCmdp& cmdp) {
    const int H = cmdp.horizon, X = cmdp.num_states, A = cmdp.num_actions;
    const int N = cmdp.num_constraints;
    const int nv = H * X * A;

    LpProblem lp;
    lp.num_vars = nv;
    lp.objective.assign(cmdp.rewards[0].begin(), cmdp.rewards[0].end());

    auto vidx = [X, A](int h, int x, int a) {
        return (h * X + x) * A + a;
    };

    // Initial mass: sum_a w_0(x, a) = 1{x = x1}.
    for (int x = 0; x < X; ++x) {
        LpProblem::Row row;
        row.coeffs.assign(nv, 0.0);
        for (int a = 0; a < A; ++a) row.coeffs[vidx(0, x, a)] = 1.0;
        row.rhs = x == cmdp.initial_state ? 1.0 : 0.0;
        row.type = LpProblem::RowType::Equality;
        lp.rows.push_back(std::move(row));
    }
    // Flow conservation: sum_a w_{h}(y, a) = sum_{x,a} w_{h-1}(x, a) P_{h-1}(y|x, a).
    for (int h = 1; h < H; ++h)
        for (int y = 0; y < X; ++y) {
            LpProblem::Row row;
            row.coeffs.assign(nv, 0.0);
            for (int a = 0; a < A; ++a) row.coeffs[vidx(h, y, a)] = 1.0;
            for (int x = 0; x < X; ++x)
                for (int a = 0; a < A; ++a)
                    row.coeffs[vidx(h - 1, x, a)] -= cmdp.kernel[cmdp.kidx(h - 1, x, a, y)];
            row.rhs = 0.0;
            row.type = LpProblem::RowType::Equality;
            lp.rows.push_back(std::move(row));
        }
    // Constraint returns: sum w r^n >= b^n.
    for (int n = 1; n <= N; ++n) {
        LpProblem::Row row;
        row.coeffs.assign(cmdp.rewards[n].begin(), cmdp.rewards[n].end());
        row.rhs = cmdp.thresholds[n - 1];
        row.type = LpProblem::RowType::GreaterEqual;
        lp.rows.push_back(std::move(row));
    }

    LpResult res = solve_lp(lp);
    if (res.status == LpResult::Status::Infeasible)
        throw InfeasibleError("solve_cmdp_lp: no feasible occupancy measure");
    if (res.status != LpResult::Status::Optimal)
        throw std::runtime_error("solve_cmdp_lp: simplex iteration limit reached");

    CmdpSolution sol;
    sol.value = res.value;
    sol.occupancy.horizon = H;
    sol.occupancy.num_states = X;
    sol.occupancy.num_actions = A;
    sol.occupancy.w.resize(nv);
    for (int i = 0; i < nv; ++i) sol.occupancy.w[i] = std::max(res.x[i], 0.0);

    sol.policy = Policy::uniform(H, X, A);
    for (int h = 0; h < H; ++h)
        for (int x = 0; x < X; ++x) {
            double mass = 0.0;
            for (int a = 0; a < A; ++a) mass += sol.occupancy.at(h, x, a);
            if (mass <= 1e-12) continue;  // unreached: keep uniform row
            double* row = sol.policy.row(h, x);
            for (int a = 0; a < A; ++a) row[a] = sol.occupancy.at(h, x, a) / mass;
        }
    return sol;
}

double brute_force_constrained_opt(const TabularCmdp& cmdp) {
    const int H = cmdp.horizon, X = cmdp.num_states, A = cmdp.num_actions;
    const int N = cmdp.num_constraints;
    if (N > 1)
        throw std::invalid_argument("brute_force_constrained_opt: only N <= 1 supported");
    const int cells = H * X;
    double total = std::pow(static_cast<double>(A), cells);
    if (total > 1e6)
        throw std::invalid_argument("brute_force_constrained_opt: instance too large");
    const long count = static_cast<long>(total);

    std::vector<double> v0(count), v1(N == 1 ? count : 0);
    Policy pol = Policy::uniform(H, X, A);
    for (long idx = 0; idx < count; ++idx) {
        long rem = idx;
        for (int c = 0; c < cells; ++c) {
            int a = static_cast<int>(rem % A);
            rem /= A;
            double* row = pol.probs.data() + static_cast<std::size_t>(c) * A;
            std::fill(row, row + A, 0.0);
            row[a] = 1.0;
        }
        OccupancyMeasure w = occupancy(cmdp, pol);
        v0[idx] = value_from_occupancy(w, cmdp.rewards[0]);
        if (N == 1) v1[idx] = value_from_occupancy(w, cmdp.rewards[1]);
    }

    if (N == 0) return *std::max_element(v0.begin(), v0.end());

    const double b = cmdp.thresholds[0];
    double best = -1e300;
    bool feasible = false;
    for (long i = 0; i < count; ++i)
        if (v1[i] >= b - 1e-12) {
            feasible = true;
            best = std::max(best, v0[i]);
        }
    // A binding optimum sits on an edge of the occupancy polytope: a mixture
    // of two deterministic policies with the constraint exactly tight.
    for (long i = 0; i < count; ++i)
        for (long j = 0; j < count; ++j) {
            if (!(v1[i] > b && v1[j] < b)) continue;
            double alpha = (b - v1[j]) / (v1[i] - v1[j]);
            feasible = true;
            best = std::max(best, alpha * v0[i] + (1.0 - alpha) * v0[j]);
        }
    if (!feasible)
        throw InfeasibleError("brute_force_constrained_opt: no feasible policy");
    return best;
}

double slater_gap(const TabularCmdp& cmdp) {
    if (cmdp.num_constraints != 1)
        throw std::invalid_argument("slater_gap: exactly one constraint expected");
    double gap = unconstrained_max(cmdp, 1).first - cmdp.thresholds[0];
    if (gap <= 0.0) throw InfeasibleError("slater_gap: no Slater point");
    return gap;
}

double regularized_lagrangian(const TabularCmdp& cmdp, const Policy& policy,
                              const std::vector<double>& lambda, double tau) {
    if (static_cast<int>(lambda.size()) != cmdp.num_constraints)
        throw std::invalid_argument("regularized_lagrangian: lambda size mismatch");
    double l = eval_policy_exact(cmdp, 0, policy, tau).initial_value(cmdp);
    double norm2 = 0.0;
    for (int n = 0; n < cmdp.num_constraints; ++n) {
        double vn = eval_policy_exact(cmdp, n + 1, policy, 0.0).initial_value(cmdp);
        l += lambda[n] * (vn - cmdp.thresholds[n]);
        norm2 += lambda[n] * lambda[n];
    }
    return l + 0.5 * tau * norm2;
}

SaddlePoint regularized_saddle(const TabularCmdp& cmdp, double tau, long max_iterations,
                               double tolerance) {
    if (tau <= 0.0)
        throw std::invalid_argument("regularized_saddle: tau must be positive");
    const double gap = slater_gap(cmdp);
    const int N = cmdp.num_constraints;
    const double cap = cmdp.horizon *
                       (1.0 + tau * std::log(static_cast<double>(cmdp.num_actions))) / gap;
    // Fixed step keeps the exact-model iteration a contraction; eta tau < 1.
    const double eta = std::min(0.2, 0.5 / tau);

    Policy pi = Policy::uniform(cmdp.horizon, cmdp.num_states, cmdp.num_actions);
    std::vector<double> lambda(N, 0.0);

    long iter = 0;
    for (; iter < max_iterations; ++iter) {
        ValueTables q0 = eval_policy_exact(cmdp, 0, pi, tau);
        std::vector<double> q = q0.q;
        std::vector<double> vn(N);
        for (int n = 0; n < N; ++n) {
            ValueTables t = eval_policy_exact(cmdp, n + 1, pi, 0.0);
            vn[n] = t.initial_value(cmdp);
            for (std::size_t i = 0; i < q.size(); ++i) q[i] += lambda[n] * t.q[i];
        }
        Policy next = policy_mirror_step(pi, q, eta, tau);
        double change = 0.0;
        for (std::size_t i = 0; i < pi.probs.size(); ++i)
            change = std::max(change, std::abs(next.probs[i] - pi.probs[i]));
        for (int n = 0; n < N; ++n) {
            double l = std::clamp(
                lambda[n] + eta * (cmdp.thresholds[n] - vn[n] - tau * lambda[n]), 0.0, cap);
            change = std::max(change, std::abs(l - lambda[n]));
            lambda[n] = l;
        }
        pi = std::move(next);
        if (change < tolerance) break;
    }
    if (iter >= max_iterations)
        throw std::runtime_error("regularized_saddle: no convergence within budget");

    SaddlePoint sp;
    sp.lagrangian = regularized_lagrangian(cmdp, pi, lambda, tau);
    sp.policy = std::move(pi);
    sp.lambda = std::move(lambda);
    sp.iterations = static_cast<int>(iter + 1);
    return sp;
}

}  // namespace cmdplab
