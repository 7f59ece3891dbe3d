#include "cmdplab/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace cmdplab {

namespace {

constexpr double kEps = 1e-9;

class Tableau {
public:
    Tableau(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}
    double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    void pivot(int pr, int pc) {
        double piv = at(pr, pc);
        for (int c = 0; c < cols_; ++c) at(pr, c) /= piv;
        for (int r = 0; r < rows_; ++r) {
            if (r == pr) continue;
            double f = at(r, pc);
            if (f == 0.0) continue;
            for (int c = 0; c < cols_; ++c) at(r, c) -= f * at(pr, c);
        }
    }

private:
    int rows_, cols_;
    std::vector<double> data_;
};

// Runs simplex iterations on a tableau whose last row holds reduced costs
// (minimization) and last column the rhs. Returns false on iteration limit.
bool iterate(Tableau& t, std::vector<int>& basis, int num_cols_usable) {
    const int m = t.rows() - 1;
    const int obj = m;
    const int rhs = t.cols() - 1;
    bool bland = false;
    int degenerate_run = 0;
    long iters = 0;
    const long max_iters = 200000L + 50L * static_cast<long>(m) * num_cols_usable;

    for (;;) {
        if (++iters > max_iters) return false;
        int pc = -1;
        if (bland) {
            for (int c = 0; c < num_cols_usable; ++c)
                if (t.at(obj, c) < -kEps) { pc = c; break; }
        } else {
            double best = -kEps;
            for (int c = 0; c < num_cols_usable; ++c)
                if (t.at(obj, c) < best) { best = t.at(obj, c); pc = c; }
        }
        if (pc < 0) return true;  // optimal

        int pr = -1;
        double best_ratio = 0.0;
        for (int r = 0; r < m; ++r) {
            double a = t.at(r, pc);
            if (a > kEps) {
                double ratio = t.at(r, rhs) / a;
                if (pr < 0 || ratio < best_ratio - kEps ||
                    (bland && std::abs(ratio - best_ratio) <= kEps && basis[r] < basis[pr])) {
                    pr = r;
                    best_ratio = ratio;
                }
            }
        }
        if (pr < 0)
            throw std::runtime_error("simplex: unbounded problem");

        if (best_ratio < kEps) {
            if (++degenerate_run > 2 * m + 20) bland = true;
        } else {
            degenerate_run = 0;
        }
        t.pivot(pr, pc);
        basis[pr] = pc;
    }
}

}  // namespace

LpResult solve_lp(const LpProblem& problem) {
    const int n = problem.num_vars;
    const int m = static_cast<int>(problem.rows.size());
    if (static_cast<int>(problem.objective.size()) != n)
        throw std::invalid_argument("solve_lp: objective size mismatch");

    int num_surplus = 0;
    for (const auto& row : problem.rows)
        if (row.type == LpProblem::RowType::GreaterEqual) ++num_surplus;

    // Columns: structural | surplus | artificial | rhs.
    const int art0 = n + num_surplus;
    const int total = art0 + m;
    Tableau t(m + 1, total + 1);
    std::vector<int> basis(m);

    int s = 0;
    for (int r = 0; r < m; ++r) {
        const auto& row = problem.rows[r];
        if (static_cast<int>(row.coeffs.size()) != n)
            throw std::invalid_argument("solve_lp: row size mismatch");
        double sign = row.rhs < 0.0 ? -1.0 : 1.0;
        for (int c = 0; c < n; ++c) t.at(r, c) = sign * row.coeffs[c];
        if (row.type == LpProblem::RowType::GreaterEqual) {
            t.at(r, n + s) = -sign;
            ++s;
        }
        t.at(r, art0 + r) = 1.0;
        t.at(r, total) = sign * row.rhs;
        basis[r] = art0 + r;
    }

    // Phase 1: minimize sum of artificials.
    for (int r = 0; r < m; ++r)
        for (int c = 0; c <= total; ++c) t.at(m, c) -= t.at(r, c);
    for (int r = 0; r < m; ++r) t.at(m, art0 + r) = 0.0;

    LpResult res;
    if (!iterate(t, basis, art0)) {
        res.status = LpResult::Status::IterationLimit;
        return res;
    }
    if (t.at(m, total) < -1e-7) {
        res.status = LpResult::Status::Infeasible;
        return res;
    }

    // Drive residual artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
        if (basis[r] < art0) continue;
        int pc = -1;
        for (int c = 0; c < art0; ++c)
            if (std::abs(t.at(r, c)) > kEps) { pc = c; break; }
        if (pc >= 0) {
            t.pivot(r, pc);
            basis[r] = pc;
        }
        // A fully zero row is redundant; its artificial stays basic at zero.
    }

    // Phase 2: minimize -c'x.
    for (int c = 0; c <= total; ++c) t.at(m, c) = 0.0;
    for (int c = 0; c < n; ++c) t.at(m, c) = -problem.objective[c];
    for (int r = 0; r < m; ++r) {
        if (basis[r] >= art0) continue;
        double f = t.at(m, basis[r]);
        if (f == 0.0) continue;
        for (int c = 0; c <= total; ++c) t.at(m, c) -= f * t.at(r, c);
    }
    if (!iterate(t, basis, art0)) {
        res.status = LpResult::Status::IterationLimit;
        return res;
    }

    res.status = LpResult::Status::Optimal;
    res.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
        if (basis[r] < n) res.x[basis[r]] = t.at(r, total);
    res.value = 0.0;
    for (int c = 0; c < n; ++c) res.value += problem.objective[c] * res.x[c];
    return res;
}

}  // namespace cmdplab
