#pragma once

#include <vector>

namespace cmdplab {

/// Dense LP in the form
///   maximize c'x  s.t.  equality rows A x = b, inequality rows A x >= b, x >= 0.
struct LpProblem {
    enum class RowType { Equality, GreaterEqual };
    struct Row {
        std::vector<double> coeffs;
        double rhs;
        RowType type;
    };
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<Row> rows;
};

struct LpResult {
    enum class Status { Optimal, Infeasible, IterationLimit };
    Status status = Status::Infeasible;
    double value = 0.0;
    std::vector<double> x;
};

/// Two-phase dense tableau simplex. Dantzig pricing with a permanent switch
/// to Bland's rule after a run of degenerate pivots, which guarantees
/// termination.
LpResult solve_lp(const LpProblem& problem);

}  // namespace cmdplab
