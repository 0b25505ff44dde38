#ifndef TRAPFORGE_LP_HPP
#define TRAPFORGE_LP_HPP

#include <Eigen/Dense>
#include <vector>

namespace trapforge {

/// Bounded-variable linear program
///     maximize c.x   subject to   A x = rhs,   lower <= x <= upper,
/// solved with a dense revised simplex over an artificial identity
/// basis. The solver requires rhs = 0 with 0 inside the bounds (x = 0 is
/// then a basic feasible start), which holds for every system assembled
/// here because the trap conditions are homogeneous in (a, C).
/// Bounds may be +-infinity; variables with lower == upper are fixed.
struct LpProblem {
    Eigen::MatrixXd A;
    Eigen::VectorXd rhs;
    Eigen::VectorXd c;
    Eigen::VectorXd lower, upper;
};

enum class LpStatus { Optimal, Unbounded, IterationLimit };

struct LpOptions {
    double opt_tol = 1e-9;     // reduced-cost threshold
    double pivot_tol = 1e-10;  // minimum pivot magnitude
    double feas_tol = 1e-9;
    int max_iterations = 200000;
    int bland_after = 100;  // consecutive degenerate pivots before Bland's rule
};

struct LpResult {
    LpStatus status = LpStatus::Optimal;
    Eigen::VectorXd x;  // structural variables only
    double objective = 0.0;
    int iterations = 0;
    int degenerate_iterations = 0;
    /// sum of complementarity violations over finite-range nonbasic
    /// variables at termination (certifies the objective when Optimal)
    double gap_certificate = 0.0;
    std::vector<int> basis;         // basic variable per row (may include artificials >= n)
    std::vector<bool> basic;        // per structural variable
};

LpResult solve_bounded_lp(const LpProblem& problem, const LpOptions& opts = {});

}  // namespace trapforge

#endif
