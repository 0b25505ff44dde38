#ifndef TRAPFORGE_OPTIMIZER_HPP
#define TRAPFORGE_OPTIMIZER_HPP

#include <string>
#include <vector>

#include "trapforge/constraints.hpp"

namespace trapforge {

struct SolverOptions {
    double equality_tol = 1e-8;  // accepted residual of A a - C b
    double rail_tol = 1e-7;      // distance from 0/1 counted as railed
    double gap_tol = 1e-9;       // relative duality-gap tolerance
    double rank_tol = 1e-10;     // singular-value truncation, relative to sigma_max
    double round_threshold = 0.5;
    int max_iterations = 200000;
    bool require_basic = true;   // the simplex always returns a vertex
};

struct RailStats {
    int at_zero = 0;
    int at_one = 0;
    int interior = 0;
};

RailStats rail_stats(const Eigen::VectorXd& a, double rail_tol);

struct InhomResult {
    Eigen::VectorXd g;       // minimum-norm solution of A g = b
    int effective_rank = 0;  // singular values above rank_tol * sigma_max
    int truncated = 0;       // singular values dropped (rank-deficient constraints)
};

/// Minimum-norm solution of A g = b via the Moore-Penrose pseudoinverse;
/// g is orthogonal to the null space of A by construction.
InhomResult inhomogeneous_solution(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   double rank_tol = 1e-10);

struct OptimizationResult {
    Eigen::VectorXd a;  // optimal amplitudes in [0,1]
    double C = 0.0;     // optimized scale (max-C branch; the min branch is 1-a with -C)
    RailStats railing;
    double residual = 0.0;  // max |A a - C b|
    double gap_certificate = 0.0;
    int iterations = 0;
    Eigen::VectorXd inhom;  // g = A^+ b
    int effective_rank = 0;
    int rank_truncated = 0;
    Eigen::VectorXd rounded_a;  // rails rounded at the threshold
    double C_rounded = 0.0;     // (rounded_a . g) / |g|^2
};

/// Maximize |C| subject to A a = C b, 0 <= a <= 1 and the inequality
/// rows. Only the max-C branch is solved; the complement map a -> 1 - a
/// realizes the min branch with the same |C|.
/// Throws std::runtime_error when the constraints force C to zero
/// (contradictory extras) or the solver fails.
OptimizationResult solve(const ConstraintSystem& system, const SolverOptions& opts = {});

struct RoundDelta {
    std::string label;
    double field_residual = 0.0;         // |grad phi(r_j)| after rounding
    double field_residual_scaled = 0.0;  // in units of C * |Gamma|_F * z_j
    double curvature_deviation = 0.0;    // relative Frobenius deviation from C_rounded * Gamma_j
};

struct RoundReport {
    Eigen::VectorXd a;  // binary
    double C_rounded = 0.0;
    std::vector<RoundDelta> per_trap;
};

/// Round amplitudes to {0,1} (values at the threshold round down) and
/// re-evaluate the per-trap field and curvature deviations.
RoundReport round_rails(const OptimizationResult& result, const FourierBasis& basis,
                        const std::vector<TrapSpec>& traps, double threshold = 0.5);

}  // namespace trapforge

#endif
