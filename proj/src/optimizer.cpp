#include "trapforge/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "trapforge/lp.hpp"

namespace trapforge {

RailStats rail_stats(const Eigen::VectorXd& a, double rail_tol) {
    RailStats s;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] <= rail_tol)
            ++s.at_zero;
        else if (a[i] >= 1.0 - rail_tol)
            ++s.at_one;
        else
            ++s.interior;
    }
    return s;
}

InhomResult inhomogeneous_solution(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   double rank_tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double cutoff = sigma.size() > 0 ? rank_tol * sigma[0] : 0.0;
    Eigen::VectorXd inv(sigma.size());
    InhomResult out;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma[i] > cutoff && sigma[i] > 0.0) {
            inv[i] = 1.0 / sigma[i];
            ++out.effective_rank;
        } else {
            inv[i] = 0.0;
            ++out.truncated;
        }
    }
    out.g = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * b;
    return out;
}

OptimizationResult solve(const ConstraintSystem& system, const SolverOptions& opts) {
    const int m_eq = system.equality_rows();
    const int n_ineq = static_cast<int>(system.inequalities.size());
    const int N = static_cast<int>(system.A.cols());
    const double inf = std::numeric_limits<double>::infinity();

    // row equilibration keeps pivot tolerances meaningful across the
    // disparate magnitudes of field and curvature rows
    Eigen::VectorXd row_scale(m_eq);
    for (int r = 0; r < m_eq; ++r) {
        const double mag = system.A.row(r).lpNorm<Eigen::Infinity>();
        row_scale[r] = mag > 0.0 ? 1.0 / mag : 1.0;
    }

    const int m = m_eq + n_ineq;
    const int n_var = N + 1 + n_ineq;  // amplitudes, C, slacks
    LpProblem lp;
    lp.A = Eigen::MatrixXd::Zero(m, n_var);
    lp.rhs = Eigen::VectorXd::Zero(m);
    lp.c = Eigen::VectorXd::Zero(n_var);
    lp.lower = Eigen::VectorXd::Zero(n_var);
    lp.upper = Eigen::VectorXd::Zero(n_var);
    for (int j = 0; j < N; ++j) {
        lp.lower[j] = 0.0;
        lp.upper[j] = 1.0;
    }
    lp.lower[N] = -inf;
    lp.upper[N] = inf;
    lp.c[N] = 1.0;

    for (int r = 0; r < m_eq; ++r) {
        lp.A.row(r).head(N) = system.A.row(r) * row_scale[r];
        lp.A(r, N) = -system.b[r] * row_scale[r];
    }
    for (int k = 0; k < n_ineq; ++k) {
        const auto& iq = system.inequalities[static_cast<size_t>(k)];
        const double mag = iq.coeffs.lpNorm<Eigen::Infinity>();
        const double s = mag > 0.0 ? 1.0 / mag : 1.0;
        const int r = m_eq + k;
        lp.A.row(r).head(N) = iq.coeffs.transpose() * s;
        lp.A(r, N) = -iq.lambda * s;
        // row . a - lambda C +/- slack = 0 with slack >= 0
        lp.A(r, N + 1 + k) = iq.relation == Relation::AtMost ? 1.0 : -1.0;
        lp.lower[N + 1 + k] = 0.0;
        lp.upper[N + 1 + k] = inf;
    }

    LpOptions lp_opts;
    lp_opts.opt_tol = opts.gap_tol;
    lp_opts.max_iterations = opts.max_iterations;
    LpResult sol = solve_bounded_lp(lp, lp_opts);
    if (sol.status == LpStatus::Unbounded) {
        throw std::runtime_error(
            "linear program reported unbounded: impossible for boxed amplitudes with b != 0 "
            "(internal error)");
    }
    if (sol.status == LpStatus::IterationLimit) {
        throw std::runtime_error("linear program hit the iteration limit (" +
                                 std::to_string(sol.iterations) + " iterations)");
    }

    OptimizationResult out;
    out.a = sol.x.head(N);
    out.C = sol.x[N];
    out.iterations = sol.iterations;
    out.gap_certificate = sol.gap_certificate;
    // clamp solver noise into the box
    for (int j = 0; j < N; ++j) out.a[j] = std::clamp(out.a[j], 0.0, 1.0);

    const double b_scale = system.b.lpNorm<Eigen::Infinity>();
    if (std::abs(out.C) < 1e-12 * (1.0 + b_scale)) {
        throw std::runtime_error(
            "optimal scale C is zero: the constraint system admits no nontrivial solution "
            "(contradictory extra constraints or infeasible trap layout)");
    }

    out.residual = (system.A * out.a - out.C * system.b).lpNorm<Eigen::Infinity>();
    const double residual_limit = opts.equality_tol * (1.0 + std::abs(out.C) * b_scale);
    if (out.residual > 100.0 * residual_limit) {
        throw std::runtime_error("constraint residual " + std::to_string(out.residual) +
                                 " exceeds tolerance; the solve is numerically unreliable");
    }
    out.railing = rail_stats(out.a, opts.rail_tol);

    InhomResult inhom = inhomogeneous_solution(system.A, system.b, opts.rank_tol);
    out.inhom = std::move(inhom.g);
    out.effective_rank = inhom.effective_rank;
    out.rank_truncated = inhom.truncated;

    const double g2 = out.inhom.squaredNorm();
    out.rounded_a.resize(N);
    for (int j = 0; j < N; ++j) out.rounded_a[j] = out.a[j] > opts.round_threshold ? 1.0 : 0.0;
    out.C_rounded = g2 > 0.0 ? out.rounded_a.dot(out.inhom) / g2 : 0.0;
    return out;
}

RoundReport round_rails(const OptimizationResult& result, const FourierBasis& basis,
                        const std::vector<TrapSpec>& traps, double threshold) {
    RoundReport report;
    const Eigen::Index N = result.a.size();
    report.a.resize(N);
    for (Eigen::Index j = 0; j < N; ++j) report.a[j] = result.a[j] > threshold ? 1.0 : 0.0;
    const double g2 = result.inhom.squaredNorm();
    report.C_rounded = g2 > 0.0 ? report.a.dot(result.inhom) / g2 : 0.0;

    const PotentialField field = make_field(basis, report.a);
    for (const TrapSpec& trap : traps) {
        const FieldSample s = field.sample(trap.cartesian(basis.lattice()));
        RoundDelta d;
        d.label = trap.label;
        d.field_residual = s.gradient.norm();
        const double scale =
            std::abs(report.C_rounded) * trap.gamma.norm() * trap.position.z();
        d.field_residual_scaled = scale > 0.0 ? d.field_residual / scale : d.field_residual;
        const Mat3 target = report.C_rounded * trap.gamma;
        const double tn = target.norm();
        d.curvature_deviation = tn > 0.0 ? (s.hessian - target).norm() / tn : s.hessian.norm();
        report.per_trap.push_back(std::move(d));
    }
    return report;
}

}  // namespace trapforge
