#include "trapforge/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace trapforge {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LpResult solve_bounded_lp(const LpProblem& problem, const LpOptions& opts) {
    const int m = static_cast<int>(problem.A.rows());
    const int n = static_cast<int>(problem.A.cols());
    if (problem.rhs.size() != m || problem.c.size() != n || problem.lower.size() != n ||
        problem.upper.size() != n) {
        throw std::invalid_argument("inconsistent LP dimensions");
    }
    if (m > 0 && problem.rhs.lpNorm<Eigen::Infinity>() != 0.0) {
        throw std::invalid_argument("solver requires a homogeneous right-hand side");
    }
    for (int j = 0; j < n; ++j) {
        if (problem.lower[j] > 0.0 || problem.upper[j] < 0.0 ||
            problem.lower[j] > problem.upper[j]) {
            throw std::invalid_argument("solver requires 0 within the variable bounds");
        }
    }

    const int total = n + m;  // structural + artificial
    auto col_lower = [&](int j) { return j < n ? problem.lower[j] : 0.0; };
    auto col_upper = [&](int j) { return j < n ? problem.upper[j] : 0.0; };
    auto col_cost = [&](int j) { return j < n ? problem.c[j] : 0.0; };
    auto column = [&](int j) -> Eigen::VectorXd {
        if (j < n) return problem.A.col(j);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e[j - n] = 1.0;
        return e;
    };

    Eigen::VectorXd x = Eigen::VectorXd::Zero(total);
    std::vector<int> basis(static_cast<size_t>(m));
    std::vector<bool> in_basis(static_cast<size_t>(total), false);
    // nonbasic rest position: true = at upper bound (free variables rest at 0)
    std::vector<bool> at_upper(static_cast<size_t>(total), false);
    for (int i = 0; i < m; ++i) {
        basis[static_cast<size_t>(i)] = n + i;
        in_basis[static_cast<size_t>(n + i)] = true;
    }

    LpResult out;
    Eigen::MatrixXd B(m, m);
    Eigen::VectorXd cb(m), xb(m), y(m), w(m);
    bool bland = false;
    int stall = 0;
    int bland_entries = 0;
    double last_objective = 0.0;

    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        for (int i = 0; i < m; ++i) B.col(i) = column(basis[static_cast<size_t>(i)]);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);

        // refresh basic values from the nonbasic rest points
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
        for (int j = 0; j < total; ++j) {
            if (!in_basis[static_cast<size_t>(j)] && x[j] != 0.0) v -= column(j) * x[j];
        }
        xb = lu.solve(v);
        for (int i = 0; i < m; ++i) x[basis[static_cast<size_t>(i)]] = xb[i];

        for (int i = 0; i < m; ++i) cb[i] = col_cost(basis[static_cast<size_t>(i)]);
        y = lu.transpose().solve(cb);

        // pricing: dual violation per nonbasic variable
        int enter = -1;
        double enter_dir = 0.0, best_score = 0.0;
        double gap = 0.0;
        for (int j = 0; j < total; ++j) {
            if (in_basis[static_cast<size_t>(j)]) continue;
            const double lo = col_lower(j), hi = col_upper(j);
            if (lo == hi) continue;  // fixed (artificials)
            const double d = col_cost(j) - (j < n ? y.dot(problem.A.col(j)) : y[j - n]);
            const bool free_var = std::isinf(lo) && std::isinf(hi);
            double viol = 0.0, dir = 0.0;
            if (free_var) {
                viol = std::abs(d);
                dir = d >= 0 ? 1.0 : -1.0;
            } else if (!at_upper[static_cast<size_t>(j)]) {
                viol = std::max(d, 0.0);
                dir = 1.0;
            } else {
                viol = std::max(-d, 0.0);
                dir = -1.0;
            }
            if (viol > 0.0 && std::isfinite(hi - lo)) gap += viol * (hi - lo);
            if (viol > opts.opt_tol) {
                if (bland) {
                    if (enter < 0) {
                        enter = j;
                        enter_dir = dir;
                    }
                } else if (viol > best_score) {
                    best_score = viol;
                    enter = j;
                    enter_dir = dir;
                }
            }
        }
        if (enter < 0) {
            out.status = LpStatus::Optimal;
            out.gap_certificate = gap;
            break;
        }

        w = lu.solve(column(enter));

        // admissible step along the entering direction
        double t_own = kInf;
        if (enter_dir > 0 && std::isfinite(col_upper(enter)))
            t_own = col_upper(enter) - x[enter];
        else if (enter_dir < 0 && std::isfinite(col_lower(enter)))
            t_own = x[enter] - col_lower(enter);

        double t_basic = kInf;
        for (int i = 0; i < m; ++i) {
            const int bj = basis[static_cast<size_t>(i)];
            const double rate = -enter_dir * w[i];
            double t;
            if (rate > opts.pivot_tol) {
                const double hi = col_upper(bj);
                if (!std::isfinite(hi)) continue;
                t = (hi - x[bj]) / rate;
            } else if (rate < -opts.pivot_tol) {
                const double lo = col_lower(bj);
                if (!std::isfinite(lo)) continue;
                t = (x[bj] - lo) / (-rate);
            } else {
                continue;
            }
            t_basic = std::min(t_basic, std::max(t, 0.0));
        }

        if (std::isinf(t_own) && std::isinf(t_basic)) {
            out.status = LpStatus::Unbounded;
            break;
        }

        const double t_star = std::min(t_own, t_basic);
        if (t_star <= opts.feas_tol) {
            ++stall;
            ++out.degenerate_iterations;
            if (!bland && stall > opts.bland_after) {
                bland = true;
                ++bland_entries;
            }
        } else {
            stall = 0;
        }

        if (t_own <= t_basic) {
            // bound flip, no basis change
            x[enter] += enter_dir * t_own;
            at_upper[static_cast<size_t>(enter)] = enter_dir > 0;
            continue;
        }

        // choose the leaving row among the blocking ties
        int leave = -1;
        double best_rate = 0.0;
        for (int i = 0; i < m; ++i) {
            const int bj = basis[static_cast<size_t>(i)];
            const double rate = -enter_dir * w[i];
            double t;
            if (rate > opts.pivot_tol) {
                const double hi = col_upper(bj);
                if (!std::isfinite(hi)) continue;
                t = (hi - x[bj]) / rate;
            } else if (rate < -opts.pivot_tol) {
                const double lo = col_lower(bj);
                if (!std::isfinite(lo)) continue;
                t = (x[bj] - lo) / (-rate);
            } else {
                continue;
            }
            if (std::max(t, 0.0) > t_star + opts.feas_tol) continue;
            if (leave < 0) {
                leave = i;
                best_rate = rate;
            } else if (bland) {
                if (bj < basis[static_cast<size_t>(leave)]) {
                    leave = i;
                    best_rate = rate;
                }
            } else if (std::abs(w[i]) > std::abs(w[leave])) {
                leave = i;
                best_rate = rate;
            }
        }
        if (leave < 0) {
            // all blockers vanished at tolerance; treat as degenerate flip
            x[enter] += enter_dir * t_star;
            at_upper[static_cast<size_t>(enter)] = enter_dir > 0;
            continue;
        }

        x[enter] += enter_dir * t_star;
        for (int i = 0; i < m; ++i) {
            const int bj = basis[static_cast<size_t>(i)];
            if (bj != enter) x[bj] -= enter_dir * t_star * w[i];
        }
        const int out_var = basis[static_cast<size_t>(leave)];
        in_basis[static_cast<size_t>(out_var)] = false;
        at_upper[static_cast<size_t>(out_var)] = best_rate > 0;
        x[out_var] = best_rate > 0 ? col_upper(out_var) : col_lower(out_var);
        basis[static_cast<size_t>(leave)] = enter;
        in_basis[static_cast<size_t>(enter)] = true;

        double objective = 0.0;
        for (int j = 0; j < n; ++j) objective += problem.c[j] * x[j];
        if (objective > last_objective + opts.feas_tol) {
            last_objective = objective;
            // Bland's rule stays on for good after repeated stalls
            if (bland && bland_entries < 3) {
                bland = false;
                stall = 0;
            }
        }
    }
    if (iter >= opts.max_iterations) out.status = LpStatus::IterationLimit;

    out.iterations = iter;
    out.x = x.head(n);
    out.objective = problem.c.dot(out.x);
    out.basis = basis;
    out.basic.assign(static_cast<size_t>(n), false);
    for (int i = 0; i < m; ++i) {
        const int bj = basis[static_cast<size_t>(i)];
        if (bj < n) out.basic[static_cast<size_t>(bj)] = true;
    }
    return out;
}

}  // namespace trapforge
