#include "trapforge/constraints.hpp"

#include <cmath>
#include <stdexcept>

#include "trapforge/parallel.hpp"

namespace trapforge {

void TrapSpec::validate() const {
    if (!(position.z() > 0.0)) {
        throw std::invalid_argument("trap '" + label + "': height z must be positive");
    }
    const double fro = gamma.norm();
    if (fro <= 0.0) {
        throw std::invalid_argument("trap '" + label + "': curvature tensor is zero");
    }
    if ((gamma - gamma.transpose()).norm() > 1e-12 * fro) {
        throw std::invalid_argument("trap '" + label + "': curvature tensor must be symmetric");
    }
    if (std::abs(gamma.trace()) > 1e-10 * fro) {
        throw std::invalid_argument("trap '" + label + "': curvature tensor must be traceless");
    }
}

Vec3 TrapSpec::cartesian(const BravaisLattice& lattice) const {
    const Vec2 xy = lattice.frac_to_cart(Vec2(position.x(), position.y()));
    return Vec3(xy.x(), xy.y(), position.z());
}

Mat3 curvature_from_frequencies(const Vec3& ratios, const Mat3& axes) {
    if (!(ratios.minCoeff() > 0.0)) {
        throw std::invalid_argument("frequency ratios must be strictly positive");
    }
    if ((axes.transpose() * axes - Mat3::Identity()).norm() > 1e-9) {
        throw std::invalid_argument("axes must be orthonormal");
    }
    const double total = ratios.sum();
    for (int bits = 0; bits < 8; ++bits) {
        Vec3 signs((bits & 4) ? 1.0 : -1.0, (bits & 2) ? 1.0 : -1.0, (bits & 1) ? 1.0 : -1.0);
        const Vec3 eig = signs.cwiseProduct(ratios);
        if (std::abs(eig.sum()) < 1e-9 * total) {
            const Vec3 scaled = eig / eig.cwiseAbs().maxCoeff();
            Mat3 gamma = axes * scaled.asDiagonal() * axes.transpose();
            // symmetrize away rounding from the similarity transform
            gamma = 0.5 * (gamma + gamma.transpose());
            gamma -= Mat3::Identity() * (gamma.trace() / 3.0);
            return gamma;
        }
    }
    throw std::invalid_argument(
        "frequency ratios admit no traceless curvature tensor (no sign assignment of "
        "+-ratios sums to zero)");
}

namespace {

Eigen::VectorXd row_for(const FourierBasis& basis, const Vec3& cart, Deriv which,
                        const AssembleOptions& opts) {
    return evaluate_row(basis, cart, which, opts.mode_prune_tol);
}

}  // namespace

ConstraintSystem assemble(const FourierBasis& basis, const std::vector<TrapSpec>& traps,
                          const std::vector<ExtraConstraint>& extras,
                          const AssembleOptions& opts) {
    if (traps.empty()) {
        throw std::invalid_argument("at least one trap is required");
    }
    const auto& lattice = basis.lattice();
    for (const TrapSpec& t : traps) t.validate();
    for (size_t i = 0; i < traps.size(); ++i) {
        for (size_t j = i + 1; j < traps.size(); ++j) {
            const Vec3 pi = traps[i].cartesian(lattice), pj = traps[j].cartesian(lattice);
            const double d2 = lattice.min_image_distance(pi.head<2>(), pj.head<2>());
            if (std::hypot(d2, pi.z() - pj.z()) < 1e-9) {
                throw std::invalid_argument("traps '" + traps[i].label + "' and '" +
                                            traps[j].label + "' coincide");
            }
        }
    }

    // gamma scale is absorbed into C; normalize to max |eigenvalue| = 1
    // so reported C values are comparable across runs
    std::vector<TrapSpec> normalized = traps;
    for (TrapSpec& t : normalized) {
        Eigen::SelfAdjointEigenSolver<Mat3> eig(t.gamma);
        t.gamma /= eig.eigenvalues().cwiseAbs().maxCoeff();
    }

    const int M = static_cast<int>(traps.size());
    int extra_eq = 0;
    for (const auto& e : extras) {
        if (e.relation == Relation::Equal) ++extra_eq;
    }
    const int n_rows = 8 * M + extra_eq;
    const int N = basis.grid().num_patches();

    ConstraintSystem sys;
    sys.trap_count = M;
    sys.traps = normalized;
    sys.A.resize(n_rows, N);
    sys.b.resize(n_rows);
    sys.rows.resize(static_cast<size_t>(n_rows));

    static constexpr Deriv kOrder[8] = {Deriv::Ex,  Deriv::Ey,  Deriv::Ez,  Deriv::Hxx,
                                        Deriv::Hyy, Deriv::Hxy, Deriv::Hxz, Deriv::Hyz};
    static constexpr RowKind kKind[8] = {RowKind::FieldX, RowKind::FieldY, RowKind::FieldZ,
                                         RowKind::CurvXX, RowKind::CurvYY, RowKind::CurvXY,
                                         RowKind::CurvXZ, RowKind::CurvYZ};

    parallel_for(8 * M, [&](int r) {
        const int j = r / 8, c = r % 8;
        const TrapSpec& trap = normalized[static_cast<size_t>(j)];
        const Mat3& gamma = trap.gamma;
        const double rhs[8] = {0.0,         0.0,         0.0,         gamma(0, 0),
                               gamma(1, 1), gamma(0, 1), gamma(0, 2), gamma(1, 2)};
        sys.A.row(r) = row_for(basis, trap.cartesian(lattice), kOrder[c], opts).transpose();
        sys.b[r] = rhs[c];
        sys.rows[static_cast<size_t>(r)] = RowInfo{j, kKind[c]};
    });

    int r = 8 * M;
    for (const auto& e : extras) {
        const Vec2 xy = lattice.frac_to_cart(Vec2(e.point.x(), e.point.y()));
        const Vec3 cart(xy.x(), xy.y(), e.point.z());
        Eigen::VectorXd row = row_for(basis, cart, e.component, opts);
        if (e.relation == Relation::Equal) {
            sys.A.row(r) = row.transpose();
            sys.b[r] = e.lambda;
            sys.rows[static_cast<size_t>(r)] = RowInfo{-1, RowKind::Extra};
            ++r;
        } else {
            sys.inequalities.push_back(InequalityRow{std::move(row), e.relation, e.lambda});
        }
    }

    if (sys.b.lpNorm<Eigen::Infinity>() == 0.0) {
        throw std::invalid_argument(
            "all right-hand sides vanish: at least one target curvature component must be "
            "nonzero for the scale C to be defined");
    }
    return sys;
}

ConstraintSystem add_suppression(ConstraintSystem system, const FourierBasis& basis,
                                 const Vec3& point, Relation relation, double lambda,
                                 Deriv component, const AssembleOptions& opts) {
    const auto& lattice = basis.lattice();
    const Vec2 xy = lattice.frac_to_cart(Vec2(point.x(), point.y()));
    const Vec3 cart(xy.x(), xy.y(), point.z());
    for (const TrapSpec& t : system.traps) {
        const Vec3 tc = t.cartesian(lattice);
        const double dxy = lattice.min_image_distance(cart.head<2>(), tc.head<2>());
        if (std::hypot(dxy, cart.z() - tc.z()) < 1e-9) {
            throw std::invalid_argument("suppression point coincides with trap '" + t.label + "'");
        }
    }
    Eigen::VectorXd row = evaluate_row(basis, cart, component, opts.mode_prune_tol);
    if (relation == Relation::Equal) {
        const Eigen::Index r = system.A.rows();
        system.A.conservativeResize(r + 1, Eigen::NoChange);
        system.b.conservativeResize(r + 1);
        system.A.row(r) = row.transpose();
        system.b[r] = lambda;
        system.rows.push_back(RowInfo{-1, RowKind::Extra});
    } else {
        system.inequalities.push_back(InequalityRow{std::move(row), relation, lambda});
    }
    return system;
}

}  // namespace trapforge
