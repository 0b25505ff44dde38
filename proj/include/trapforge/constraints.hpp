#ifndef TRAPFORGE_CONSTRAINTS_HPP
#define TRAPFORGE_CONSTRAINTS_HPP

#include <string>
#include <vector>

#include "trapforge/field.hpp"

namespace trapforge {

/// One requested microtrap: an rf null at `position` with electric
/// potential curvature C * U_rf * gamma there. `position` holds
/// fractional in-plane coordinates plus the height z in L0 units;
/// `gamma` must be symmetric and traceless.
struct TrapSpec {
    Vec3 position = Vec3::Zero();  // (frac x, frac y, z)
    Mat3 gamma = Mat3::Zero();
    std::string label;

    void validate() const;  // throws std::invalid_argument on violation
    Vec3 cartesian(const BravaisLattice& lattice) const;
};

/// Traceless curvature tensor whose eigenvalue magnitudes are
/// proportional to the given pseudopotential frequency ratios, along the
/// given orthonormal axes (columns). Signs are the lexicographically
/// first assignment in {-1,+1}^3 with a vanishing trace; the result is
/// normalized to max |eigenvalue| = 1. Throws when no sign assignment
/// admits a traceless tensor.
Mat3 curvature_from_frequencies(const Vec3& ratios, const Mat3& axes = Mat3::Identity());

enum class Relation { Equal, AtLeast, AtMost };

/// Extra field constraint, e.g. pinning E_z at a spurious trap site to a
/// nonzero value. The right-hand side scales with the curvature scale C:
/// row . a (relation) lambda * C.
struct ExtraConstraint {
    Vec3 point = Vec3::Zero();  // (frac x, frac y, z)
    Deriv component = Deriv::Ez;
    Relation relation = Relation::Equal;
    double lambda = 0.0;
};

enum class RowKind : std::uint8_t {
    FieldX,
    FieldY,
    FieldZ,
    CurvXX,
    CurvYY,
    CurvXY,
    CurvXZ,
    CurvYZ,
    Extra,
    // extension hook: higher-order derivative rows (anharmonicity
    // control) are representable but not assembled
    HigherOrder
};

struct RowInfo {
    int trap = -1;  // -1 for extra rows
    RowKind kind = RowKind::Extra;
};

struct InequalityRow {
    Eigen::VectorXd coeffs;
    Relation relation = Relation::AtMost;
    double lambda = 0.0;
};

/// Linear system A . a = C b of the trap conditions: per trap, three
/// field rows (zero rhs) and five independent curvature rows
/// {xx, yy, xy, xz, yz} with rhs the gamma components (zz is implied by
/// tracelessness). Equality extras extend A and b; inequality extras are
/// kept apart. `traps` holds the specs with gamma normalized to
/// max |eigenvalue| = 1 (the scale is absorbed into C).
struct ConstraintSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<RowInfo> rows;
    std::vector<InequalityRow> inequalities;
    std::vector<TrapSpec> traps;
    int trap_count = 0;

    int equality_rows() const { return static_cast<int>(A.rows()); }
};

struct AssembleOptions {
    /// drop modes with exp(-|G| z) below this during row evaluation
    /// (constraint rows only; never applied to landscape analysis)
    double mode_prune_tol = 1e-14;
};

ConstraintSystem assemble(const FourierBasis& basis, const std::vector<TrapSpec>& traps,
                          const std::vector<ExtraConstraint>& extras = {},
                          const AssembleOptions& opts = {});

/// Append one suppression constraint to an assembled system.
/// Throws when the point coincides with a trap position.
ConstraintSystem add_suppression(ConstraintSystem system, const FourierBasis& basis,
                                 const Vec3& point, Relation relation, double lambda,
                                 Deriv component = Deriv::Ez,
                                 const AssembleOptions& opts = {});

}  // namespace trapforge

#endif
