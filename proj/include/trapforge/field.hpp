#ifndef TRAPFORGE_FIELD_HPP
#define TRAPFORGE_FIELD_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "trapforge/lattice.hpp"

namespace trapforge {

using Complex = std::complex<double>;

/// Table of reciprocal-lattice modes G = m1*g1 + m2*g2 with
/// |m1|, |m2| <= n_cut, ordered lexicographically in (m1, m2).
/// index(m1, m2) = (m1 + n_cut) * (2*n_cut + 1) + (m2 + n_cut), so the
/// Hermitian partner of mode k is size()-1-k.
struct ModeTable {
    int n_cut = 0;
    std::vector<std::array<int, 2>> index;  // (m1, m2)
    std::vector<Vec2> g;                    // Cartesian G
    std::vector<double> g_norm;             // |G|

    static ModeTable build(const BravaisLattice& lattice, int n_cut);
    int size() const { return static_cast<int>(g.size()); }
    int zero_index() const { return n_cut * (2 * n_cut + 1) + n_cut; }
};

/// Value, gradient and Hessian of the dimensionless potential at one
/// point (units U_rf, U_rf/L0, U_rf/L0^2). The Hessian is symmetric and
/// traceless (Laplace equation).
struct FieldSample {
    double value = 0.0;
    Vec3 gradient = Vec3::Zero();
    Mat3 hessian = Mat3::Zero();
};

enum class Deriv : std::uint8_t { Ex, Ey, Ez, Hxx, Hyy, Hxy, Hxz, Hyz };

/// (1/cell_area) * integral over `poly` of exp(-i G.r) d^2r, with `poly`
/// given in fractional coordinates of `lattice`. Closed-form edge sum;
/// exact for G = 0 (returns the area fraction).
Complex patch_fourier_coeff(const BravaisLattice& lattice, const Polygon& poly, const Vec2& G);

/// Closed-form Fourier integral of a Cartesian polygon: the edge-sum
/// formula for general convex polygons, and a separable two-sinc product
/// for parallelograms (used for oblique patch grids).
Complex polygon_fourier_integral(const std::vector<Vec2>& cart_vertices, const Vec2& k);
Complex parallelogram_fourier_integral(const Vec2& origin, const Vec2& u, const Vec2& v, const Vec2& k);

struct BasisOptions {
    // guard against runaway mode*shape coefficient tables
    std::size_t max_table_bytes = std::size_t(4) * 1024 * 1024 * 1024;
};

/// Fourier representation of the per-patch boundary potentials.
/// Only base-shape coefficients are stored; the coefficient of patch i
/// is c0_{shape(i)}(G) * exp(-i G . t_i) with t_i the patch translation.
class FourierBasis {
public:
    FourierBasis(const BravaisLattice& lattice, const PatchGrid& grid, int n_cut,
                 const BasisOptions& opts = {});

    const BravaisLattice& lattice() const { return lattice_; }
    const PatchGrid& grid() const { return grid_; }
    const ModeTable& modes() const { return modes_; }
    int n_cut() const { return modes_.n_cut; }

    /// c0_s(G) for base shape s, mode k.
    Complex base_coeff(int s, int k) const { return base_coeffs_[static_cast<size_t>(s)][static_cast<size_t>(k)]; }

    /// Full coefficient of patch i at mode k (base coefficient times
    /// translation phase).
    Complex patch_coeff(int i, int k) const;

    /// Boundary spectrum S(G) = sum_i a_i c_i(G) for an amplitude vector.
    std::vector<Complex> amplitude_spectrum(const Eigen::VectorXd& a) const;

    /// phase e^{-2 pi i k / n} lookup tables used for patch translations
    const std::vector<Complex>& roots1() const { return roots1_; }
    const std::vector<Complex>& roots2() const { return roots2_; }

private:
    BravaisLattice lattice_;
    PatchGrid grid_;
    ModeTable modes_;
    std::vector<std::vector<Complex>> base_coeffs_;  // [shape][mode]
    std::vector<Complex> roots1_, roots2_;           // e^{-2 pi i k / n1[,2]}
};

/// A concrete periodic potential above the plane: boundary spectrum S(G)
/// propagated upward as exp(i G.rho - |G| z). This is the object all
/// analysis runs on; it can come from a patch basis with amplitudes,
/// from an analytic electrode shape, or directly from a mode list.
class PotentialField {
public:
    PotentialField(const BravaisLattice& lattice, ModeTable modes, std::vector<Complex> coeff);

    const BravaisLattice& lattice() const { return lattice_; }
    const ModeTable& modes() const { return modes_; }
    const std::vector<Complex>& coeff() const { return coeff_; }

    /// Sample value/gradient/Hessian at a Cartesian point with z > 0.
    /// Throws std::invalid_argument for z <= 0.
    FieldSample sample(const Vec3& r) const;

    /// Contraction of the third-derivative tensor with a vector:
    /// M_ab = sum_c d^3 phi / (dr_a dr_b dr_c) v_c. Used by the Newton
    /// refinement of pseudopotential minima.
    Mat3 third_contraction(const Vec3& r, const Vec3& v) const;

    /// |G| of the nonzero mode with the largest |S(G)| (lexicographic
    /// (m1, m2) tie-break). Zero when no nonzero mode has weight.
    double dominant_wavenumber() const;

private:
    BravaisLattice lattice_;
    ModeTable modes_;
    std::vector<Complex> coeff_;
};

/// Field of an amplitude vector on a patch basis.
PotentialField make_field(const FourierBasis& basis, const Eigen::VectorXd& a);

/// phi(a; r) = sum_i a_i phi_i(r): superposition sample. Reference
/// entry point for the per-patch decomposition; equivalent to
/// make_field(basis, a).sample(r).
FieldSample evaluate(const FourierBasis& basis, const Eigen::VectorXd& a, const Vec3& r);

/// One constraint row: v_i = requested derivative of phi_i at r.
/// Modes with exp(-|G| z) < prune_tol are skipped when prune_tol > 0
/// (constraint assembly only; landscape analysis keeps all modes).
Eigen::VectorXd evaluate_row(const FourierBasis& basis, const Vec3& r, Deriv which,
                             double prune_tol = 0.0);

/// Spectrum of an annulus electrode (inner radius r_in, outer r_out,
/// center at a fractional position) on the given lattice: closed-form
/// Bessel coefficients. Radii are in L0 units.
PotentialField ring_field(const BravaisLattice& lattice, const Vec2& center_frac, double r_in,
                          double r_out, int n_cut);

}  // namespace trapforge

#endif
