#ifndef TRAPFORGE_LATTICE_HPP
#define TRAPFORGE_LATTICE_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace trapforge {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Polygon in fractional (lattice-vector) coordinates, counterclockwise
/// with respect to the Cartesian embedding.
using Polygon = std::vector<Vec2>;

/// Reciprocal primitive vectors g1, g2 with a_i . g_j = 2*pi*delta_ij.
/// Throws std::invalid_argument when |a1 x a2| < 1e-12.
std::pair<Vec2, Vec2> reciprocal_vectors(const Vec2& a1, const Vec2& a2);

/// 2D Bravais lattice. Lengths are in units of the chosen scale L0
/// (by convention L0 = nearest-neighbor trap spacing d unless configured
/// otherwise). In-plane geometry is handled in fractional coordinates;
/// Cartesian conversion happens at field-evaluation boundaries.
class BravaisLattice {
public:
    BravaisLattice(const Vec2& a1, const Vec2& a2);

    const Vec2& a1() const { return a1_; }
    const Vec2& a2() const { return a2_; }
    const Vec2& g1() const { return g1_; }
    const Vec2& g2() const { return g2_; }
    double cell_area() const { return cell_area_; }

    Vec2 frac_to_cart(const Vec2& f) const { return f.x() * a1_ + f.y() * a2_; }
    Vec2 cart_to_frac(const Vec2& c) const;

    /// In-plane minimum-image distance between two Cartesian points.
    double min_image_distance(const Vec2& p, const Vec2& q) const;

private:
    Vec2 a1_, a2_, g1_, g2_;
    double cell_area_;  // |a1 x a2| > 0
    double cross_;      // signed a1 x a2
};

enum class GridKind { Oblique, Hexagonal };

/// Decomposition of one unit cell into N congruent patch electrodes.
///
/// Oblique: N = n1*n2 parallelograms; patch i = i2*n1 + i1 sits at
/// fractional offset (i1/n1, i2/n2).
/// Hexagonal: n1 = n2 = n and each rhomb is split into two triangles
/// along the short diagonal (from (1/n, 0) to (0, 1/n) in local
/// fractional coordinates); the triangles are equilateral when the
/// lattice itself is hexagonal. Patch i = 2*(i2*n + i1) + t with t = 0
/// the lower-left triangle and t = 1 the upper-right one, so N = 2n^2.
///
/// Patch-edge ownership uses a half-open convention (lower-left edge
/// inclusive; for the triangle split, points on the shared diagonal
/// belong to t = 1).
class PatchGrid {
public:
    static PatchGrid oblique(const BravaisLattice& lattice, int n1, int n2);
    static PatchGrid hexagonal(const BravaisLattice& lattice, int n);

    GridKind kind() const { return kind_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    int num_patches() const { return num_patches_; }
    int shape_count() const { return static_cast<int>(base_shapes_.size()); }

    /// Base polygons in fractional coordinates, anchored at cell (0,0).
    const std::vector<Polygon>& base_shapes() const { return base_shapes_; }

    /// Fractional area of base shape s (times cell_area gives L0^2).
    double shape_area_frac(int s) const;

    struct PatchIndex {
        int i1, i2, shape;
    };
    PatchIndex decode(int i) const;
    int encode(int i1, int i2, int shape) const;

    /// Fractional translation of patch i: (i1/n1, i2/n2).
    Vec2 translation_frac(int i) const;

    /// Counterclockwise polygon of patch i in fractional coordinates.
    /// Throws std::out_of_range for i outside [0, N).
    Polygon patch_polygon(int i) const;

    /// Index of the patch owning a fractional point (half-open rule).
    int patch_index_at(const Vec2& frac) const;

private:
    PatchGrid() = default;
    GridKind kind_ = GridKind::Oblique;
    int n1_ = 0, n2_ = 0, num_patches_ = 0;
    std::vector<Polygon> base_shapes_;
};

/// Signed polygon area in fractional coordinates (shoelace).
double polygon_area(const Polygon& poly);

}  // namespace trapforge

#endif
