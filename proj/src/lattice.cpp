#include "trapforge/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace trapforge {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double cross2(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }
}  // namespace

std::pair<Vec2, Vec2> reciprocal_vectors(const Vec2& a1, const Vec2& a2) {
    const double det = cross2(a1, a2);
    if (std::abs(det) < 1e-12) {
        throw std::invalid_argument("degenerate lattice: |a1 x a2| < 1e-12");
    }
    Vec2 g1(kTwoPi * a2.y() / det, -kTwoPi * a2.x() / det);
    Vec2 g2(-kTwoPi * a1.y() / det, kTwoPi * a1.x() / det);
    return {g1, g2};
}

BravaisLattice::BravaisLattice(const Vec2& a1, const Vec2& a2) : a1_(a1), a2_(a2) {
    auto [g1, g2] = reciprocal_vectors(a1, a2);
    g1_ = g1;
    g2_ = g2;
    cross_ = cross2(a1, a2);
    cell_area_ = std::abs(cross_);
}

Vec2 BravaisLattice::cart_to_frac(const Vec2& c) const {
    // f = (c . g) / 2pi by the reciprocity relation
    return Vec2(c.dot(g1_), c.dot(g2_)) / kTwoPi;
}

double BravaisLattice::min_image_distance(const Vec2& p, const Vec2& q) const {
    Vec2 df = cart_to_frac(p - q);
    df.x() -= std::round(df.x());
    df.y() -= std::round(df.y());
    double best = frac_to_cart(df).norm();
    // the rounded image need not be the nearest for very skewed cells
    for (int s1 = -1; s1 <= 1; ++s1) {
        for (int s2 = -1; s2 <= 1; ++s2) {
            best = std::min(best, frac_to_cart(df + Vec2(s1, s2)).norm());
        }
    }
    return best;
}

double polygon_area(const Polygon& poly) {
    double acc = 0.0;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        acc += cross2(p, q);
    }
    return 0.5 * acc;
}

PatchGrid PatchGrid::oblique(const BravaisLattice& lattice, int n1, int n2) {
    if (n1 < 1 || n2 < 1) {
        throw std::invalid_argument("oblique grid requires n1, n2 >= 1");
    }
    PatchGrid g;
    g.kind_ = GridKind::Oblique;
    g.n1_ = n1;
    g.n2_ = n2;
    g.num_patches_ = n1 * n2;
    const double u = 1.0 / n1, v = 1.0 / n2;
    Polygon base = {Vec2(0, 0), Vec2(u, 0), Vec2(u, v), Vec2(0, v)};
    // keep counterclockwise orientation in the Cartesian embedding
    if (cross2(lattice.a1(), lattice.a2()) < 0) {
        std::reverse(base.begin(), base.end());
    }
    g.base_shapes_ = {base};
    return g;
}

PatchGrid PatchGrid::hexagonal(const BravaisLattice& lattice, int n) {
    if (n < 1) {
        throw std::invalid_argument("hexagonal grid requires n >= 1");
    }
    PatchGrid g;
    g.kind_ = GridKind::Hexagonal;
    g.n1_ = n;
    g.n2_ = n;
    g.num_patches_ = 2 * n * n;
    const double h = 1.0 / n;
    Polygon lower = {Vec2(0, 0), Vec2(h, 0), Vec2(0, h)};
    Polygon upper = {Vec2(h, 0), Vec2(h, h), Vec2(0, h)};
    if (cross2(lattice.a1(), lattice.a2()) < 0) {
        std::reverse(lower.begin(), lower.end());
        std::reverse(upper.begin(), upper.end());
    }
    g.base_shapes_ = {lower, upper};
    return g;
}

double PatchGrid::shape_area_frac(int s) const {
    return std::abs(polygon_area(base_shapes_.at(static_cast<size_t>(s))));
}

PatchGrid::PatchIndex PatchGrid::decode(int i) const {
    if (i < 0 || i >= num_patches_) {
        throw std::out_of_range("patch index out of range");
    }
    const int shapes = shape_count();
    const int cell = i / shapes;
    return PatchIndex{cell % n1_, cell / n1_, i % shapes};
}

int PatchGrid::encode(int i1, int i2, int shape) const {
    return (i2 * n1_ + i1) * shape_count() + shape;
}

Vec2 PatchGrid::translation_frac(int i) const {
    const PatchIndex p = decode(i);
    return Vec2(static_cast<double>(p.i1) / n1_, static_cast<double>(p.i2) / n2_);
}

Polygon PatchGrid::patch_polygon(int i) const {
    const PatchIndex p = decode(i);
    const Vec2 t(static_cast<double>(p.i1) / n1_, static_cast<double>(p.i2) / n2_);
    Polygon poly = base_shapes_[static_cast<size_t>(p.shape)];
    for (Vec2& v : poly) v += t;
    return poly;
}

int PatchGrid::patch_index_at(const Vec2& frac) const {
    // wrap into [0,1)
    double fx = frac.x() - std::floor(frac.x());
    double fy = frac.y() - std::floor(frac.y());
    int i1 = std::min(static_cast<int>(fx * n1_), n1_ - 1);
    int i2 = std::min(static_cast<int>(fy * n2_), n2_ - 1);
    if (kind_ == GridKind::Oblique) {
        return encode(i1, i2, 0);
    }
    const double lx = fx * n1_ - i1;
    const double ly = fy * n2_ - i2;
    const int tri = (lx + ly < 1.0) ? 0 : 1;  // shared diagonal belongs to t=1
    return encode(i1, i2, tri);
}

}  // namespace trapforge
