#include <doctest.h>

#include <cmath>

#include "trapforge/lattice.hpp"

using namespace trapforge;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TEST_CASE("reciprocal vectors of the square lattice") {
    auto [g1, g2] = reciprocal_vectors(Vec2(1, 0), Vec2(0, 1));
    CHECK(g1.x() == doctest::Approx(kTwoPi).epsilon(1e-15));
    CHECK(g1.y() == doctest::Approx(0.0));
    CHECK(g2.x() == doctest::Approx(0.0));
    CHECK(g2.y() == doctest::Approx(kTwoPi).epsilon(1e-15));
}

TEST_CASE("reciprocal vectors of the hexagonal lattice satisfy duality") {
    const Vec2 a1(1, 0), a2(0.5, std::sqrt(3.0) / 2.0);
    auto [g1, g2] = reciprocal_vectors(a1, a2);
    CHECK(std::abs(a1.dot(g1) - kTwoPi) < 1e-12);
    CHECK(std::abs(a2.dot(g2) - kTwoPi) < 1e-12);
    CHECK(std::abs(a1.dot(g2)) < 1e-12);
    CHECK(std::abs(a2.dot(g1)) < 1e-12);
    CHECK(g1.x() == doctest::Approx(kTwoPi).epsilon(1e-14));
    CHECK(g1.y() == doctest::Approx(-kTwoPi / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(g2.x() == doctest::Approx(0.0));
    CHECK(g2.y() == doctest::Approx(2.0 * kTwoPi / std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("reciprocal vectors scale inversely") {
    auto [g1, g2] = reciprocal_vectors(Vec2(2, 0), Vec2(0, 1));
    CHECK(g1.x() == doctest::Approx(kTwoPi / 2.0).epsilon(1e-15));
    CHECK(g2.y() == doctest::Approx(kTwoPi).epsilon(1e-15));
}

TEST_CASE("degenerate lattice is rejected") {
    CHECK_THROWS_AS(reciprocal_vectors(Vec2(1, 1), Vec2(2, 2)), std::invalid_argument);
    CHECK_THROWS_AS(BravaisLattice(Vec2(1, 0), Vec2(1e-13, 0)), std::invalid_argument);
}

TEST_CASE("lattice frac/cart round trip and reciprocity invariant") {
    const BravaisLattice lat(Vec2(1.3, 0.2), Vec2(-0.4, 0.9));
    const Vec2 f(0.37, -1.21);
    const Vec2 back = lat.cart_to_frac(lat.frac_to_cart(f));
    CHECK((back - f).norm() < 1e-14);
    CHECK(std::abs(lat.a1().dot(lat.g1()) - kTwoPi) < 1e-12);
    CHECK(std::abs(lat.a2().dot(lat.g1())) < 1e-12);
}

TEST_CASE("oblique grid tiles the square cell") {
    const BravaisLattice lat(Vec2(1, 0), Vec2(0, 1));
    const PatchGrid grid = PatchGrid::oblique(lat, 2, 2);
    CHECK(grid.num_patches() == 4);
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Polygon poly = grid.patch_polygon(i);
        REQUIRE(poly.size() == 4);
        total += std::abs(polygon_area(poly));
        // each patch is a half-unit square
        CHECK(std::abs(std::abs(polygon_area(poly)) - 0.25) < 1e-15);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("hexagonal grid splits rhombs into equilateral triangles") {
    const BravaisLattice lat(Vec2(1, 0), Vec2(0.5, std::sqrt(3.0) / 2.0));
    const PatchGrid grid = PatchGrid::hexagonal(lat, 3);
    CHECK(grid.num_patches() == 18);
    double total = 0.0;
    for (int i = 0; i < grid.num_patches(); ++i) {
        const Polygon poly = grid.patch_polygon(i);
        REQUIRE(poly.size() == 3);
        total += std::abs(polygon_area(poly));
        // equilateral in the Cartesian embedding
        const Vec2 p0 = lat.frac_to_cart(poly[0]);
        const Vec2 p1 = lat.frac_to_cart(poly[1]);
        const Vec2 p2 = lat.frac_to_cart(poly[2]);
        const double e01 = (p1 - p0).norm(), e12 = (p2 - p1).norm(), e20 = (p0 - p2).norm();
        CHECK(std::abs(e01 - e12) < 1e-14);
        CHECK(std::abs(e12 - e20) < 1e-14);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);  // fractional areas sum to one cell
}

TEST_CASE("full-scale patch counts") {
    const BravaisLattice lat(Vec2(1, 0), Vec2(0, 1));
    const PatchGrid grid = PatchGrid::oblique(lat, 250, 250);
    CHECK(grid.num_patches() == 62500);
}

TEST_CASE("patch polygons and translations") {
    const BravaisLattice lat(Vec2(1, 0), Vec2(0, 1));
    SUBCASE("single-patch grid covers the cell") {
        const PatchGrid grid = PatchGrid::oblique(lat, 1, 1);
        const Polygon poly = grid.patch_polygon(0);
        REQUIRE(poly.size() == 4);
        CHECK((poly[0] - Vec2(0, 0)).norm() < 1e-15);
        CHECK((poly[1] - Vec2(1, 0)).norm() < 1e-15);
        CHECK((poly[2] - Vec2(1, 1)).norm() < 1e-15);
        CHECK((poly[3] - Vec2(0, 1)).norm() < 1e-15);
    }
    SUBCASE("second patch of a 2x1 grid is offset by half a1") {
        const PatchGrid grid = PatchGrid::oblique(lat, 2, 1);
        const Polygon poly = grid.patch_polygon(1);
        CHECK((poly[0] - Vec2(0.5, 0)).norm() < 1e-15);
    }
    SUBCASE("hexagonal(1) triangles share the rhomb diagonal") {
        const BravaisLattice hex(Vec2(1, 0), Vec2(0.5, std::sqrt(3.0) / 2.0));
        const PatchGrid grid = PatchGrid::hexagonal(hex, 1);
        const Polygon t0 = grid.patch_polygon(0);
        const Polygon t1 = grid.patch_polygon(1);
        // shared edge from (1,0) to (0,1)
        CHECK((t0[1] - Vec2(1, 0)).norm() < 1e-15);
        CHECK((t0[2] - Vec2(0, 1)).norm() < 1e-15);
        CHECK((t1[0] - Vec2(1, 0)).norm() < 1e-15);
        CHECK((t1[2] - Vec2(0, 1)).norm() < 1e-15);
    }
    SUBCASE("out-of-range index throws") {
        const PatchGrid grid = PatchGrid::oblique(lat, 2, 2);
        CHECK_THROWS_AS(grid.patch_polygon(4), std::out_of_range);
        CHECK_THROWS_AS(grid.patch_polygon(-1), std::out_of_range);
    }
}

TEST_CASE("index construction is deterministic") {
    const BravaisLattice lat(Vec2(1, 0), Vec2(0.5, std::sqrt(3.0) / 2.0));
    const PatchGrid g1 = PatchGrid::hexagonal(lat, 4);
    const PatchGrid g2 = PatchGrid::hexagonal(lat, 4);
    for (int i = 0; i < g1.num_patches(); ++i) {
        const Polygon p1 = g1.patch_polygon(i), p2 = g2.patch_polygon(i);
        REQUIRE(p1.size() == p2.size());
        for (size_t v = 0; v < p1.size(); ++v) CHECK((p1[v] - p2[v]).norm() == 0.0);
    }
}

TEST_CASE("every point belongs to exactly one patch (half-open ownership)") {
    const BravaisLattice lat(Vec2(1, 0), Vec2(0.5, std::sqrt(3.0) / 2.0));
    for (const PatchGrid& grid :
         {PatchGrid::oblique(lat, 3, 2), PatchGrid::hexagonal(lat, 2)}) {
        // centroids map back to their own patch
        for (int i = 0; i < grid.num_patches(); ++i) {
            const Polygon poly = grid.patch_polygon(i);
            Vec2 centroid = Vec2::Zero();
            for (const Vec2& v : poly) centroid += v;
            centroid /= static_cast<double>(poly.size());
            CHECK(grid.patch_index_at(centroid) == i);
        }
        // boundary points resolve deterministically
        const Vec2 edge_point(0.5 / grid.n1(), 0.0);
        const int owner = grid.patch_index_at(edge_point);
        CHECK(owner == grid.patch_index_at(edge_point));
        CHECK(owner >= 0);
        CHECK(owner < grid.num_patches());
    }
}
