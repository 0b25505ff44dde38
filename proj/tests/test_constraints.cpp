#include <doctest.h>

#include <cmath>
#include <random>

#include "trapforge/constraints.hpp"

using namespace trapforge;

namespace {

const BravaisLattice square(Vec2(1, 0), Vec2(0, 1));

Mat3 cylindrical_quadrupole() {
    Mat3 g = Mat3::Zero();
    g.diagonal() << -0.5, -0.5, 1.0;
    return g;
}

TrapSpec make_trap(double fx, double fy, double z, const std::string& label = "t") {
    TrapSpec t;
    t.position = Vec3(fx, fy, z);
    t.gamma = cylindrical_quadrupole();
    t.label = label;
    return t;
}

}  // namespace

TEST_CASE("curvature constructor: cylindrical ratios") {
    const Mat3 g = curvature_from_frequencies(Vec3(0.5, 0.5, 1.0));
    CHECK((g - cylindrical_quadrupole()).norm() < 1e-12);
}

TEST_CASE("curvature constructor: golden-ratio ratios pick signs (-,-,+)") {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const Mat3 g = curvature_from_frequencies(Vec3(1.0 / phi, 1.0, phi));
    CHECK(std::abs(g.trace()) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat3> eig(g);
    const Vec3 mu = eig.eigenvalues();  // ascending
    CHECK(mu[0] == doctest::Approx(-1.0 / phi).epsilon(1e-9));
    CHECK(mu[1] == doctest::Approx(-1.0 / (phi * phi)).epsilon(1e-9));
    CHECK(mu[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("curvature constructor: rotated axes") {
    const double c = std::cos(0.3), s = std::sin(0.3);
    Mat3 axes;
    axes << c, -s, 0, s, c, 0, 0, 0, 1;
    const Mat3 g = curvature_from_frequencies(Vec3(0.5, 0.5, 1.0), axes);
    CHECK(std::abs(g.trace()) < 1e-12);
    CHECK((g - g.transpose()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Mat3> eig(g);
    CHECK(eig.eigenvalues()[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("curvature constructor rejects infeasible ratios and bad axes") {
    CHECK_THROWS_AS(curvature_from_frequencies(Vec3(1, 1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(curvature_from_frequencies(Vec3(1, 2, -1)), std::invalid_argument);
    Mat3 bad = Mat3::Identity();
    bad(0, 0) = 2.0;
    CHECK_THROWS_AS(curvature_from_frequencies(Vec3(0.5, 0.5, 1.0), bad), std::invalid_argument);
}

TEST_CASE("sign feasibility matches brute-force enumeration") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> uni(0.1, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        Vec3 r(uni(rng), uni(rng), uni(rng));
        if (trial % 5 == 0) r[2] = r[0] + r[1];  // force a feasible case
        bool feasible = false;
        for (int bits = 0; bits < 8; ++bits) {
            const double sum = ((bits & 4) ? r[0] : -r[0]) + ((bits & 2) ? r[1] : -r[1]) +
                               ((bits & 1) ? r[2] : -r[2]);
            if (std::abs(sum) < 1e-9 * r.sum()) feasible = true;
        }
        if (feasible) {
            const Mat3 g = curvature_from_frequencies(r);
            CHECK(std::abs(g.trace()) < 1e-9);
        } else {
            CHECK_THROWS_AS(curvature_from_frequencies(r), std::invalid_argument);
        }
    }
}

TEST_CASE("trap validation") {
    TrapSpec t = make_trap(0.5, 0.5, 0.3);
    CHECK_NOTHROW(t.validate());
    SUBCASE("non-traceless gamma") {
        t.gamma(2, 2) = 1.1;
        CHECK_THROWS_WITH_AS(t.validate(), doctest::Contains("traceless"), std::invalid_argument);
    }
    SUBCASE("asymmetric gamma") {
        t.gamma(0, 1) = 0.2;
        CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    }
    SUBCASE("nonpositive height") {
        t.position.z() = 0.0;
        CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    }
}

TEST_CASE("assembly row counts") {
    const FourierBasis basis(square, PatchGrid::oblique(square, 6, 6), 8);
    SUBCASE("one trap gives 8 rows") {
        const ConstraintSystem sys = assemble(basis, {make_trap(0.5, 0.5, 0.3)});
        CHECK(sys.equality_rows() == 8);
        CHECK(sys.trap_count == 1);
        CHECK(sys.A.cols() == 36);
    }
    SUBCASE("two traps give 16 rows") {
        const ConstraintSystem sys = assemble(
            basis, {make_trap(0.25, 0.25, 0.3, "a"), make_trap(0.75, 0.75, 0.5, "b")});
        CHECK(sys.equality_rows() == 16);
    }
    SUBCASE("equality extras extend A") {
        ExtraConstraint e;
        e.point = Vec3(0.0, 0.0, 0.4);
        e.lambda = 0.1;
        const ConstraintSystem sys = assemble(basis, {make_trap(0.5, 0.5, 0.3)}, {e});
        CHECK(sys.equality_rows() == 9);
        CHECK(sys.b[8] == doctest::Approx(0.1));
        CHECK(sys.inequalities.empty());
    }
    SUBCASE("inequality extras are stored separately") {
        ExtraConstraint e;
        e.point = Vec3(0.0, 0.0, 0.4);
        e.relation = Relation::AtMost;
        e.lambda = 0.2;
        const ConstraintSystem sys = assemble(basis, {make_trap(0.5, 0.5, 0.3)}, {e});
        CHECK(sys.equality_rows() == 8);
        CHECK(sys.inequalities.size() == 1);
    }
}

TEST_CASE("assembly error paths") {
    const FourierBasis basis(square, PatchGrid::oblique(square, 4, 4), 6);
    CHECK_THROWS_AS(assemble(basis, {}), std::invalid_argument);
    CHECK_THROWS_AS(
        assemble(basis, {make_trap(0.5, 0.5, 0.3, "x"), make_trap(0.5, 0.5, 0.3, "y")}),
        std::invalid_argument);
    // periodic images coincide as well
    CHECK_THROWS_AS(
        assemble(basis, {make_trap(0.0, 0.5, 0.3, "x"), make_trap(1.0, 0.5, 0.3, "y")}),
        std::invalid_argument);
}

TEST_CASE("the uniform electrode satisfies every homogeneous row") {
    const FourierBasis basis(square, PatchGrid::oblique(square, 8, 8), 10);
    const ConstraintSystem sys = assemble(basis, {make_trap(0.5, 0.5, 0.25)});
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(64);
    const Eigen::VectorXd residual = sys.A * ones;
    CHECK(residual.lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("rows agree with per-patch field derivatives") {
    const FourierBasis basis(square, PatchGrid::oblique(square, 5, 5), 8);
    const TrapSpec trap = make_trap(0.42, 0.58, 0.31);
    const ConstraintSystem sys = assemble(basis, {trap});
    const Vec3 r = trap.cartesian(square);
    for (int i : {0, 7, 13, 24}) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(25);
        e[i] = 1.0;
        const FieldSample s = evaluate(basis, e, r);
        CHECK(std::abs(sys.A(0, i) - s.gradient.x()) < 1e-12);
        CHECK(std::abs(sys.A(1, i) - s.gradient.y()) < 1e-12);
        CHECK(std::abs(sys.A(2, i) - s.gradient.z()) < 1e-12);
        CHECK(std::abs(sys.A(3, i) - s.hessian(0, 0)) < 1e-12);
        CHECK(std::abs(sys.A(4, i) - s.hessian(1, 1)) < 1e-12);
        CHECK(std::abs(sys.A(5, i) - s.hessian(0, 1)) < 1e-12);
        CHECK(std::abs(sys.A(6, i) - s.hessian(0, 2)) < 1e-12);
        CHECK(std::abs(sys.A(7, i) - s.hessian(1, 2)) < 1e-12);
    }
    // right-hand side carries the gamma components
    CHECK(sys.b.head(3).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(sys.b[3] == doctest::Approx(-0.5));
    CHECK(sys.b[4] == doctest::Approx(-0.5));
    CHECK(sys.b[5] == 0.0);
}

TEST_CASE("add_suppression appends rows and rejects trap sites") {
    const FourierBasis basis(square, PatchGrid::oblique(square, 6, 6), 8);
    const TrapSpec trap = make_trap(0.5, 0.5, 0.3);
    ConstraintSystem sys = assemble(basis, {trap});
    sys = add_suppression(std::move(sys), basis, Vec3(0.0, 0.0, 0.45), Relation::Equal, 0.25);
    CHECK(sys.equality_rows() == 9);
    CHECK(sys.b[8] == doctest::Approx(0.25));
    CHECK(sys.rows.back().kind == RowKind::Extra);

    sys = add_suppression(std::move(sys), basis, Vec3(0.0, 0.5, 0.4), Relation::AtMost, 0.1);
    CHECK(sys.equality_rows() == 9);
    CHECK(sys.inequalities.size() == 1);

    CHECK_THROWS_AS(add_suppression(std::move(sys), basis, trap.position, Relation::Equal, 0.1),
                    std::invalid_argument);
}

TEST_CASE("implied zz curvature closes the trace") {
    const BravaisLattice hex(Vec2(1, 0), Vec2(0.5, std::sqrt(3.0) / 2.0));
    const FourierBasis basis(hex, PatchGrid::hexagonal(hex, 4), 8);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Eigen::VectorXd a(basis.grid().num_patches());
    for (int i = 0; i < a.size(); ++i) a[i] = uni(rng);
    const Vec3 r(0.3, 0.4, 0.5);
    const FieldSample s = evaluate(basis, a, r);
    CHECK(std::abs(s.hessian(2, 2) + s.hessian(0, 0) + s.hessian(1, 1)) <
          1e-9 * std::max(1.0, s.hessian.norm()));
}
