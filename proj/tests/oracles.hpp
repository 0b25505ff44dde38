#ifndef TRAPFORGE_TESTS_ORACLES_HPP
#define TRAPFORGE_TESTS_ORACLES_HPP

// Independent numerical oracles used by the tests: Gauss-Legendre
// quadrature of polygon Fourier integrals and small helpers. These stay
// deliberately separate from the library implementation they check.

#include <cmath>
#include <complex>
#include <vector>

#include "trapforge/lattice.hpp"

namespace trapforge::oracles {

struct GaussRule {
    std::vector<double> nodes;    // on [0,1]
    std::vector<double> weights;  // sum to 1
};

inline GaussRule gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Newton iteration from the Chebyshev estimate on [-1,1]
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<size_t>(i)] = 0.5 * (1.0 - x);  // descending -> ascending on [0,1]
        rule.weights[static_cast<size_t>(i)] = 1.0 / ((1.0 - x * x) * pp * pp);
    }
    return rule;
}

/// Quadrature of integral over a Cartesian polygon of exp(-i k.r),
/// by fan triangulation and a tensor Gauss rule per triangle.
inline std::complex<double> polygon_fourier_quadrature(const std::vector<Vec2>& poly,
                                                       const Vec2& k, int order) {
    const GaussRule rule = gauss_legendre(order);
    std::complex<double> acc(0.0, 0.0);
    for (size_t t = 1; t + 1 < poly.size(); ++t) {
        const Vec2 a = poly[0], u = poly[t] - poly[0], v = poly[t + 1] - poly[0];
        const double jac = u.x() * v.y() - u.y() * v.x();
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = rule.nodes[i];
            for (size_t j = 0; j < rule.nodes.size(); ++j) {
                // Duffy map of the unit square onto the triangle
                const double tt = rule.nodes[j] * (1.0 - s);
                const Vec2 r = a + s * u + tt * v;
                const double w = rule.weights[i] * rule.weights[j] * (1.0 - s) * jac;
                acc += w * std::polar(1.0, -k.dot(r));
            }
        }
    }
    return acc;
}

/// Self-refining wrapper: doubles the order until two levels agree.
inline std::complex<double> polygon_fourier_adaptive(const std::vector<Vec2>& poly, const Vec2& k,
                                                     double tol = 1e-12) {
    std::complex<double> prev = polygon_fourier_quadrature(poly, k, 8);
    for (int order = 16; order <= 64; order *= 2) {
        const std::complex<double> next = polygon_fourier_quadrature(poly, k, order);
        if (std::abs(next - prev) < tol) return next;
        prev = next;
    }
    return prev;
}

}  // namespace trapforge::oracles

#endif
