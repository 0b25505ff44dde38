#include "trapforge/field.hpp"

#include <cmath>
#include <stdexcept>

namespace trapforge {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;

double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

double cross2(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

// exp(-i x) with sinc-regularized edge integral: int_0^1 exp(-i u t) dt
Complex edge_phase_integral(double u) { return std::polar(sinc(0.5 * u), -0.5 * u); }

int mod_positive(long long v, int n) {
    int r = static_cast<int>(v % n);
    return r < 0 ? r + n : r;
}

}  // namespace

ModeTable ModeTable::build(const BravaisLattice& lattice, int n_cut) {
    if (n_cut < 1) {
        throw std::invalid_argument("mode cutoff must be >= 1");
    }
    ModeTable t;
    t.n_cut = n_cut;
    const int side = 2 * n_cut + 1;
    t.index.reserve(static_cast<size_t>(side) * side);
    t.g.reserve(t.index.capacity());
    t.g_norm.reserve(t.index.capacity());
    for (int m1 = -n_cut; m1 <= n_cut; ++m1) {
        for (int m2 = -n_cut; m2 <= n_cut; ++m2) {
            Vec2 G = m1 * lattice.g1() + m2 * lattice.g2();
            t.index.push_back({m1, m2});
            t.g.push_back(G);
            t.g_norm.push_back(G.norm());
        }
    }
    return t;
}

Complex polygon_fourier_integral(const std::vector<Vec2>& v, const Vec2& k) {
    const size_t n = v.size();
    const double k2 = k.squaredNorm();
    if (k2 == 0.0) {
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) acc += cross2(v[i], v[(i + 1) % n]);
        return Complex(0.5 * acc, 0.0);
    }
    Complex acc(0.0, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2 e = v[(i + 1) % n] - a;
        const double ke = k.dot(e);
        const double ka = k.dot(a);
        acc += cross2(k, e) * std::polar(1.0, -ka) * edge_phase_integral(ke);
    }
    return Complex(0.0, 1.0) / k2 * acc;
}

Complex parallelogram_fourier_integral(const Vec2& origin, const Vec2& u, const Vec2& v,
                                       const Vec2& k) {
    const double area = std::abs(cross2(u, v));
    const double ku = k.dot(u), kv = k.dot(v);
    const double phase = -k.dot(origin) - 0.5 * (ku + kv);
    return area * sinc(0.5 * ku) * sinc(0.5 * kv) * std::polar(1.0, phase);
}

Complex patch_fourier_coeff(const BravaisLattice& lattice, const Polygon& poly, const Vec2& G) {
    std::vector<Vec2> cart(poly.size());
    for (size_t i = 0; i < poly.size(); ++i) cart[i] = lattice.frac_to_cart(poly[i]);
    return polygon_fourier_integral(cart, G) / lattice.cell_area();
}

FourierBasis::FourierBasis(const BravaisLattice& lattice, const PatchGrid& grid, int n_cut,
                           const BasisOptions& opts)
    : lattice_(lattice), grid_(grid), modes_(ModeTable::build(lattice, n_cut)) {
    const size_t n_modes = static_cast<size_t>(modes_.size());
    const size_t bytes = n_modes * static_cast<size_t>(grid.shape_count()) * sizeof(Complex);
    if (bytes > opts.max_table_bytes) {
        throw std::runtime_error("mode/shape coefficient table exceeds memory budget");
    }

    base_coeffs_.resize(static_cast<size_t>(grid.shape_count()));
    const bool oblique = grid.kind() == GridKind::Oblique;
    const Vec2 u = lattice.a1() / grid.n1();
    const Vec2 v = lattice.a2() / grid.n2();
    for (int s = 0; s < grid.shape_count(); ++s) {
        auto& table = base_coeffs_[static_cast<size_t>(s)];
        table.resize(n_modes);
        std::vector<Vec2> cart;
        if (!oblique) {
            for (const Vec2& p : grid.base_shapes()[static_cast<size_t>(s)]) {
                cart.push_back(lattice.frac_to_cart(p));
            }
        }
        for (size_t k = 0; k < n_modes; ++k) {
            const Vec2& G = modes_.g[k];
            Complex integral = oblique ? parallelogram_fourier_integral(Vec2::Zero(), u, v, G)
                                       : polygon_fourier_integral(cart, G);
            table[k] = integral / lattice.cell_area();
        }
    }

    roots1_.resize(static_cast<size_t>(grid.n1()));
    roots2_.resize(static_cast<size_t>(grid.n2()));
    for (int k = 0; k < grid.n1(); ++k) roots1_[static_cast<size_t>(k)] = std::polar(1.0, -kTwoPi * k / grid.n1());
    for (int k = 0; k < grid.n2(); ++k) roots2_[static_cast<size_t>(k)] = std::polar(1.0, -kTwoPi * k / grid.n2());
}

Complex FourierBasis::patch_coeff(int i, int k) const {
    const auto p = grid_.decode(i);
    const auto [m1, m2] = modes_.index[static_cast<size_t>(k)];
    const Complex phase = roots1_[static_cast<size_t>(mod_positive(1LL * m1 * p.i1, grid_.n1()))] *
                          roots2_[static_cast<size_t>(mod_positive(1LL * m2 * p.i2, grid_.n2()))];
    return base_coeff(p.shape, k) * phase;
}

std::vector<Complex> FourierBasis::amplitude_spectrum(const Eigen::VectorXd& a) const {
    if (a.size() != grid_.num_patches()) {
        throw std::invalid_argument("amplitude vector length must equal the patch count");
    }
    const int n1 = grid_.n1(), n2 = grid_.n2(), shapes = grid_.shape_count();
    const size_t n_modes = static_cast<size_t>(modes_.size());
    std::vector<Complex> spectrum(n_modes, Complex(0, 0));

    // per base shape: residue-class DFT of the amplitude grid,
    // D_s[p][q] = sum_{i1,i2} a(i1,i2,s) e^{-2 pi i (p i1/n1 + q i2/n2)}
    std::vector<Complex> stage(static_cast<size_t>(n1) * n2);
    std::vector<Complex> dft(static_cast<size_t>(n1) * n2);
    for (int s = 0; s < shapes; ++s) {
        for (int p = 0; p < n1; ++p) {
            for (int i2 = 0; i2 < n2; ++i2) {
                Complex acc(0, 0);
                int idx = 0;
                for (int i1 = 0; i1 < n1; ++i1) {
                    acc += a[grid_.encode(i1, i2, s)] * roots1_[static_cast<size_t>(idx)];
                    idx += p;
                    if (idx >= n1) idx -= n1;
                }
                stage[static_cast<size_t>(p) * n2 + i2] = acc;
            }
        }
        for (int p = 0; p < n1; ++p) {
            for (int q = 0; q < n2; ++q) {
                Complex acc(0, 0);
                int idx = 0;
                for (int i2 = 0; i2 < n2; ++i2) {
                    acc += stage[static_cast<size_t>(p) * n2 + i2] * roots2_[static_cast<size_t>(idx)];
                    idx += q;
                    if (idx >= n2) idx -= n2;
                }
                dft[static_cast<size_t>(p) * n2 + q] = acc;
            }
        }
        const auto& c0 = base_coeffs_[static_cast<size_t>(s)];
        for (size_t k = 0; k < n_modes; ++k) {
            const auto [m1, m2] = modes_.index[k];
            const int p = mod_positive(m1, n1), q = mod_positive(m2, n2);
            spectrum[k] += c0[k] * dft[static_cast<size_t>(p) * n2 + q];
        }
    }
    return spectrum;
}

PotentialField::PotentialField(const BravaisLattice& lattice, ModeTable modes,
                               std::vector<Complex> coeff)
    : lattice_(lattice), modes_(std::move(modes)), coeff_(std::move(coeff)) {
    if (coeff_.size() != static_cast<size_t>(modes_.size())) {
        throw std::invalid_argument("coefficient table size must match the mode table");
    }
}

FieldSample PotentialField::sample(const Vec3& r) const {
    if (r.z() <= 0.0) {
        throw std::invalid_argument("field evaluation requires z > 0");
    }
    FieldSample out;
    const double x = r.x(), y = r.y(), z = r.z();
    double hxx = 0, hyy = 0, hxy = 0, hxz = 0, hyz = 0, hzz = 0;
    for (size_t k = 0; k < coeff_.size(); ++k) {
        const Complex s = coeff_[k];
        if (s == Complex(0, 0)) continue;
        const Vec2& G = modes_.g[k];
        const double gn = modes_.g_norm[k];
        const Complex w = s * std::polar(std::exp(-gn * z), G.x() * x + G.y() * y);
        const double re = w.real(), im = w.imag();
        out.value += re;
        out.gradient.x() -= im * G.x();
        out.gradient.y() -= im * G.y();
        out.gradient.z() -= re * gn;
        hxx -= re * G.x() * G.x();
        hyy -= re * G.y() * G.y();
        hxy -= re * G.x() * G.y();
        hxz += im * G.x() * gn;
        hyz += im * G.y() * gn;
        hzz += re * gn * gn;
    }
    out.hessian << hxx, hxy, hxz, hxy, hyy, hyz, hxz, hyz, hzz;
    return out;
}

Mat3 PotentialField::third_contraction(const Vec3& r, const Vec3& v) const {
    if (r.z() <= 0.0) {
        throw std::invalid_argument("field evaluation requires z > 0");
    }
    const double x = r.x(), y = r.y(), z = r.z();
    double hxx = 0, hyy = 0, hxy = 0, hxz = 0, hyz = 0, hzz = 0;
    for (size_t k = 0; k < coeff_.size(); ++k) {
        const Complex s = coeff_[k];
        if (s == Complex(0, 0)) continue;
        const Vec2& G = modes_.g[k];
        const double gn = modes_.g_norm[k];
        const Complex w = s * std::polar(std::exp(-gn * z), G.x() * x + G.y() * y);
        // f . v with f = (i Gx, i Gy, -|G|)
        const Complex fv(-gn * v.z(), G.x() * v.x() + G.y() * v.y());
        const Complex q = w * fv;
        const double re = q.real(), im = q.imag();
        hxx -= re * G.x() * G.x();
        hyy -= re * G.y() * G.y();
        hxy -= re * G.x() * G.y();
        hxz += im * G.x() * gn;
        hyz += im * G.y() * gn;
        hzz += re * gn * gn;
    }
    Mat3 m;
    m << hxx, hxy, hxz, hxy, hyy, hyz, hxz, hyz, hzz;
    return m;
}

double PotentialField::dominant_wavenumber() const {
    const int zero = modes_.zero_index();
    double best = -1.0;
    double best_norm = 0.0;
    for (int k = 0; k < modes_.size(); ++k) {
        if (k == zero) continue;
        const double mag = std::abs(coeff_[static_cast<size_t>(k)]);
        if (mag > best) {
            best = mag;
            best_norm = modes_.g_norm[static_cast<size_t>(k)];
        }
    }
    return best <= 0.0 ? 0.0 : best_norm;
}

PotentialField make_field(const FourierBasis& basis, const Eigen::VectorXd& a) {
    return PotentialField(basis.lattice(), basis.modes(), basis.amplitude_spectrum(a));
}

FieldSample evaluate(const FourierBasis& basis, const Eigen::VectorXd& a, const Vec3& r) {
    return make_field(basis, a).sample(r);
}

Eigen::VectorXd evaluate_row(const FourierBasis& basis, const Vec3& r, Deriv which,
                             double prune_tol) {
    if (r.z() <= 0.0) {
        throw std::invalid_argument("field evaluation requires z > 0");
    }
    const auto& modes = basis.modes();
    const auto& grid = basis.grid();
    const int n1 = grid.n1(), n2 = grid.n2(), shapes = grid.shape_count();
    const double x = r.x(), y = r.y(), z = r.z();

    // per-shape mode weights folded by translation-phase residue class:
    // row(i1,i2,s) = Re sum_{p,q} W_s[p][q] r1[p i1] r2[q i2]
    std::vector<std::vector<Complex>> folded(
        static_cast<size_t>(shapes), std::vector<Complex>(static_cast<size_t>(n1) * n2, Complex(0, 0)));
    for (int k = 0; k < modes.size(); ++k) {
        const Vec2& G = modes.g[static_cast<size_t>(k)];
        const double gn = modes.g_norm[static_cast<size_t>(k)];
        const double damp = std::exp(-gn * z);
        if (prune_tol > 0.0 && damp < prune_tol && gn > 0.0) continue;
        Complex d;
        switch (which) {
            case Deriv::Ex: d = Complex(0, G.x()); break;
            case Deriv::Ey: d = Complex(0, G.y()); break;
            case Deriv::Ez: d = Complex(-gn, 0); break;
            case Deriv::Hxx: d = Complex(-G.x() * G.x(), 0); break;
            case Deriv::Hyy: d = Complex(-G.y() * G.y(), 0); break;
            case Deriv::Hxy: d = Complex(-G.x() * G.y(), 0); break;
            case Deriv::Hxz: d = Complex(0, -G.x() * gn); break;
            case Deriv::Hyz: d = Complex(0, -G.y() * gn); break;
        }
        const Complex env = std::polar(damp, G.x() * x + G.y() * y) * d;
        const auto [m1, m2] = modes.index[static_cast<size_t>(k)];
        const size_t cell = static_cast<size_t>(mod_positive(m1, n1)) * n2 + mod_positive(m2, n2);
        for (int s = 0; s < shapes; ++s) {
            folded[static_cast<size_t>(s)][cell] += basis.base_coeff(s, k) * env;
        }
    }

    const auto& r1 = basis.roots1();
    const auto& r2 = basis.roots2();
    Eigen::VectorXd row(grid.num_patches());
    std::vector<Complex> stage(static_cast<size_t>(n1) * n2);
    for (int s = 0; s < shapes; ++s) {
        const auto& W = folded[static_cast<size_t>(s)];
        // stage[p][i2] = sum_q W[p][q] r2[q i2]
        for (int p = 0; p < n1; ++p) {
            for (int i2 = 0; i2 < n2; ++i2) {
                Complex acc(0, 0);
                int idx = 0;
                for (int q = 0; q < n2; ++q) {
                    acc += W[static_cast<size_t>(p) * n2 + q] * r2[static_cast<size_t>(idx)];
                    idx += i2;
                    if (idx >= n2) idx -= n2;
                }
                stage[static_cast<size_t>(p) * n2 + i2] = acc;
            }
        }
        for (int i2 = 0; i2 < n2; ++i2) {
            for (int i1 = 0; i1 < n1; ++i1) {
                Complex acc(0, 0);
                int idx = 0;
                for (int p = 0; p < n1; ++p) {
                    acc += stage[static_cast<size_t>(p) * n2 + i2] * r1[static_cast<size_t>(idx)];
                    idx += i1;
                    if (idx >= n1) idx -= n1;
                }
                row[grid.encode(i1, i2, s)] = acc.real();
            }
        }
    }
    return row;
}

PotentialField ring_field(const BravaisLattice& lattice, const Vec2& center_frac, double r_in,
                          double r_out, int n_cut) {
    if (!(r_in >= 0.0) || !(r_out > r_in)) {
        throw std::invalid_argument("ring requires 0 <= r_in < r_out");
    }
    ModeTable modes = ModeTable::build(lattice, n_cut);
    const Vec2 center = lattice.frac_to_cart(center_frac);
    const double area = lattice.cell_area();
    std::vector<Complex> coeff(static_cast<size_t>(modes.size()));
    for (int k = 0; k < modes.size(); ++k) {
        const double gn = modes.g_norm[static_cast<size_t>(k)];
        if (gn == 0.0) {
            coeff[static_cast<size_t>(k)] = Complex(kPi * (r_out * r_out - r_in * r_in) / area, 0.0);
            continue;
        }
        const double radial = r_out * std::cyl_bessel_j(1, gn * r_out) -
                              (r_in > 0.0 ? r_in * std::cyl_bessel_j(1, gn * r_in) : 0.0);
        const Vec2& G = modes.g[static_cast<size_t>(k)];
        coeff[static_cast<size_t>(k)] =
            kTwoPi / area * radial / gn * std::polar(1.0, -G.dot(center));
    }
    return PotentialField(lattice, std::move(modes), std::move(coeff));
}

}  // namespace trapforge
