#include "trapforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "trapforge/parallel.hpp"

namespace trapforge {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kElementaryCharge = 1.602176634e-19;  // C
constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg

int mod_positive(long long v, int n) {
    int r = static_cast<int>(v % n);
    return r < 0 ? r + n : r;
}

}  // namespace

std::vector<KappaEntry> kappa(double C, const std::vector<TrapSpec>& traps) {
    std::vector<KappaEntry> out;
    out.reserve(traps.size());
    for (const TrapSpec& t : traps) {
        KappaEntry e;
        const double det = std::abs(t.gamma.determinant());
        e.degenerate = det < 1e-12 * std::pow(t.gamma.norm(), 3);
        e.kappa = std::abs(C) * t.position.z() * t.position.z() * std::cbrt(det);
        out.push_back(e);
    }
    return out;
}

PseudoGrid::PseudoGrid(std::shared_ptr<const PotentialField> field, const GridSpec& spec,
                       std::vector<double> psi)
    : field_(std::move(field)), spec_(spec), psi_(std::move(psi)) {}

std::size_t PseudoGrid::index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * spec_.ny + static_cast<std::size_t>(j)) * spec_.nx +
           static_cast<std::size_t>(i);
}

double PseudoGrid::z_level(int k) const {
    return spec_.z_lo + (spec_.z_hi - spec_.z_lo) * k / (spec_.nz - 1);
}

Vec3 PseudoGrid::position(int i, int j, int k) const {
    const Vec2 xy = field_->lattice().frac_to_cart(
        Vec2(static_cast<double>(i) / spec_.nx, static_cast<double>(j) / spec_.ny));
    return Vec3(xy.x(), xy.y(), z_level(k));
}

PseudoGrid pseudopotential_grid(std::shared_ptr<const PotentialField> field, GridSpec spec) {
    const auto& lattice = field->lattice();
    if (spec.z_hi <= spec.z_lo) {
        const double diameter = std::max((lattice.a1() + lattice.a2()).norm(),
                                         (lattice.a1() - lattice.a2()).norm());
        spec.z_hi = std::max(2.0 * diameter, spec.z_lo * 2.0);
    }
    if (!(spec.z_lo > 0.0)) {
        throw std::invalid_argument("pseudopotential grid requires z_lo > 0");
    }
    if (spec.nx < 2 || spec.ny < 2 || spec.nz < 2) {
        throw std::invalid_argument("pseudopotential grid needs at least 2 samples per axis");
    }
    const std::size_t cells =
        static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny) *
        static_cast<std::size_t>(spec.nz);
    if (cells > spec.max_cells) {
        throw std::runtime_error("pseudopotential grid exceeds the cell budget");
    }

    const auto& modes = field->modes();
    const auto& coeff = field->coeff();
    const int nx = spec.nx, ny = spec.ny;

    // synthesis twiddles e^{+2 pi i k / n}
    std::vector<Complex> tw1(static_cast<size_t>(nx)), tw2(static_cast<size_t>(ny));
    for (int k = 0; k < nx; ++k) tw1[static_cast<size_t>(k)] = std::polar(1.0, kTwoPi * k / nx);
    for (int k = 0; k < ny; ++k) tw2[static_cast<size_t>(k)] = std::polar(1.0, kTwoPi * k / ny);

    std::vector<double> psi(cells, 0.0);
    parallel_for(spec.nz, [&](int kz) {
        const double z = spec.z_lo + (spec.z_hi - spec.z_lo) * kz / (spec.nz - 1);
        const size_t plane = static_cast<size_t>(nx) * ny;
        // folded mode weights for the three gradient components
        std::vector<Complex> wx(plane, Complex(0, 0)), wy(plane, Complex(0, 0)),
            wz(plane, Complex(0, 0));
        for (int k = 0; k < modes.size(); ++k) {
            const Complex s = coeff[static_cast<size_t>(k)];
            if (s == Complex(0, 0)) continue;
            const Vec2& G = modes.g[static_cast<size_t>(k)];
            const double gn = modes.g_norm[static_cast<size_t>(k)];
            const Complex env = s * std::exp(-gn * z);
            const auto [m1, m2] = modes.index[static_cast<size_t>(k)];
            const size_t cell = static_cast<size_t>(mod_positive(m1, nx)) * ny + mod_positive(m2, ny);
            wx[cell] += env * Complex(0, G.x());
            wy[cell] += env * Complex(0, G.y());
            wz[cell] += env * (-gn);
        }

        std::vector<Complex> stage(plane), out(plane);
        double* slice = psi.data() + static_cast<size_t>(kz) * plane;
        std::fill(slice, slice + plane, 0.0);
        for (const auto* w : {&wx, &wy, &wz}) {
            // stage[p][j] = sum_q W[p][q] tw2[q j]
            for (int p = 0; p < nx; ++p) {
                for (int j = 0; j < ny; ++j) {
                    Complex acc(0, 0);
                    int idx = 0;
                    for (int q = 0; q < ny; ++q) {
                        acc += (*w)[static_cast<size_t>(p) * ny + q] * tw2[static_cast<size_t>(idx)];
                        idx += j;
                        if (idx >= ny) idx -= ny;
                    }
                    stage[static_cast<size_t>(p) * ny + j] = acc;
                }
            }
            // out[i][j] = sum_p stage[p][j] tw1[p i]
            for (int j = 0; j < ny; ++j) {
                for (int i = 0; i < nx; ++i) {
                    Complex acc(0, 0);
                    int idx = 0;
                    for (int p = 0; p < nx; ++p) {
                        acc += stage[static_cast<size_t>(p) * ny + j] * tw1[static_cast<size_t>(idx)];
                        idx += i;
                        if (idx >= nx) idx -= nx;
                    }
                    out[static_cast<size_t>(j) * nx + i] = acc;
                }
            }
            for (size_t c = 0; c < plane; ++c) {
                const double re = out[c].real();
                slice[c] += re * re;
            }
        }
    });

    return PseudoGrid(std::move(field), spec, std::move(psi));
}

namespace {

double psi_at(const PotentialField& field, const Vec3& r) {
    return field.sample(r).gradient.squaredNorm();
}

Vec3 refine_minimum(const PotentialField& field, Vec3 r, double step_cap, int iterations) {
    double psi = psi_at(field, r);
    for (int it = 0; it < iterations; ++it) {
        const FieldSample s = field.sample(r);
        const Vec3 grad_psi = 2.0 * s.hessian * s.gradient;
        const Mat3 jac =
            2.0 * (s.hessian * s.hessian + field.third_contraction(r, s.gradient));
        Vec3 step = jac.fullPivLu().solve(-grad_psi);
        if (!step.allFinite()) step = -grad_psi;
        if (step.norm() > step_cap) step *= step_cap / step.norm();
        bool accepted = false;
        for (int halving = 0; halving < 25; ++halving) {
            const Vec3 candidate = r + step;
            if (candidate.z() > 0.0) {
                const double candidate_psi = psi_at(field, candidate);
                if (candidate_psi <= psi) {
                    r = candidate;
                    psi = candidate_psi;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted || step.norm() < 1e-12) break;
    }
    return r;
}

}  // namespace

std::vector<Minimum> find_minima(const PseudoGrid& grid, const std::vector<TrapSpec>& traps,
                                 const MinimaOptions& opts) {
    const auto& spec = grid.spec();
    const auto& field = grid.field();
    const auto& lattice = field.lattice();
    const int nx = spec.nx, ny = spec.ny, nz = spec.nz;

    std::vector<std::size_t> candidates;
    for (int k = 1; k + 1 < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double v = grid.value(i, j, k);
                bool strict = true;
                for (int dk = -1; dk <= 1 && strict; ++dk) {
                    for (int dj = -1; dj <= 1 && strict; ++dj) {
                        for (int di = -1; di <= 1 && strict; ++di) {
                            if (di == 0 && dj == 0 && dk == 0) continue;
                            const int ii = (i + di + nx) % nx;
                            const int jj = (j + dj + ny) % ny;
                            if (grid.value(ii, jj, k + dk) <= v) strict = false;
                        }
                    }
                }
                if (strict) candidates.push_back(grid.index(i, j, k));
            }
        }
    }

    const double cell_step = std::max((lattice.a1() / nx).norm(), (lattice.a2() / ny).norm());
    const double dz = (spec.z_hi - spec.z_lo) / (nz - 1);
    const double step_cap = 2.0 * std::hypot(cell_step, dz);

    std::vector<Minimum> found;
    for (std::size_t cell : candidates) {
        const int k = static_cast<int>(cell / (static_cast<std::size_t>(nx) * ny));
        const int rem = static_cast<int>(cell % (static_cast<std::size_t>(nx) * ny));
        const int j = rem / nx, i = rem % nx;
        Minimum m;
        m.grid_cell = cell;
        m.position = refine_minimum(field, grid.position(i, j, k), step_cap,
                                    opts.newton_iterations);
        m.psi = psi_at(field, m.position);
        m.is_field_null = m.psi * m.position.z() * m.position.z() < opts.null_threshold;
        found.push_back(m);
    }

    // deduplicate minima whose refinements converged to the same point
    std::sort(found.begin(), found.end(),
              [](const Minimum& a, const Minimum& b) { return a.psi < b.psi; });
    std::vector<Minimum> unique;
    for (const Minimum& m : found) {
        bool duplicate = false;
        for (const Minimum& u : unique) {
            const double dxy =
                lattice.min_image_distance(m.position.head<2>(), u.position.head<2>());
            if (std::hypot(dxy, m.position.z() - u.position.z()) < 1e-4) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) unique.push_back(m);
    }

    for (Minimum& m : unique) {
        for (size_t t = 0; t < traps.size(); ++t) {
            const Vec3 tc = traps[t].cartesian(lattice);
            const double dxy = lattice.min_image_distance(m.position.head<2>(), tc.head<2>());
            if (std::hypot(dxy, m.position.z() - tc.z()) < opts.designed_radius) {
                m.designed_trap = static_cast<int>(t);
                break;
            }
        }
    }
    return unique;
}

const char* to_string(EscapeRoute route) {
    switch (route) {
        case EscapeRoute::NeighborTrap: return "neighbor_trap";
        case EscapeRoute::Plane: return "plane";
        case EscapeRoute::Infinity: return "infinity";
        case EscapeRoute::Unresolved: return "unresolved";
    }
    return "unresolved";
}

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), flags_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t(0));
    }
    std::size_t find(std::size_t v) {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }
    std::size_t link(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        parent_[b] = a;
        flags_[a] |= flags_[b];
        return a;
    }
    unsigned char& flags(std::size_t root) { return flags_[root]; }

private:
    std::vector<std::size_t> parent_;
    std::vector<unsigned char> flags_;
};

constexpr unsigned char kTouchTop = 1;
constexpr unsigned char kTouchBottom = 2;
constexpr unsigned char kHasTrap = 4;

}  // namespace

std::vector<DepthResult> trap_depths(const PseudoGrid& grid, const std::vector<Minimum>& minima) {
    const auto& spec = grid.spec();
    const int nx = spec.nx, ny = spec.ny, nz = spec.nz;
    const std::size_t cells = grid.cell_count();
    const std::size_t kTop = cells, kBottom = cells + 1;

    std::vector<DepthResult> results(minima.size());
    if (minima.empty()) return results;

    std::vector<std::size_t> order(cells);
    std::iota(order.begin(), order.end(), std::size_t(0));
    const auto& psi = grid.values();
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return psi[a] != psi[b] ? psi[a] < psi[b] : a < b;
    });

    UnionFind uf(cells + 2);
    uf.flags(kTop) = kTouchTop;
    uf.flags(kBottom) = kTouchBottom;
    std::vector<bool> active(cells, false);

    std::vector<std::size_t> trap_cell(minima.size());
    std::vector<bool> resolved(minima.size(), false);
    for (size_t t = 0; t < minima.size(); ++t) trap_cell[t] = minima[t].grid_cell;

    const std::size_t plane = static_cast<std::size_t>(nx) * ny;
    auto decompose = [&](std::size_t cell, int& i, int& j, int& k) {
        k = static_cast<int>(cell / plane);
        const int rem = static_cast<int>(cell % plane);
        j = rem / nx;
        i = rem % nx;
    };

    std::size_t remaining = minima.size();
    for (const std::size_t cell : order) {
        if (remaining == 0) break;
        const double level = psi[cell];
        active[cell] = true;
        int i, j, k;
        decompose(cell, i, j, k);

        // a union that joins a trap component with boundary or another
        // trap fixes that trap's depth at the current level
        auto merge_into = [&](std::size_t other) {
            const std::size_t ra = uf.find(cell);
            const std::size_t rb = uf.find(other);
            if (ra == rb) return;
            for (size_t t = 0; t < minima.size(); ++t) {
                if (resolved[t]) continue;
                const std::size_t rt = uf.find(trap_cell[t]);
                std::size_t self, partner;
                if (rt == ra)
                    self = ra, partner = rb;
                else if (rt == rb)
                    self = rb, partner = ra;
                else
                    continue;
                const unsigned char pf = uf.flags(partner);
                if (pf == 0) continue;
                resolved[t] = true;
                --remaining;
                auto& res = results[t];
                res.merge_psi = level;
                res.tau = minima[t].position.z() * minima[t].position.z() *
                          std::max(level - minima[t].psi, 0.0);
                if (pf & kHasTrap)
                    res.route = EscapeRoute::NeighborTrap;
                else if (pf & kTouchBottom)
                    res.route = EscapeRoute::Plane;
                else
                    res.route = EscapeRoute::Infinity;
                // grid quantum near the merge cell
                double quantum = 0.0;
                for (int dk = -1; dk <= 1; ++dk) {
                    const int kk = k + dk;
                    if (kk < 0 || kk >= nz) continue;
                    for (int dj = -1; dj <= 1; ++dj) {
                        for (int di = -1; di <= 1; ++di) {
                            const int ii = (i + di + nx) % nx;
                            const int jj = (j + dj + ny) % ny;
                            quantum = std::max(
                                quantum, std::abs(grid.value(ii, jj, kk) - level));
                        }
                    }
                }
                res.resolution_warning =
                    res.tau < 2.0 * quantum * minima[t].position.z() * minima[t].position.z();
            }
            uf.link(ra, rb);
        };

        for (size_t t = 0; t < minima.size(); ++t) {
            if (trap_cell[t] == cell) uf.flags(uf.find(cell)) |= kHasTrap;
        }
        if (k == 0) merge_into(kBottom);
        if (k == nz - 1) merge_into(kTop);
        for (int dk = -1; dk <= 1; ++dk) {
            const int kk = k + dk;
            if (kk < 0 || kk >= nz) continue;
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0 && dk == 0) continue;
                    const int ii = (i + di + nx) % nx;
                    const int jj = (j + dj + ny) % ny;
                    const std::size_t nb = grid.index(ii, jj, kk);
                    if (active[nb]) merge_into(nb);
                }
            }
        }
    }
    return results;
}

DepthResult trap_depth(const PseudoGrid& grid, const Minimum& trap) {
    return trap_depths(grid, {trap}).front();
}

PhysicalReport physical_units(double kappa_value, const Mat3& gamma, const PhysicalParams& p) {
    if (!(p.mass_amu > 0.0) || !(p.charge_e > 0.0) || !(p.U_rf_V > 0.0) ||
        !(p.Omega_rf_Hz > 0.0) || !(p.z_m > 0.0)) {
        throw std::invalid_argument("physical parameters must be positive");
    }
    PhysicalReport out;
    const double q = p.charge_e * kElementaryCharge;
    const double m = p.mass_amu * kAtomicMassUnit;
    const double omega_rf = kTwoPi * p.Omega_rf_Hz;
    const double z2 = p.z_m * p.z_m;

    out.omega_bar = q * p.U_rf_V * kappa_value / (std::sqrt(2.0) * m * omega_rf * z2);
    out.depth_scale_eV =
        q * q * p.U_rf_V * p.U_rf_V / (4.0 * m * omega_rf * omega_rf * z2) / kElementaryCharge;

    Eigen::SelfAdjointEigenSolver<Mat3> eig(gamma);
    const Vec3 mu = eig.eigenvalues();
    const double det = std::abs(mu.x() * mu.y() * mu.z());
    const double det3 = std::cbrt(det);
    for (int a = 0; a < 3; ++a) {
        out.omega[static_cast<size_t>(a)] =
            det3 > 0.0 ? out.omega_bar * std::abs(mu[a]) / det3 : 0.0;
        out.mathieu_q[static_cast<size_t>(a)] =
            2.0 * std::sqrt(2.0) * out.omega[static_cast<size_t>(a)] / omega_rf;
        if (out.mathieu_q[static_cast<size_t>(a)] > p.mathieu_limit) out.stability_warning = true;
    }
    return out;
}

}  // namespace trapforge
