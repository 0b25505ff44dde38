#ifndef TRAPFORGE_ANALYSIS_HPP
#define TRAPFORGE_ANALYSIS_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trapforge/constraints.hpp"
#include "trapforge/field.hpp"

namespace trapforge {

/// kappa_j = |C| z_j^2 |det Gamma_j|^(1/3), the geometry-only trap
/// strength. Zero (with a degenerate flag) when det Gamma_j = 0.
struct KappaEntry {
    double kappa = 0.0;
    bool degenerate = false;
};
std::vector<KappaEntry> kappa(double C, const std::vector<TrapSpec>& traps);

struct GridSpec {
    int nx = 96, ny = 96, nz = 128;
    double z_lo = 0.05;
    double z_hi = 0.0;  // <= 0: use max(3 z_max, 2 cell diameter)
    std::size_t max_cells = std::size_t(64) * 1024 * 1024;
};

/// Sampled pseudopotential landscape psi(r) = |grad phi(r)|^2 over one
/// unit cell (periodic in-plane, open in z). Values are dimensionless
/// (U_rf^2 / L0^2); the physical pseudopotential in units of the trap
/// energy scale at height z_j is z_j^2 * psi.
class PseudoGrid {
public:
    PseudoGrid(std::shared_ptr<const PotentialField> field, const GridSpec& spec,
               std::vector<double> psi);

    const PotentialField& field() const { return *field_; }
    std::shared_ptr<const PotentialField> field_ptr() const { return field_; }
    const GridSpec& spec() const { return spec_; }
    const std::vector<double>& values() const { return psi_; }

    std::size_t cell_count() const { return psi_.size(); }
    std::size_t index(int i, int j, int k) const;
    double value(int i, int j, int k) const { return psi_[index(i, j, k)]; }
    double z_level(int k) const;
    Vec3 position(int i, int j, int k) const;  // Cartesian

private:
    std::shared_ptr<const PotentialField> field_;
    GridSpec spec_;
    std::vector<double> psi_;
};

/// Evaluate the landscape; z slices run in parallel.
PseudoGrid pseudopotential_grid(std::shared_ptr<const PotentialField> field, GridSpec spec);

struct Minimum {
    Vec3 position = Vec3::Zero();  // Cartesian, refined
    double psi = 0.0;              // refined value
    bool is_field_null = false;    // psi * z^2 below 1e-8
    int designed_trap = -1;        // index into the trap list, -1 = spurious
    std::size_t grid_cell = 0;     // originating grid cell
};

struct MinimaOptions {
    double designed_radius = 0.05;    // L0 units
    double null_threshold = 1e-8;     // on psi * z^2
    int newton_iterations = 40;
};

/// Strict local minima of psi under the 26-neighbor stencil (periodic
/// in-plane, z interior), refined by damped Newton steps on grad psi and
/// classified against the designed trap positions.
std::vector<Minimum> find_minima(const PseudoGrid& grid, const std::vector<TrapSpec>& traps = {},
                                 const MinimaOptions& opts = {});

enum class EscapeRoute { NeighborTrap, Plane, Infinity, Unresolved };
const char* to_string(EscapeRoute route);

struct DepthResult {
    double tau = 0.0;  // z_j^2 (psi_merge - psi_min), units of the trap energy scale
    EscapeRoute route = EscapeRoute::Unresolved;
    bool resolution_warning = false;  // tau within ~2 grid quanta
    double merge_psi = 0.0;
};

/// Merge-level (union-find) trap depths for every detected minimum:
/// cells are activated in ascending psi order; tau is set when a trap's
/// component first touches the top boundary, the bottom boundary, or
/// another trap's component.
std::vector<DepthResult> trap_depths(const PseudoGrid& grid, const std::vector<Minimum>& minima);
DepthResult trap_depth(const PseudoGrid& grid, const Minimum& trap);

struct PhysicalParams {
    double mass_amu = 9.0121831;  // 9Be+
    double charge_e = 1.0;
    double U_rf_V = 50.0;
    double Omega_rf_Hz = 2.0e8;  // drive frequency Omega/2pi
    double z_m = 30e-6;          // physical trap height
    double mathieu_limit = 0.9;
};

struct PhysicalReport {
    double omega_bar = 0.0;              // rad/s, geometric mean
    std::array<double, 3> omega = {};    // rad/s per principal axis
    double depth_scale_eV = 0.0;         // q^2 U^2 / (4 m Omega^2 z^2)
    std::array<double, 3> mathieu_q = {};
    bool stability_warning = false;
};

/// Convert a dimensionless curvature into trap frequencies, the depth
/// energy scale and Mathieu q estimates.
PhysicalReport physical_units(double kappa_value, const Mat3& gamma, const PhysicalParams& p);

}  // namespace trapforge

#endif
