#ifndef TRAPFORGE_CONFIG_HPP
#define TRAPFORGE_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "trapforge/analysis.hpp"
#include "trapforge/constraints.hpp"
#include "trapforge/optimizer.hpp"

namespace trapforge {

/// Trap entry as written in a config file: the curvature tensor is
/// either explicit or built from frequency ratios and axes.
struct TrapConfig {
    std::string label;
    Vec3 position = Vec3::Zero();  // frac x, frac y, z
    std::optional<Mat3> tensor;
    std::optional<Vec3> frequency_ratios;
    std::optional<Mat3> axes;  // columns = principal directions

    TrapSpec resolve() const;
};

struct ExtraConfig {
    Vec3 point = Vec3::Zero();
    std::string component = "E_z";  // E_x, E_y, E_z
    std::string relation = "equal";  // equal, at_least, at_most
    double lambda = 0.0;

    ExtraConstraint resolve() const;
};

struct GridConfig {
    std::string kind = "oblique";  // oblique | hexagonal
    int n1 = 48, n2 = 48;          // oblique
    int n = 32;                    // hexagonal
};

struct AnalysisConfig {
    GridSpec grid;                        // z_hi <= 0 means auto
    std::optional<PhysicalParams> physical;
    double L0_m = 0.0;  // meters per length unit; per-trap z_m = z * L0_m
    double designed_radius = 0.05;
};

struct OutputConfig {
    std::string map = "electrodes.map";
    std::string report = "report.json";
    std::string svg;  // empty = skip
};

struct RunConfig {
    Vec2 a1 = Vec2(1, 0), a2 = Vec2(0, 1);
    GridConfig grid;
    int n_cut = 0;  // 0 = default 2 * max(n1, n2)
    std::vector<TrapConfig> traps;
    std::vector<ExtraConfig> extras;
    SolverOptions solver;
    AnalysisConfig analysis;
    OutputConfig output;

    int resolved_n_cut() const;
    BravaisLattice lattice() const { return BravaisLattice(a1, a2); }
    PatchGrid patch_grid() const;
    std::vector<TrapSpec> resolved_traps() const;
    std::vector<ExtraConstraint> resolved_extras() const;

    std::string to_json() const;  // stable key order, round-trips exactly
    static RunConfig from_json(const std::string& text);
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;
};

}  // namespace trapforge

#endif
