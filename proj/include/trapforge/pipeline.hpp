#ifndef TRAPFORGE_PIPELINE_HPP
#define TRAPFORGE_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "trapforge/analysis.hpp"
#include "trapforge/config.hpp"
#include "trapforge/electrode_map.hpp"
#include "trapforge/optimizer.hpp"

namespace trapforge {

struct TrapReportEntry {
    std::string label;
    Vec3 position = Vec3::Zero();
    double kappa = 0.0;
    bool kappa_degenerate = false;
    // pre-rounding (LP solution)
    double lp_field_residual = 0.0;
    double lp_curvature_deviation = 0.0;
    // after rounding to binary electrodes
    double field_residual = 0.0;
    double field_residual_scaled = 0.0;
    double curvature_deviation = 0.0;
    std::optional<DepthResult> depth;
    std::optional<PhysicalReport> physical;
    bool detected = false;  // matched to a landscape minimum
};

struct SpuriousEntry {
    Vec3 position = Vec3::Zero();
    double psi = 0.0;
    bool is_field_null = false;
};

struct TrapReport {
    double C = 0.0;
    double C_rounded = 0.0;
    double residual = 0.0;
    double gap_certificate = 0.0;
    RailStats railing;
    int effective_rank = 0;
    int rank_truncated = 0;
    double dominant_wavenumber = 0.0;
    std::vector<TrapReportEntry> traps;
    std::vector<SpuriousEntry> spurious;
    std::vector<std::string> warnings;
    double runtime_s = 0.0;

    std::string to_json() const;
};

struct PipelineResult {
    ElectrodeMapFile map;
    TrapReport report;
    std::optional<OptimizationResult> optimization;  // absent for analyze-only runs
};

/// assemble -> solve -> round -> analyze. The landscape (minima, depths)
/// is evaluated on the rounded binary electrode; kappa and residuals are
/// reported for both the LP and the rounded solutions.
PipelineResult run_optimize(const RunConfig& config);

/// Re-analyze a stored electrode map (no solve). The map header is
/// authoritative for the geometry; the config supplies traps and
/// analysis options. The header scale C is cross-checked against the
/// body via the inhomogeneous solution.
PipelineResult run_analyze(const RunConfig& config, const ElectrodeMapFile& map);

struct SweepRow {
    double z_over_d = 0.0;
    double kappa = 0.0;
    double tau = 0.0;
    int interior_count = 0;
    double runtime_s = 0.0;
    std::string status = "ok";
};

/// One optimize+analyze per height; failures are recorded per row and
/// the sweep continues. Points run concurrently up to `workers`.
std::vector<SweepRow> run_sweep(const RunConfig& config, const std::vector<double>& z_values,
                                int workers = 0);

/// Fixed, documented column order.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Heuristic suppression magnitude for a spurious site: lambda such that
/// the imposed E_z matches the rms in-plane field magnitude at that
/// height, in units of C.
double suggest_suppression_lambda(const PotentialField& field, double C, const Vec3& site_frac);

}  // namespace trapforge

#endif
