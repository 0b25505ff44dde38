#include "trapforge/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "trapforge/parallel.hpp"

namespace trapforge {

using Json = nlohmann::ordered_json;

namespace {

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

GridSpec resolve_grid_spec(const RunConfig& cfg, const std::vector<TrapSpec>& traps,
                           const BravaisLattice& lattice) {
    GridSpec spec = cfg.analysis.grid;
    if (spec.z_hi <= spec.z_lo) {
        double z_max = 0.0;
        for (const auto& t : traps) z_max = std::max(z_max, t.position.z());
        const double diameter = std::max((lattice.a1() + lattice.a2()).norm(),
                                         (lattice.a1() - lattice.a2()).norm());
        spec.z_hi = std::max(3.0 * z_max, 2.0 * diameter);
    }
    return spec;
}

/// Landscape analysis shared by optimize and analyze: minima, depths and
/// per-trap deltas on the rounded field, plus LP-side residuals.
void analyze_landscape(const RunConfig& cfg, const FourierBasis& basis,
                       const std::vector<TrapSpec>& traps, const Eigen::VectorXd& a_raw,
                       const Eigen::VectorXd& a_rounded, double C, double C_rounded,
                       TrapReport& report) {
    const auto& lattice = basis.lattice();
    const PotentialField lp_field = make_field(basis, a_raw);
    auto rounded_field = std::make_shared<PotentialField>(make_field(basis, a_rounded));
    report.dominant_wavenumber = lp_field.dominant_wavenumber();

    const auto kappas = kappa(C, traps);
    report.traps.resize(traps.size());
    for (size_t j = 0; j < traps.size(); ++j) {
        auto& entry = report.traps[j];
        entry.label = traps[j].label;
        entry.position = traps[j].position;
        entry.kappa = kappas[j].kappa;
        entry.kappa_degenerate = kappas[j].degenerate;
        if (kappas[j].degenerate) {
            report.warnings.push_back("trap '" + traps[j].label +
                                      "': det Gamma = 0, not confining in some direction");
        }

        const Vec3 cart = traps[j].cartesian(lattice);
        const FieldSample lp_sample = lp_field.sample(cart);
        entry.lp_field_residual = lp_sample.gradient.norm();
        const Mat3 lp_target = C * traps[j].gamma;
        entry.lp_curvature_deviation =
            lp_target.norm() > 0 ? (lp_sample.hessian - lp_target).norm() / lp_target.norm()
                                 : lp_sample.hessian.norm();

        const FieldSample r_sample = rounded_field->sample(cart);
        entry.field_residual = r_sample.gradient.norm();
        const double scale = std::abs(C_rounded) * traps[j].gamma.norm() * traps[j].position.z();
        entry.field_residual_scaled =
            scale > 0 ? entry.field_residual / scale : entry.field_residual;
        const Mat3 r_target = C_rounded * traps[j].gamma;
        entry.curvature_deviation =
            r_target.norm() > 0 ? (r_sample.hessian - r_target).norm() / r_target.norm()
                                : r_sample.hessian.norm();

        if (cfg.analysis.physical.has_value() && cfg.analysis.L0_m > 0.0) {
            PhysicalParams p = *cfg.analysis.physical;
            p.z_m = traps[j].position.z() * cfg.analysis.L0_m;
            entry.physical = physical_units(entry.kappa, traps[j].gamma, p);
            if (entry.physical->stability_warning) {
                report.warnings.push_back("trap '" + traps[j].label +
                                          "': Mathieu q exceeds the stability limit");
            }
        }
    }

    GridSpec spec = resolve_grid_spec(cfg, traps, lattice);
    MinimaOptions mopts;
    mopts.designed_radius = cfg.analysis.designed_radius;
    const PseudoGrid grid = pseudopotential_grid(rounded_field, spec);
    const auto minima = find_minima(grid, traps, mopts);
    const auto depths = trap_depths(grid, minima);

    for (size_t m = 0; m < minima.size(); ++m) {
        if (minima[m].designed_trap >= 0) {
            auto& entry = report.traps[static_cast<size_t>(minima[m].designed_trap)];
            entry.detected = true;
            entry.depth = depths[m];
            if (depths[m].resolution_warning) {
                report.warnings.push_back("trap '" + entry.label +
                                          "': depth within ~2 grid quanta, refine the grid");
            }
        } else {
            report.spurious.push_back(
                SpuriousEntry{minima[m].position, minima[m].psi, minima[m].is_field_null});
        }
    }
    for (const auto& entry : report.traps) {
        if (!entry.detected) {
            report.warnings.push_back("trap '" + entry.label +
                                      "': no landscape minimum detected at the trap site");
        }
    }
}

ElectrodeMapFile build_map(const RunConfig& cfg, const std::vector<TrapSpec>& traps,
                           const Eigen::VectorXd& a, double C,
                           const std::vector<KappaEntry>& kappas) {
    ElectrodeMapFile map;
    map.a1 = cfg.a1;
    map.a2 = cfg.a2;
    map.grid_kind = cfg.grid.kind;
    map.n1 = cfg.grid.kind == "hexagonal" ? cfg.grid.n : cfg.grid.n1;
    map.n2 = cfg.grid.kind == "hexagonal" ? cfg.grid.n : cfg.grid.n2;
    map.n_cut = cfg.resolved_n_cut();
    map.rail_tol = cfg.solver.rail_tol;
    map.C = C;
    for (const auto& k : kappas) map.kappas.push_back(k.kappa);
    for (const auto& t : traps) {
        map.trap_positions.push_back(t.position);
        map.trap_labels.push_back(t.label);
    }
    map.values = a;
    return map;
}

}  // namespace

std::string TrapReport::to_json() const {
    Json j;
    j["C"] = C;
    j["C_rounded"] = C_rounded;
    j["residual"] = residual;
    j["gap_certificate"] = gap_certificate;
    j["railing"]["at_zero"] = railing.at_zero;
    j["railing"]["at_one"] = railing.at_one;
    j["railing"]["interior"] = railing.interior;
    j["effective_rank"] = effective_rank;
    j["rank_truncated"] = rank_truncated;
    j["dominant_wavenumber"] = dominant_wavenumber;
    j["traps"] = Json::array();
    for (const auto& t : traps) {
        Json tj;
        tj["label"] = t.label;
        tj["position"] = vec3_json(t.position);
        tj["kappa"] = t.kappa;
        tj["kappa_degenerate"] = t.kappa_degenerate;
        tj["lp_field_residual"] = t.lp_field_residual;
        tj["lp_curvature_deviation"] = t.lp_curvature_deviation;
        tj["field_residual"] = t.field_residual;
        tj["field_residual_scaled"] = t.field_residual_scaled;
        tj["curvature_deviation"] = t.curvature_deviation;
        tj["detected"] = t.detected;
        if (t.depth.has_value()) {
            tj["depth"]["tau"] = t.depth->tau;
            tj["depth"]["route"] = to_string(t.depth->route);
            tj["depth"]["merge_psi"] = t.depth->merge_psi;
            tj["depth"]["resolution_warning"] = t.depth->resolution_warning;
        }
        if (t.physical.has_value()) {
            const auto& p = *t.physical;
            tj["physical"]["omega_bar_Hz"] = p.omega_bar / (2.0 * M_PI);
            tj["physical"]["omega_Hz"] =
                Json::array({p.omega[0] / (2.0 * M_PI), p.omega[1] / (2.0 * M_PI),
                             p.omega[2] / (2.0 * M_PI)});
            tj["physical"]["depth_scale_eV"] = p.depth_scale_eV;
            tj["physical"]["mathieu_q"] =
                Json::array({p.mathieu_q[0], p.mathieu_q[1], p.mathieu_q[2]});
            tj["physical"]["stability_warning"] = p.stability_warning;
        }
        j["traps"].push_back(tj);
    }
    j["spurious"] = Json::array();
    for (const auto& s : spurious) {
        Json sj;
        sj["position"] = vec3_json(s.position);
        sj["psi"] = s.psi;
        sj["is_field_null"] = s.is_field_null;
        j["spurious"].push_back(sj);
    }
    j["warnings"] = warnings;
    j["runtime_s"] = runtime_s;
    return j.dump(2) + "\n";
}

PipelineResult run_optimize(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const BravaisLattice lattice = cfg.lattice();
    const PatchGrid grid = cfg.patch_grid();
    const FourierBasis basis(lattice, grid, cfg.resolved_n_cut());
    const ConstraintSystem system =
        assemble(basis, cfg.resolved_traps(), cfg.resolved_extras());
    const std::vector<TrapSpec>& traps = system.traps;  // gamma normalized
    OptimizationResult opt = solve(system, cfg.solver);
    const RoundReport rounded = round_rails(opt, basis, traps, cfg.solver.round_threshold);

    PipelineResult result;
    TrapReport& report = result.report;
    report.C = opt.C;
    report.C_rounded = rounded.C_rounded;
    report.residual = opt.residual;
    report.gap_certificate = opt.gap_certificate;
    report.railing = opt.railing;
    report.effective_rank = opt.effective_rank;
    report.rank_truncated = opt.rank_truncated;
    if (opt.rank_truncated > 0) {
        report.warnings.push_back("constraint matrix is rank-deficient (" +
                                  std::to_string(opt.rank_truncated) +
                                  " singular values truncated); traps may be placed symmetrically");
    }

    analyze_landscape(cfg, basis, traps, opt.a, rounded.a, opt.C, rounded.C_rounded, report);

    result.map = build_map(cfg, traps, opt.a, opt.C, kappa(opt.C, traps));
    result.optimization = std::move(opt);
    report.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

PipelineResult run_analyze(const RunConfig& cfg, const ElectrodeMapFile& map) {
    const auto start = std::chrono::steady_clock::now();
    const BravaisLattice lattice = map.lattice();
    const PatchGrid grid = map.patch_grid();
    if (grid.num_patches() != map.num_patches()) {
        throw std::invalid_argument("electrode map body does not match its grid header");
    }
    const FourierBasis basis(lattice, grid, map.n_cut > 0 ? map.n_cut : cfg.resolved_n_cut());
    const ConstraintSystem system =
        assemble(basis, cfg.resolved_traps(), cfg.resolved_extras());
    const std::vector<TrapSpec>& traps = system.traps;  // gamma normalized
    const InhomResult inhom = inhomogeneous_solution(system.A, system.b, cfg.solver.rank_tol);
    const double g2 = inhom.g.squaredNorm();
    const double C_est = g2 > 0 ? map.values.dot(inhom.g) / g2 : 0.0;

    PipelineResult result;
    TrapReport& report = result.report;
    report.C = C_est;
    report.residual = (system.A * map.values - C_est * system.b).lpNorm<Eigen::Infinity>();
    report.railing = rail_stats(map.values, cfg.solver.rail_tol);
    report.effective_rank = inhom.effective_rank;
    report.rank_truncated = inhom.truncated;
    if (map.C != 0.0 && std::abs(map.C - C_est) > 1e-6 * (1.0 + std::abs(map.C))) {
        report.warnings.push_back("map header C is inconsistent with the body amplitudes");
    }

    Eigen::VectorXd a_rounded(map.values.size());
    for (Eigen::Index i = 0; i < map.values.size(); ++i) {
        a_rounded[i] = map.values[i] > cfg.solver.round_threshold ? 1.0 : 0.0;
    }
    const double C_rounded = g2 > 0 ? a_rounded.dot(inhom.g) / g2 : 0.0;
    report.C_rounded = C_rounded;

    analyze_landscape(cfg, basis, traps, map.values, a_rounded, C_est, C_rounded, report);
    if (report.traps.empty() ||
        std::none_of(report.traps.begin(), report.traps.end(),
                     [](const TrapReportEntry& t) { return t.detected; })) {
        report.warnings.push_back("no designed minima detected in the landscape");
    }

    result.map = map;
    report.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, const std::vector<double>& z_values,
                                int workers) {
    if (cfg.traps.size() != 1) {
        throw std::invalid_argument("sweep requires a single-trap-per-cell config");
    }
    std::vector<SweepRow> rows(z_values.size());
    const int n = static_cast<int>(z_values.size());

    parallel_for(
        n,
        [&](int i) {
        SweepRow& row = rows[static_cast<size_t>(i)];
        row.z_over_d = z_values[static_cast<size_t>(i)];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            RunConfig point = cfg;
            point.traps[0].position.z() = row.z_over_d;
            const PipelineResult res = run_optimize(point);
            row.kappa = res.report.traps.at(0).kappa;
            row.interior_count = res.report.railing.interior;
            if (res.report.traps.at(0).depth.has_value()) {
                row.tau = res.report.traps.at(0).depth->tau;
            } else {
                row.status = "no_depth";
            }
        } catch (const std::exception& e) {
            std::string msg = e.what();
            for (char& c : msg) {
                if (c == ',' || c == '\n') c = ';';
            }
            row.status = "error: " + msg;
        }
            row.runtime_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        },
        workers);
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "z_over_d,kappa,tau,interior_count,runtime_s,status\n";
    out.precision(12);
    for (const auto& r : rows) {
        out << r.z_over_d << ',' << r.kappa << ',' << r.tau << ',' << r.interior_count << ','
            << r.runtime_s << ',' << r.status << '\n';
    }
    return out.str();
}

double suggest_suppression_lambda(const PotentialField& field, double C, const Vec3& site_frac) {
    const auto& lattice = field.lattice();
    const int samples = 24;
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
        for (int j = 0; j < samples; ++j) {
            const Vec2 xy = lattice.frac_to_cart(
                Vec2((i + 0.5) / samples, (j + 0.5) / samples));
            acc += field.sample(Vec3(xy.x(), xy.y(), site_frac.z())).gradient.squaredNorm();
        }
    }
    const double rms = std::sqrt(acc / (samples * samples));
    return C != 0.0 ? rms / std::abs(C) : rms;
}

}  // namespace trapforge
