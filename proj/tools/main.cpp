#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trapforge/pipeline.hpp"
#include "trapforge/svg.hpp"

namespace fs = std::filesystem;
using namespace trapforge;

namespace {

int g_log_level = 1;  // 0 quiet, 1 info, 2 debug

void log_info(const std::string& msg) {
    if (g_log_level >= 1) std::cerr << "[trapforge] " << msg << '\n';
}

std::string join_path(const std::string& dir, const std::string& file) {
    if (file.empty() || dir.empty() || fs::path(file).is_absolute()) return file;
    return (fs::path(dir) / file).string();
}

void write_text(const std::string& path, const std::string& text) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

int fail_with_json(const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"]["message"] = e.what();
    std::cerr << err.dump(2) << std::endl;
    return 1;
}

void apply_overrides(RunConfig& cfg, int resolution_override) {
    if (resolution_override > 0) {
        const bool default_cut = cfg.n_cut == 0;
        if (cfg.grid.kind == "hexagonal") {
            cfg.grid.n = resolution_override;
        } else {
            cfg.grid.n1 = resolution_override;
            cfg.grid.n2 = resolution_override;
        }
        if (!default_cut) {
            log_info("resolution override keeps the configured n_cut");
        }
    }
}

std::vector<double> parse_z_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trapforge: periodic surface-electrode rf trap lattice designer"};
    app.require_subcommand(1);

    std::string config_path, out_dir, map_path, z_list_text, log_level = "info";
    int workers = 0, resolution_override = 0;
    unsigned seed = 0;

    app.add_option("--log-level", log_level, "quiet|info|debug")->capture_default_str();

    auto* opt_cmd = app.add_subcommand("optimize", "solve a config and write map/report/svg");
    opt_cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    opt_cmd->add_option("--out-dir", out_dir, "output directory (default: beside the config)");
    opt_cmd->add_option("--seed", seed,
                        "accepted for interface stability; the solve itself is deterministic");
    opt_cmd->add_option("--resolution-override", resolution_override,
                        "replace the patch resolution (n1=n2=n)");

    auto* analyze_cmd = app.add_subcommand("analyze", "re-analyze a stored electrode map");
    analyze_cmd->add_option("--map", map_path, "electrode map file")->required();
    analyze_cmd->add_option("--config", config_path, "config with traps/analysis options")->required();
    analyze_cmd->add_option("--out-dir", out_dir, "output directory");

    auto* render_cmd = app.add_subcommand("render", "render an electrode map as SVG");
    render_cmd->add_option("--map", map_path, "electrode map file")->required();
    render_cmd->add_option("--out-dir", out_dir, "output directory");

    auto* sweep_cmd = app.add_subcommand("sweep", "optimize across a list of trap heights");
    sweep_cmd->add_option("--config", config_path, "single-trap run configuration")->required();
    sweep_cmd->add_option("--z-list", z_list_text, "comma-separated z/d values")->required();
    sweep_cmd->add_option("--out-dir", out_dir, "output directory");
    sweep_cmd->add_option("--workers", workers, "concurrent sweep points (default: cores)");
    sweep_cmd->add_option("--resolution-override", resolution_override,
                          "replace the patch resolution (n1=n2=n)");

    CLI11_PARSE(app, argc, argv);
    if (log_level == "quiet")
        g_log_level = 0;
    else if (log_level == "debug")
        g_log_level = 2;

    try {
        if (opt_cmd->parsed()) {
            RunConfig cfg = RunConfig::load(config_path);
            apply_overrides(cfg, resolution_override);
            if (out_dir.empty()) out_dir = fs::path(config_path).parent_path().string();
            log_info("optimizing " + config_path);
            PipelineResult res = run_optimize(cfg);
            const std::string map_out = join_path(out_dir, cfg.output.map);
            write_text(map_out, res.map.serialize());
            const std::string report_out = join_path(out_dir, cfg.output.report);
            write_text(report_out, res.report.to_json());
            if (!cfg.output.svg.empty()) {
                write_text(join_path(out_dir, cfg.output.svg), render_svg(res.map));
            }
            log_info("C = " + std::to_string(res.report.C) + ", interior patches = " +
                     std::to_string(res.report.railing.interior));
            log_info("wrote " + map_out + " and " + report_out);
        } else if (analyze_cmd->parsed()) {
            RunConfig cfg = RunConfig::load(config_path);
            ElectrodeMapFile map = ElectrodeMapFile::read(map_path);
            PipelineResult res = run_analyze(cfg, map);
            const std::string report_out =
                join_path(out_dir.empty() ? fs::path(map_path).parent_path().string() : out_dir,
                          cfg.output.report);
            write_text(report_out, res.report.to_json());
            log_info("wrote " + report_out);
        } else if (render_cmd->parsed()) {
            ElectrodeMapFile map = ElectrodeMapFile::read(map_path);
            fs::path base(map_path);
            std::string svg_name = base.stem().string() + ".svg";
            const std::string svg_out =
                join_path(out_dir.empty() ? base.parent_path().string() : out_dir, svg_name);
            write_text(svg_out, render_svg(map));
            log_info("wrote " + svg_out);
        } else if (sweep_cmd->parsed()) {
            RunConfig cfg = RunConfig::load(config_path);
            apply_overrides(cfg, resolution_override);
            const std::vector<double> z_values = parse_z_list(z_list_text);
            const auto rows = run_sweep(cfg, z_values, workers);
            const std::string csv_out = join_path(
                out_dir.empty() ? fs::path(config_path).parent_path().string() : out_dir,
                "sweep.csv");
            write_text(csv_out, sweep_csv(rows));
            log_info("wrote " + csv_out);
            for (const auto& row : rows) {
                if (row.status != "ok") log_info("z/d=" + std::to_string(row.z_over_d) + ": " + row.status);
            }
        }
    } catch (const std::exception& e) {
        return fail_with_json(e);
    }
    return 0;
}
