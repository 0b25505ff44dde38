#include "trapforge/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace trapforge {

using Json = nlohmann::ordered_json;

namespace {

Json vec2_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }
Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }
Json mat3_json(const Mat3& m) {
    Json rows = Json::array();
    for (int r = 0; r < 3; ++r) rows.push_back(Json::array({m(r, 0), m(r, 1), m(r, 2)}));
    return rows;
}

Vec2 parse_vec2(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument(where + ": expected [x, y]");
    return Vec2(j[0].get<double>(), j[1].get<double>());
}
Vec3 parse_vec3(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument(where + ": expected [x, y, z]");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}
Mat3 parse_mat3(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument(where + ": expected 3 rows");
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        const Json& row = j[static_cast<size_t>(r)];
        if (!row.is_array() || row.size() != 3)
            throw std::invalid_argument(where + ": row " + std::to_string(r) + " needs 3 entries");
        for (int c = 0; c < 3; ++c) m(r, c) = row[static_cast<size_t>(c)].get<double>();
    }
    return m;
}

}  // namespace

TrapSpec TrapConfig::resolve() const {
    TrapSpec spec;
    spec.label = label;
    spec.position = position;
    if (tensor.has_value()) {
        spec.gamma = *tensor;
    } else if (frequency_ratios.has_value()) {
        spec.gamma = curvature_from_frequencies(*frequency_ratios,
                                                axes.value_or(Mat3::Identity()));
    } else {
        throw std::invalid_argument("trap '" + label +
                                    "': provide either gamma.tensor or frequency_ratios");
    }
    spec.validate();
    return spec;
}

ExtraConstraint ExtraConfig::resolve() const {
    ExtraConstraint e;
    e.point = point;
    e.lambda = lambda;
    if (component == "E_x")
        e.component = Deriv::Ex;
    else if (component == "E_y")
        e.component = Deriv::Ey;
    else if (component == "E_z")
        e.component = Deriv::Ez;
    else
        throw std::invalid_argument("extra constraint component must be E_x, E_y or E_z, got '" +
                                    component + "'");
    if (relation == "equal")
        e.relation = Relation::Equal;
    else if (relation == "at_least")
        e.relation = Relation::AtLeast;
    else if (relation == "at_most")
        e.relation = Relation::AtMost;
    else
        throw std::invalid_argument("extra constraint relation must be equal, at_least or at_most");
    return e;
}

int RunConfig::resolved_n_cut() const {
    if (n_cut > 0) return n_cut;
    if (grid.kind == "hexagonal") return 2 * grid.n;
    return 2 * std::max(grid.n1, grid.n2);
}

PatchGrid RunConfig::patch_grid() const {
    const BravaisLattice lat = lattice();
    if (grid.kind == "oblique") return PatchGrid::oblique(lat, grid.n1, grid.n2);
    if (grid.kind == "hexagonal") return PatchGrid::hexagonal(lat, grid.n);
    throw std::invalid_argument("grid.kind must be 'oblique' or 'hexagonal', got '" + grid.kind +
                                "'");
}

std::vector<TrapSpec> RunConfig::resolved_traps() const {
    std::vector<TrapSpec> out;
    out.reserve(traps.size());
    for (const auto& t : traps) out.push_back(t.resolve());
    return out;
}

std::vector<ExtraConstraint> RunConfig::resolved_extras() const {
    std::vector<ExtraConstraint> out;
    out.reserve(extras.size());
    for (const auto& e : extras) out.push_back(e.resolve());
    return out;
}

std::string RunConfig::to_json() const {
    Json j;
    j["lattice"]["a1"] = vec2_json(a1);
    j["lattice"]["a2"] = vec2_json(a2);
    j["grid"]["kind"] = grid.kind;
    if (grid.kind == "hexagonal") {
        j["grid"]["n"] = grid.n;
    } else {
        j["grid"]["n1"] = grid.n1;
        j["grid"]["n2"] = grid.n2;
    }
    j["n_cut"] = n_cut;
    j["traps"] = Json::array();
    for (const auto& t : traps) {
        Json tj;
        tj["label"] = t.label;
        tj["position"] = vec3_json(t.position);
        if (t.tensor.has_value()) tj["gamma"]["tensor"] = mat3_json(*t.tensor);
        if (t.frequency_ratios.has_value())
            tj["gamma"]["frequency_ratios"] = vec3_json(*t.frequency_ratios);
        if (t.axes.has_value()) tj["gamma"]["axes"] = mat3_json(*t.axes);
        j["traps"].push_back(tj);
    }
    j["extras"] = Json::array();
    for (const auto& e : extras) {
        Json ej;
        ej["point"] = vec3_json(e.point);
        ej["component"] = e.component;
        ej["relation"] = e.relation;
        ej["lambda"] = e.lambda;
        j["extras"].push_back(ej);
    }
    j["solver"]["equality_tol"] = solver.equality_tol;
    j["solver"]["rail_tol"] = solver.rail_tol;
    j["solver"]["gap_tol"] = solver.gap_tol;
    j["solver"]["rank_tol"] = solver.rank_tol;
    j["solver"]["round_threshold"] = solver.round_threshold;
    j["solver"]["max_iterations"] = solver.max_iterations;
    j["solver"]["require_basic"] = solver.require_basic;
    j["analysis"]["grid"]["nx"] = analysis.grid.nx;
    j["analysis"]["grid"]["ny"] = analysis.grid.ny;
    j["analysis"]["grid"]["nz"] = analysis.grid.nz;
    j["analysis"]["grid"]["z_lo"] = analysis.grid.z_lo;
    j["analysis"]["grid"]["z_hi"] = analysis.grid.z_hi;
    j["analysis"]["designed_radius"] = analysis.designed_radius;
    if (analysis.physical.has_value()) {
        const auto& p = *analysis.physical;
        j["analysis"]["physical"]["mass_amu"] = p.mass_amu;
        j["analysis"]["physical"]["charge_e"] = p.charge_e;
        j["analysis"]["physical"]["U_rf_V"] = p.U_rf_V;
        j["analysis"]["physical"]["Omega_rf_Hz"] = p.Omega_rf_Hz;
        j["analysis"]["physical"]["L0_m"] = analysis.L0_m;
        j["analysis"]["physical"]["mathieu_limit"] = p.mathieu_limit;
    }
    j["output"]["map"] = output.map;
    j["output"]["report"] = output.report;
    j["output"]["svg"] = output.svg;
    return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    RunConfig cfg;
    if (!j.contains("lattice")) throw std::invalid_argument("config: missing 'lattice'");
    cfg.a1 = parse_vec2(j["lattice"].at("a1"), "lattice.a1");
    cfg.a2 = parse_vec2(j["lattice"].at("a2"), "lattice.a2");
    if (j.contains("grid")) {
        const Json& g = j["grid"];
        cfg.grid.kind = g.value("kind", std::string("oblique"));
        if (cfg.grid.kind == "hexagonal") {
            cfg.grid.n = g.value("n", 32);
        } else {
            cfg.grid.n1 = g.value("n1", 48);
            cfg.grid.n2 = g.value("n2", cfg.grid.n1);
        }
    }
    cfg.n_cut = j.value("n_cut", 0);
    if (!j.contains("traps") || !j["traps"].is_array() || j["traps"].empty()) {
        throw std::invalid_argument("config: 'traps' must be a non-empty array");
    }
    for (size_t i = 0; i < j["traps"].size(); ++i) {
        const Json& tj = j["traps"][i];
        TrapConfig t;
        t.label = tj.value("label", "trap" + std::to_string(i));
        t.position = parse_vec3(tj.at("position"), "traps[" + std::to_string(i) + "].position");
        if (tj.contains("gamma")) {
            const Json& gj = tj["gamma"];
            if (gj.contains("tensor"))
                t.tensor = parse_mat3(gj["tensor"], "traps[" + std::to_string(i) + "].gamma.tensor");
            if (gj.contains("frequency_ratios"))
                t.frequency_ratios = parse_vec3(gj["frequency_ratios"],
                                                "traps[" + std::to_string(i) + "].gamma.frequency_ratios");
            if (gj.contains("axes"))
                t.axes = parse_mat3(gj["axes"], "traps[" + std::to_string(i) + "].gamma.axes");
        }
        cfg.traps.push_back(std::move(t));
    }
    if (j.contains("extras")) {
        for (size_t i = 0; i < j["extras"].size(); ++i) {
            const Json& ej = j["extras"][i];
            ExtraConfig e;
            e.point = parse_vec3(ej.at("point"), "extras[" + std::to_string(i) + "].point");
            e.component = ej.value("component", std::string("E_z"));
            e.relation = ej.value("relation", std::string("equal"));
            e.lambda = ej.value("lambda", 0.0);
            cfg.extras.push_back(std::move(e));
        }
    }
    if (j.contains("solver")) {
        const Json& s = j["solver"];
        cfg.solver.equality_tol = s.value("equality_tol", cfg.solver.equality_tol);
        cfg.solver.rail_tol = s.value("rail_tol", cfg.solver.rail_tol);
        cfg.solver.gap_tol = s.value("gap_tol", cfg.solver.gap_tol);
        cfg.solver.rank_tol = s.value("rank_tol", cfg.solver.rank_tol);
        cfg.solver.round_threshold = s.value("round_threshold", cfg.solver.round_threshold);
        cfg.solver.max_iterations = s.value("max_iterations", cfg.solver.max_iterations);
        cfg.solver.require_basic = s.value("require_basic", cfg.solver.require_basic);
    }
    if (j.contains("analysis")) {
        const Json& a = j["analysis"];
        if (a.contains("grid")) {
            const Json& g = a["grid"];
            cfg.analysis.grid.nx = g.value("nx", cfg.analysis.grid.nx);
            cfg.analysis.grid.ny = g.value("ny", cfg.analysis.grid.ny);
            cfg.analysis.grid.nz = g.value("nz", cfg.analysis.grid.nz);
            cfg.analysis.grid.z_lo = g.value("z_lo", cfg.analysis.grid.z_lo);
            cfg.analysis.grid.z_hi = g.value("z_hi", cfg.analysis.grid.z_hi);
        }
        cfg.analysis.designed_radius = a.value("designed_radius", cfg.analysis.designed_radius);
        if (a.contains("physical")) {
            const Json& p = a["physical"];
            PhysicalParams pp;
            pp.mass_amu = p.value("mass_amu", pp.mass_amu);
            pp.charge_e = p.value("charge_e", pp.charge_e);
            pp.U_rf_V = p.value("U_rf_V", pp.U_rf_V);
            pp.Omega_rf_Hz = p.value("Omega_rf_Hz", pp.Omega_rf_Hz);
            pp.mathieu_limit = p.value("mathieu_limit", pp.mathieu_limit);
            cfg.analysis.L0_m = p.value("L0_m", 0.0);
            cfg.analysis.physical = pp;
        }
    }
    if (j.contains("output")) {
        const Json& o = j["output"];
        cfg.output.map = o.value("map", cfg.output.map);
        cfg.output.report = o.value("report", cfg.output.report);
        cfg.output.svg = o.value("svg", cfg.output.svg);
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void RunConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file '" + path + "'");
    out << to_json();
}

}  // namespace trapforge
