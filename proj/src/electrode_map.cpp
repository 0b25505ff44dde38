#include "trapforge/electrode_map.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trapforge {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

int ElectrodeMapFile::interior_count() const {
    int n = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] > rail_tol && values[i] < 1.0 - rail_tol) ++n;
    }
    return n;
}

std::string ElectrodeMapFile::serialize() const {
    std::ostringstream out;
    out << "# trapforge electrode map v1\n";
    out << "a1 " << format_double(a1.x()) << ' ' << format_double(a1.y()) << '\n';
    out << "a2 " << format_double(a2.x()) << ' ' << format_double(a2.y()) << '\n';
    if (grid_kind == "hexagonal") {
        out << "grid hexagonal " << n1 << '\n';
    } else {
        out << "grid oblique " << n1 << ' ' << n2 << '\n';
    }
    out << "n_cut " << n_cut << '\n';
    out << "rail_tol " << format_double(rail_tol) << '\n';
    out << "C " << format_double(C) << '\n';
    out << "kappa";
    for (double k : kappas) out << ' ' << format_double(k);
    out << '\n';
    for (size_t t = 0; t < trap_positions.size(); ++t) {
        const std::string label = t < trap_labels.size() ? trap_labels[t] : "";
        out << "trap " << (label.empty() ? "trap" + std::to_string(t) : label) << ' '
            << format_double(trap_positions[t].x()) << ' ' << format_double(trap_positions[t].y())
            << ' ' << format_double(trap_positions[t].z()) << '\n';
    }
    out << "body\n";
    const int per_line = grid_kind == "hexagonal" ? 2 * n1 : n1;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (v <= rail_tol) {
            out << '0';
        } else if (v >= 1.0 - rail_tol) {
            out << '1';
        } else {
            out << format_double(v);
        }
        out << (((i + 1) % per_line == 0) ? '\n' : ' ');
    }
    if (values.size() % per_line != 0) out << '\n';
    return out.str();
}

ElectrodeMapFile ElectrodeMapFile::parse(const std::string& text) {
    ElectrodeMapFile map;
    std::istringstream in(text);
    std::string line;
    bool in_body = false;
    std::vector<double> body;
    bool have_a1 = false, have_a2 = false, have_grid = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (in_body) {
            double v;
            while (ls >> v) body.push_back(v);
            continue;
        }
        std::string key;
        ls >> key;
        bool malformed = false;
        if (key == "a1") {
            malformed = !(ls >> map.a1.x() >> map.a1.y());
            have_a1 = true;
        } else if (key == "a2") {
            malformed = !(ls >> map.a2.x() >> map.a2.y());
            have_a2 = true;
        } else if (key == "grid") {
            ls >> map.grid_kind;
            if (map.grid_kind == "hexagonal") {
                malformed = !(ls >> map.n1);
                map.n2 = map.n1;
            } else if (map.grid_kind == "oblique") {
                malformed = !(ls >> map.n1 >> map.n2);
            } else {
                throw std::invalid_argument("electrode map: unknown grid kind '" + map.grid_kind +
                                            "'");
            }
            have_grid = true;
        } else if (key == "n_cut") {
            malformed = !(ls >> map.n_cut);
        } else if (key == "rail_tol") {
            malformed = !(ls >> map.rail_tol);
        } else if (key == "C") {
            malformed = !(ls >> map.C);
        } else if (key == "kappa") {
            double k;
            while (ls >> k) map.kappas.push_back(k);
        } else if (key == "trap") {
            std::string label;
            Vec3 p;
            malformed = !(ls >> label >> p.x() >> p.y() >> p.z());
            if (!malformed) {
                map.trap_labels.push_back(label);
                map.trap_positions.push_back(p);
            }
        } else if (key == "body") {
            in_body = true;
        } else {
            throw std::invalid_argument("electrode map: unknown header key '" + key + "'");
        }
        if (malformed) {
            throw std::invalid_argument("electrode map: malformed header line '" + line + "'");
        }
    }
    if (!have_a1 || !have_a2 || !have_grid || !in_body) {
        throw std::invalid_argument("electrode map: incomplete header (need a1, a2, grid, body)");
    }
    const int expected =
        map.grid_kind == "hexagonal" ? 2 * map.n1 * map.n1 : map.n1 * map.n2;
    if (static_cast<int>(body.size()) != expected) {
        throw std::invalid_argument("electrode map: body has " + std::to_string(body.size()) +
                                    " values, expected " + std::to_string(expected));
    }
    map.values.resize(expected);
    for (int i = 0; i < expected; ++i) {
        if (body[static_cast<size_t>(i)] < -1e-9 || body[static_cast<size_t>(i)] > 1 + 1e-9) {
            throw std::invalid_argument("electrode map: value out of [0,1] at index " +
                                        std::to_string(i));
        }
        map.values[i] = std::clamp(body[static_cast<size_t>(i)], 0.0, 1.0);
    }
    return map;
}

ElectrodeMapFile ElectrodeMapFile::read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open electrode map '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ElectrodeMapFile::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write electrode map '" + path + "'");
    out << serialize();
}

PatchGrid ElectrodeMapFile::patch_grid() const {
    const BravaisLattice lat = lattice();
    if (grid_kind == "hexagonal") return PatchGrid::hexagonal(lat, n1);
    return PatchGrid::oblique(lat, n1, n2);
}

}  // namespace trapforge
