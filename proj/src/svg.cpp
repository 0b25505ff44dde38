#include "trapforge/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace trapforge {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

std::string render_svg(const ElectrodeMapFile& map, double pixels_per_unit) {
    const BravaisLattice lattice = map.lattice();
    const PatchGrid grid = map.patch_grid();
    if (grid.num_patches() != map.num_patches()) {
        throw std::invalid_argument("electrode map body does not match its grid header");
    }

    // bounding box of the 3x3 tiling
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    for (int s1 = -1; s1 <= 2; ++s1) {
        for (int s2 = -1; s2 <= 2; ++s2) {
            const Vec2 corner = lattice.frac_to_cart(Vec2(s1, s2));
            min_x = std::min(min_x, corner.x());
            max_x = std::max(max_x, corner.x());
            min_y = std::min(min_y, corner.y());
            max_y = std::max(max_y, corner.y());
        }
    }
    const double scale = pixels_per_unit;
    const double width = (max_x - min_x) * scale;
    const double height = (max_y - min_y) * scale;
    auto to_px = [&](const Vec2& cart) {
        // flip y so the first lattice direction reads left-to-right, up
        return Vec2((cart.x() - min_x) * scale, height - (cart.y() - min_y) * scale);
    };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
        << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (int t1 = -1; t1 <= 1; ++t1) {
        for (int t2 = -1; t2 <= 1; ++t2) {
            const Vec2 shift(t1, t2);
            for (int i = 0; i < grid.num_patches(); ++i) {
                const double v = map.values[i];
                std::string fill;
                if (v >= 1.0 - map.rail_tol) {
                    fill = "#3b6fb6";  // rf
                } else if (v <= map.rail_tol) {
                    continue;  // ground stays white
                } else {
                    const int level = static_cast<int>(std::lround(255.0 * (1.0 - v)));
                    char buf[16];
                    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", level, level, level);
                    fill = buf;
                }
                out << "<polygon points=\"";
                bool first = true;
                for (const Vec2& p : grid.patch_polygon(i)) {
                    const Vec2 px = to_px(lattice.frac_to_cart(p + shift));
                    if (!first) out << ' ';
                    out << fmt(px.x()) << ',' << fmt(px.y());
                    first = false;
                }
                out << "\" fill=\"" << fill << "\" stroke=\"none\"/>\n";
            }
        }
    }

    // unit-cell outline
    out << "<polygon points=\"";
    const Vec2 cell[4] = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
    for (int c = 0; c < 4; ++c) {
        const Vec2 px = to_px(lattice.frac_to_cart(cell[c]));
        out << (c ? " " : "") << fmt(px.x()) << ',' << fmt(px.y());
    }
    out << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

    // trap markers
    const double r = 0.035 * scale;
    for (int t1 = -1; t1 <= 1; ++t1) {
        for (int t2 = -1; t2 <= 1; ++t2) {
            for (const Vec3& trap : map.trap_positions) {
                const Vec2 px =
                    to_px(lattice.frac_to_cart(Vec2(trap.x() + t1, trap.y() + t2)));
                out << "<polygon points=\"" << fmt(px.x()) << ',' << fmt(px.y() - r) << ' '
                    << fmt(px.x() - 0.866 * r) << ',' << fmt(px.y() + 0.5 * r) << ' '
                    << fmt(px.x() + 0.866 * r) << ',' << fmt(px.y() + 0.5 * r)
                    << "\" fill=\"#d62728\" stroke=\"white\" stroke-width=\"0.8\"/>\n";
            }
        }
    }
    out << "</svg>\n";
    return out.str();
}

void write_svg(const ElectrodeMapFile& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write SVG file '" + path + "'");
    out << render_svg(map);
}

}  // namespace trapforge
