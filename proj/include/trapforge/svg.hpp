#ifndef TRAPFORGE_SVG_HPP
#define TRAPFORGE_SVG_HPP

#include <string>

#include "trapforge/electrode_map.hpp"

namespace trapforge {

/// Render an electrode map as a 3x3 tiling of the unit cell: rf patches
/// filled blue, grounded ones white, interior values gray-scaled, trap
/// positions (when present in the map header) marked with triangles.
/// Output bytes are deterministic for identical input.
std::string render_svg(const ElectrodeMapFile& map, double pixels_per_unit = 160.0);

void write_svg(const ElectrodeMapFile& map, const std::string& path);

}  // namespace trapforge

#endif
