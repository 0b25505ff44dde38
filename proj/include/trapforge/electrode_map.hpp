#ifndef TRAPFORGE_ELECTRODE_MAP_HPP
#define TRAPFORGE_ELECTRODE_MAP_HPP

#include <string>
#include <vector>

#include "trapforge/lattice.hpp"

namespace trapforge {

/// Serialized electrode map: a plain-text header (lattice vectors, grid
/// kind and size, rail tolerance, scale C, kappa list, optional trap
/// markers) followed by the N row-major patch values. Railed amplitudes
/// are written as the characters '0'/'1'; interior ones as decimals.
struct ElectrodeMapFile {
    Vec2 a1 = Vec2(1, 0), a2 = Vec2(0, 1);
    std::string grid_kind = "oblique";  // oblique | hexagonal
    int n1 = 0, n2 = 0;                 // hexagonal: n1 = n2 = n
    int n_cut = 0;
    double rail_tol = 1e-7;
    double C = 0.0;
    std::vector<double> kappas;
    std::vector<Vec3> trap_positions;          // optional, frac x, frac y, z
    std::vector<std::string> trap_labels;      // parallel to trap_positions
    Eigen::VectorXd values;                    // length N

    int num_patches() const { return static_cast<int>(values.size()); }
    int interior_count() const;

    std::string serialize() const;
    static ElectrodeMapFile parse(const std::string& text);
    static ElectrodeMapFile read(const std::string& path);
    void write(const std::string& path) const;

    BravaisLattice lattice() const { return BravaisLattice(a1, a2); }
    PatchGrid patch_grid() const;
};

}  // namespace trapforge

#endif
