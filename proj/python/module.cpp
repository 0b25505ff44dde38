#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trapforge/analysis.hpp"
#include "trapforge/config.hpp"
#include "trapforge/electrode_map.hpp"
#include "trapforge/optimizer.hpp"
#include "trapforge/pipeline.hpp"
#include "trapforge/svg.hpp"

namespace py = pybind11;
using namespace trapforge;

namespace {

PatchGrid make_grid(const BravaisLattice& lattice, const std::string& kind, int n1, int n2) {
    if (kind == "oblique") return PatchGrid::oblique(lattice, n1, n2 > 0 ? n2 : n1);
    if (kind == "hexagonal") return PatchGrid::hexagonal(lattice, n1);
    throw std::invalid_argument("grid kind must be 'oblique' or 'hexagonal'");
}

py::array_t<double> grid_values(const PseudoGrid& grid) {
    const auto& spec = grid.spec();
    py::array_t<double> out({spec.nz, spec.ny, spec.nx});
    std::copy(grid.values().begin(), grid.values().end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_trapforge, m) {
    m.doc() = "Periodic surface-electrode rf trap lattice design";

    py::class_<BravaisLattice>(m, "BravaisLattice")
        .def(py::init<const Vec2&, const Vec2&>(), py::arg("a1"), py::arg("a2"))
        .def_property_readonly("a1", &BravaisLattice::a1)
        .def_property_readonly("a2", &BravaisLattice::a2)
        .def_property_readonly("g1", &BravaisLattice::g1)
        .def_property_readonly("g2", &BravaisLattice::g2)
        .def_property_readonly("cell_area", &BravaisLattice::cell_area)
        .def("frac_to_cart", &BravaisLattice::frac_to_cart)
        .def("cart_to_frac", &BravaisLattice::cart_to_frac);

    m.def("reciprocal_vectors", &reciprocal_vectors, py::arg("a1"), py::arg("a2"));

    py::class_<PatchGrid>(m, "PatchGrid")
        .def_property_readonly("num_patches", &PatchGrid::num_patches)
        .def_property_readonly("n1", &PatchGrid::n1)
        .def_property_readonly("n2", &PatchGrid::n2)
        .def("patch_polygon", &PatchGrid::patch_polygon)
        .def("patch_index_at", &PatchGrid::patch_index_at);

    m.def("build_patch_grid", &make_grid, py::arg("lattice"), py::arg("kind"), py::arg("n1"),
          py::arg("n2") = 0);

    py::class_<FieldSample>(m, "FieldSample")
        .def_readonly("value", &FieldSample::value)
        .def_readonly("gradient", &FieldSample::gradient)
        .def_readonly("hessian", &FieldSample::hessian);

    py::class_<FourierBasis>(m, "FourierBasis")
        .def(py::init<const BravaisLattice&, const PatchGrid&, int>(), py::arg("lattice"),
             py::arg("grid"), py::arg("n_cut"))
        .def_property_readonly("n_cut", &FourierBasis::n_cut)
        .def_property_readonly("mode_count",
                               [](const FourierBasis& b) { return b.modes().size(); })
        .def("evaluate",
             [](const FourierBasis& b, const Eigen::VectorXd& a, const Vec3& r) {
                 return evaluate(b, a, r);
             })
        .def("evaluate_row",
             [](const FourierBasis& b, const Vec3& r, const std::string& which, double prune) {
                 static const std::map<std::string, Deriv> lookup = {
                     {"E_x", Deriv::Ex},   {"E_y", Deriv::Ey},   {"E_z", Deriv::Ez},
                     {"H_xx", Deriv::Hxx}, {"H_yy", Deriv::Hyy}, {"H_xy", Deriv::Hxy},
                     {"H_xz", Deriv::Hxz}, {"H_yz", Deriv::Hyz}};
                 return evaluate_row(b, r, lookup.at(which), prune);
             },
             py::arg("r"), py::arg("which"), py::arg("prune_tol") = 0.0);

    py::class_<PotentialField, std::shared_ptr<PotentialField>>(m, "PotentialField")
        .def("sample", &PotentialField::sample)
        .def_property_readonly("dominant_wavenumber", &PotentialField::dominant_wavenumber);

    m.def("make_field", [](const FourierBasis& b, const Eigen::VectorXd& a) {
        return std::make_shared<PotentialField>(make_field(b, a));
    });
    m.def(
        "ring_field",
        [](const BravaisLattice& lat, const Vec2& center, double r_in, double r_out, int n_cut) {
            return std::make_shared<PotentialField>(ring_field(lat, center, r_in, r_out, n_cut));
        },
        py::arg("lattice"), py::arg("center_frac"), py::arg("r_in"), py::arg("r_out"),
        py::arg("n_cut"));

    py::class_<TrapSpec>(m, "TrapSpec")
        .def(py::init([](const Vec3& position, const Mat3& gamma, const std::string& label) {
                 TrapSpec t;
                 t.position = position;
                 t.gamma = gamma;
                 t.label = label;
                 t.validate();
                 return t;
             }),
             py::arg("position"), py::arg("gamma"), py::arg("label") = "trap")
        .def_readonly("position", &TrapSpec::position)
        .def_readonly("gamma", &TrapSpec::gamma)
        .def_readonly("label", &TrapSpec::label);

    m.def("curvature_from_frequencies", &curvature_from_frequencies, py::arg("ratios"),
          py::arg("axes") = Mat3(Mat3::Identity()));

    py::class_<ConstraintSystem>(m, "ConstraintSystem")
        .def_readonly("A", &ConstraintSystem::A)
        .def_readonly("b", &ConstraintSystem::b)
        .def_property_readonly("equality_rows", &ConstraintSystem::equality_rows)
        .def_readonly("trap_count", &ConstraintSystem::trap_count);

    m.def(
        "assemble",
        [](const FourierBasis& basis, const std::vector<TrapSpec>& traps) {
            return assemble(basis, traps);
        },
        py::arg("basis"), py::arg("traps"));

    py::class_<RailStats>(m, "RailStats")
        .def_readonly("at_zero", &RailStats::at_zero)
        .def_readonly("at_one", &RailStats::at_one)
        .def_readonly("interior", &RailStats::interior);

    py::class_<OptimizationResult>(m, "OptimizationResult")
        .def_readonly("a", &OptimizationResult::a)
        .def_readonly("C", &OptimizationResult::C)
        .def_readonly("railing", &OptimizationResult::railing)
        .def_readonly("residual", &OptimizationResult::residual)
        .def_readonly("gap_certificate", &OptimizationResult::gap_certificate)
        .def_readonly("inhom", &OptimizationResult::inhom)
        .def_readonly("rounded_a", &OptimizationResult::rounded_a)
        .def_readonly("C_rounded", &OptimizationResult::C_rounded);

    m.def(
        "solve",
        [](const ConstraintSystem& system) { return solve(system); },
        py::arg("system"));
    m.def("inhomogeneous_solution",
          [](const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
              return inhomogeneous_solution(A, b).g;
          });

    py::class_<PseudoGrid>(m, "PseudoGrid")
        .def_property_readonly("values", &grid_values)
        .def_property_readonly("z_levels", [](const PseudoGrid& g) {
            std::vector<double> z(static_cast<size_t>(g.spec().nz));
            for (int k = 0; k < g.spec().nz; ++k) z[static_cast<size_t>(k)] = g.z_level(k);
            return z;
        });

    m.def(
        "pseudopotential_grid",
        [](std::shared_ptr<PotentialField> field, int nx, int ny, int nz, double z_lo,
           double z_hi) {
            GridSpec spec;
            spec.nx = nx;
            spec.ny = ny;
            spec.nz = nz;
            spec.z_lo = z_lo;
            spec.z_hi = z_hi;
            return pseudopotential_grid(std::move(field), spec);
        },
        py::arg("field"), py::arg("nx") = 96, py::arg("ny") = 96, py::arg("nz") = 128,
        py::arg("z_lo") = 0.05, py::arg("z_hi") = 0.0);

    py::class_<Minimum>(m, "Minimum")
        .def_readonly("position", &Minimum::position)
        .def_readonly("psi", &Minimum::psi)
        .def_readonly("is_field_null", &Minimum::is_field_null)
        .def_readonly("designed_trap", &Minimum::designed_trap);

    m.def(
        "find_minima",
        [](const PseudoGrid& grid, const std::vector<TrapSpec>& traps) {
            return find_minima(grid, traps);
        },
        py::arg("grid"), py::arg("traps") = std::vector<TrapSpec>());

    py::class_<DepthResult>(m, "DepthResult")
        .def_readonly("tau", &DepthResult::tau)
        .def_property_readonly("route",
                               [](const DepthResult& d) { return std::string(to_string(d.route)); })
        .def_readonly("resolution_warning", &DepthResult::resolution_warning);

    m.def("trap_depth", &trap_depth, py::arg("grid"), py::arg("minimum"));
    m.def("trap_depths", &trap_depths, py::arg("grid"), py::arg("minima"));

    m.def(
        "kappa",
        [](double C, const std::vector<TrapSpec>& traps) {
            std::vector<double> out;
            for (const auto& e : kappa(C, traps)) out.push_back(e.kappa);
            return out;
        },
        py::arg("C"), py::arg("traps"));

    py::class_<PhysicalReport>(m, "PhysicalReport")
        .def_readonly("omega_bar", &PhysicalReport::omega_bar)
        .def_readonly("omega", &PhysicalReport::omega)
        .def_readonly("depth_scale_eV", &PhysicalReport::depth_scale_eV)
        .def_readonly("mathieu_q", &PhysicalReport::mathieu_q)
        .def_readonly("stability_warning", &PhysicalReport::stability_warning);

    m.def(
        "physical_units",
        [](double kappa_value, const Mat3& gamma, double mass_amu, double charge_e, double U_rf_V,
           double Omega_rf_Hz, double z_m) {
            PhysicalParams p;
            p.mass_amu = mass_amu;
            p.charge_e = charge_e;
            p.U_rf_V = U_rf_V;
            p.Omega_rf_Hz = Omega_rf_Hz;
            p.z_m = z_m;
            return physical_units(kappa_value, gamma, p);
        },
        py::arg("kappa"), py::arg("gamma"), py::arg("mass_amu") = 9.0121831,
        py::arg("charge_e") = 1.0, py::arg("U_rf_V") = 50.0, py::arg("Omega_rf_Hz") = 2.0e8,
        py::arg("z_m") = 30e-6);

    m.def("optimize_config", [](const std::string& config_json) {
        const RunConfig cfg = RunConfig::from_json(config_json);
        PipelineResult res = run_optimize(cfg);
        py::dict out;
        out["report"] = res.report.to_json();
        out["map"] = res.map.serialize();
        out["C"] = res.report.C;
        out["interior"] = res.report.railing.interior;
        return out;
    });
    m.def("render_svg_text",
          [](const std::string& map_text) { return render_svg(ElectrodeMapFile::parse(map_text)); });
}
