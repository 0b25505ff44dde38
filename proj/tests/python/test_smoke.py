"""Smoke tests for the Python bindings."""

import json
import math

import pytest

import trapforge as tf

GAMMA = [[-0.5, 0, 0], [0, -0.5, 0], [0, 0, 1]]


def test_lattice_reciprocity():
    lat = tf.BravaisLattice([1, 0], [0.5, math.sqrt(3) / 2])
    two_pi = 2 * math.pi
    assert abs(lat.a1[0] * lat.g1[0] + lat.a1[1] * lat.g1[1] - two_pi) < 1e-12
    assert abs(lat.a1[0] * lat.g2[0] + lat.a1[1] * lat.g2[1]) < 1e-12
    assert abs(lat.cell_area - math.sqrt(3) / 2) < 1e-14


def test_degenerate_lattice_raises():
    with pytest.raises(ValueError):
        tf.BravaisLattice([1, 0], [2, 0])


def test_patch_grid_counts():
    lat = tf.BravaisLattice([1, 0], [0, 1])
    assert tf.build_patch_grid(lat, "oblique", 6, 4).num_patches == 24
    assert tf.build_patch_grid(lat, "hexagonal", 5).num_patches == 50


def test_golden_ratio_constructor():
    phi = (1 + math.sqrt(5)) / 2
    g = tf.curvature_from_frequencies([1 / phi, 1, phi])
    assert abs(g[0][0] + g[1][1] + g[2][2]) < 1e-12
    with pytest.raises(ValueError):
        tf.curvature_from_frequencies([1, 1, 1])


def test_uniform_electrode_field():
    lat = tf.BravaisLattice([1, 0], [0, 1])
    grid = tf.build_patch_grid(lat, "oblique", 4)
    basis = tf.FourierBasis(lat, grid, 8)
    s = basis.evaluate([1.0] * 16, [0.3, 0.2, 0.5])
    assert abs(s.value - 1.0) < 1e-12
    assert max(abs(v) for v in s.gradient) < 1e-12


def test_optimize_small_lattice():
    lat = tf.BravaisLattice([1, 0], [0, 1])
    grid = tf.build_patch_grid(lat, "oblique", 12)
    basis = tf.FourierBasis(lat, grid, 24)
    trap = tf.TrapSpec([0.5, 0.5, 0.3], GAMMA, "c")
    system = tf.assemble(basis, [trap])
    assert system.equality_rows == 8
    res = tf.solve(system)
    assert res.C > 0
    assert res.railing.interior <= 8
    assert res.railing.at_zero + res.railing.at_one + res.railing.interior == 144
    kappas = tf.kappa(res.C, [trap])
    assert kappas[0] > 0

    field = tf.make_field(basis, res.rounded_a)
    grid3d = tf.pseudopotential_grid(field, nx=32, ny=32, nz=48, z_lo=0.05, z_hi=1.5)
    minima = tf.find_minima(grid3d, [trap])
    designed = [m for m in minima if m.designed_trap == 0]
    assert designed and designed[0].is_field_null


def test_physical_units_reference_point():
    rep = tf.physical_units(1.0, GAMMA)
    assert abs(rep.omega_bar / (2 * math.pi * 53e6) - 1) < 0.01
    assert abs(rep.depth_scale_eV / 4.7 - 1) < 0.02


def test_optimize_config_pipeline():
    cfg = {
        "lattice": {"a1": [1, 0], "a2": [0, 1]},
        "grid": {"kind": "oblique", "n1": 10, "n2": 10},
        "n_cut": 20,
        "traps": [{"label": "c", "position": [0.5, 0.5, 0.35],
                   "gamma": {"tensor": GAMMA}}],
        "analysis": {"grid": {"nx": 24, "ny": 24, "nz": 32, "z_lo": 0.05, "z_hi": 1.4}},
    }
    out = tf.optimize_config(json.dumps(cfg))
    assert out["C"] > 0
    assert out["interior"] <= 8
    report = json.loads(out["report"])
    assert report["traps"][0]["kappa"] > 0
    svg = tf.render_svg_text(out["map"])
    assert svg.startswith("<?xml") and "</svg>" in svg
