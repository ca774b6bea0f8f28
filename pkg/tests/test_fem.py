import math

import numpy as np
import pytest

from microbeam import (
    BeamGeometry,
    ConvergenceError,
    ValidationError,
    build_model,
    constant_material,
    critical_load,
    default_imperfection_q,
    linear_static_check,
    solve_path,
    solve_state,
    tangent_consistency,
    write_path_csv,
)
from microbeam.fem import PATH_CSV_HEADER, _assemble, external_load

from conftest import REF_CTE, REF_E_PA, REF_NU, REF_T0

REF_PCR_N = 7.402203300817018e-05
REF_DTCR_C = 15.230870989335427
KS = 5.0 / 6.0


def clamped_point_load_deflection(F, L, E, I, G, A):
    """Timoshenko closed form: midspan point load on a clamped-clamped beam."""
    return F * L**3 / (192.0 * E * I) + F * L / (4.0 * KS * G * A)


def clamped_uniform_load_deflection(q, L, E, I, G, A):
    """Timoshenko closed form: uniform load on a clamped-clamped beam."""
    return q * L**4 / (384.0 * E * I) + q * L**2 / (8.0 * KS * G * A)


class TestBuildModel:
    def test_counting(self, geom):
        model = build_model(geom, 4, 0.0)
        assert model.n_nodes == 5
        assert model.n_dofs == 15
        free = model.free_slice
        assert model.n_dofs - (free.stop - free.start) == 6

    def test_odd_elements_rejected(self, geom):
        with pytest.raises(ValidationError, match="n_elems"):
            build_model(geom, 3, 0.0)

    def test_tiny_mesh_rejected(self, geom):
        with pytest.raises(ValidationError, match="n_elems"):
            build_model(geom, 2, 0.0)

    def test_negative_load_rejected(self, geom):
        with pytest.raises(ValidationError, match="imperfection_q"):
            build_model(geom, 8, -1.0)

    def test_default_model(self, geom):
        model = build_model(geom, 64, 1e-4)
        assert model.n_elems == 64
        assert model.shear_factor == pytest.approx(5.0 / 6.0)
        assert model.mid_node == 32


class TestLinearStatic:
    def test_matches_closed_form(self, geom):
        model = build_model(geom, 64, 0.0)
        F = 1e-9
        G = REF_E_PA / (2.0 * (1.0 + REF_NU))
        ref = clamped_point_load_deflection(
            F, geom.length_m, REF_E_PA, geom.inertia_m4, G, geom.area_m2
        )
        got = linear_static_check(model, REF_E_PA, F, nu=REF_NU)
        assert got == pytest.approx(ref, rel=5e-3)

    def test_zero_load(self, geom):
        model = build_model(geom, 8, 0.0)
        assert linear_static_check(model, REF_E_PA, 0.0) == 0.0

    def test_linearity(self, geom):
        model = build_model(geom, 16, 0.0)
        d1 = linear_static_check(model, REF_E_PA, 1e-9)
        d2 = linear_static_check(model, REF_E_PA, 2e-9)
        assert d2 == pytest.approx(2.0 * d1, rel=1e-12)

    def test_modulus_scaling_of_internal_forces(self, geom):
        # in the linear regime internal forces scale with E at fixed state
        model = build_model(geom, 8, 0.0)
        rng = np.random.default_rng(7)
        u = np.zeros(model.n_dofs)
        u[model.free_slice] = 1e-9 * rng.standard_normal(model.n_dofs - 6)
        G = REF_E_PA / (2.0 * (1.0 + REF_NU))
        f1, _ = _assemble(model, u, REF_E_PA, G, 0.0)
        f2, _ = _assemble(model, u, 2.0 * REF_E_PA, 2.0 * G, 0.0)
        assert np.allclose(f2, 2.0 * f1, rtol=1e-12, atol=0.0)


class TestTangentConsistency:
    def test_undeformed(self, geom, const_mat):
        model = build_model(geom, 16, 1e-4)
        err = tangent_consistency(model, const_mat, np.zeros(model.n_dofs), 40.0)
        assert err <= 1e-6

    def test_postbuckled_random_states(self, geom, const_mat):
        model = build_model(geom, 16, default_imperfection_q(geom, const_mat))
        path = solve_path(
            model, const_mat, REF_T0 + 2.0 * REF_DTCR_C, n_steps=40, mode="constant"
        )
        u_base = path.steps[-1].u
        T = path.steps[-1].T_c
        rng = np.random.default_rng(42)
        for _ in range(3):
            u = u_base.copy()
            noise = 0.05 * geom.thickness_m * rng.standard_normal(model.n_dofs - 6)
            u[model.free_slice] += noise
            assert tangent_consistency(model, const_mat, u, T) <= 1e-5


class TestSolvePath:
    def test_ambient_only_is_pure_imperfection_solution(self, geom, const_mat):
        q = default_imperfection_q(geom, const_mat)
        model = build_model(geom, 64, q)
        path = solve_path(model, const_mat, REF_T0, n_steps=10)
        assert len(path.steps) == 1
        G = REF_E_PA / (2.0 * (1.0 + REF_NU))
        ref = clamped_uniform_load_deflection(
            q, geom.length_m, REF_E_PA, geom.inertia_m4, G, geom.area_m2
        )
        assert path.steps[0].gamma_mid_m == pytest.approx(ref, rel=1e-3)
        # the t/1000 calibration of the default imperfection
        assert path.steps[0].gamma_mid_m == pytest.approx(
            geom.thickness_m / 1000.0, rel=1e-3
        )

    def test_no_load_no_bifurcation_below_critical(self, geom, const_mat):
        model = build_model(geom, 16, 0.0)
        path = solve_path(
            model, const_mat, REF_T0 + 0.8 * REF_DTCR_C, n_steps=8, mode="constant"
        )
        for step in path.steps:
            assert abs(step.gamma_mid_m) <= 1e-15 * geom.length_m

    def test_temperatures_strictly_increase(self, geom, const_mat):
        model = build_model(geom, 16, 1e-4)
        path = solve_path(model, const_mat, REF_T0 + 30.0, n_steps=25)
        t = path.temperatures_c
        assert (np.diff(t) > 0).all()

    def test_axial_reaction_tracks_thermal_then_euler_load(self, geom, const_mat):
        q = default_imperfection_q(geom, const_mat)
        model = build_model(geom, 64, q)
        path = solve_path(
            model, const_mat, REF_T0 + 2.5 * REF_DTCR_C, n_steps=50, mode="constant"
        )
        EA = REF_E_PA * geom.area_m2
        for step in path.steps:
            dt = step.T_c - REF_T0
            if 0.05 * REF_DTCR_C < dt < 0.7 * REF_DTCR_C:
                assert step.axial_reaction_n == pytest.approx(
                    EA * REF_CTE * dt, rel=1e-3
                )
            elif dt > 1.3 * REF_DTCR_C:
                # saturates near the Euler load; compare with the analytical
                # internal force at the same thermal load
                ana = solve_state(geom, REF_E_PA, REF_CTE, REF_T0, EA * REF_CTE * dt)
                assert step.axial_reaction_n == pytest.approx(
                    ana.axial_force_n, rel=5e-3
                )

    def test_clamp_moment_at_ambient(self, geom, const_mat):
        q = default_imperfection_q(geom, const_mat)
        model = build_model(geom, 64, q)
        path = solve_path(model, const_mat, REF_T0, n_steps=1)
        expect = q * geom.length_m**2 / 12.0
        assert abs(path.steps[0].clamp_moment_nm) == pytest.approx(expect, rel=1e-2)

    def test_symmetry_about_midspan(self, geom, const_mat):
        q = default_imperfection_q(geom, const_mat)
        model = build_model(geom, 32, q)
        path = solve_path(
            model, const_mat, REF_T0 + 2.0 * REF_DTCR_C, n_steps=40, mode="constant"
        )
        v = path.steps[-1].u[1::3]
        assert np.abs(v - v[::-1]).max() <= 1e-10 * geom.length_m

    def test_equilibrium_recheck_by_reassembly(self, geom, const_mat):
        q = default_imperfection_q(geom, const_mat)
        model = build_model(geom, 16, q)
        tol_r = 1e-8
        path = solve_path(
            model, const_mat, REF_T0 + 2.0 * REF_DTCR_C, n_steps=20,
            tol_r=tol_r, mode="constant",
        )
        f_ext = external_load(model)
        G = REF_E_PA / (2.0 * (1.0 + REF_NU))
        free = model.free_slice
        for step in path.steps:
            strain = REF_CTE * (step.T_c - REF_T0)
            f_int, _ = _assemble(model, step.u, REF_E_PA, G, strain)
            res = np.linalg.norm((f_ext - f_int)[free])
            f_ref = max(REF_E_PA * geom.area_m2 * strain, q * geom.length_m)
            assert res <= tol_r * f_ref

    def test_path_smoothness_past_onset(self, geom, const_mat):
        q = default_imperfection_q(geom, const_mat)
        model = build_model(geom, 32, q)
        path = solve_path(
            model, const_mat, REF_T0 + 3.0 * REF_DTCR_C, n_steps=60, mode="constant"
        )
        g = path.deflections_m
        onset = 0.05 * geom.thickness_m
        jumps = np.diff(g)
        for i in range(1, len(jumps) - 1):
            if g[i - 1] > onset:  # both ends of jump i are past onset
                neighbors = max(jumps[i - 1], jumps[i + 1])
                assert jumps[i] <= 5.0 * neighbors + 1e-15

    def test_partial_path_on_unreachable_tolerance(self, geom, const_mat):
        model = build_model(geom, 16, 1e-4)
        with pytest.raises(ConvergenceError) as exc_info:
            solve_path(model, const_mat, REF_T0 + 10.0, n_steps=5, tol_r=0.0)
        assert exc_info.value.result is not None

    def test_input_validation(self, geom, const_mat):
        model = build_model(geom, 16, 0.0)
        with pytest.raises(ValidationError, match="T_max"):
            solve_path(model, const_mat, REF_T0 - 5.0)
        with pytest.raises(ValidationError, match="n_steps"):
            solve_path(model, const_mat, REF_T0 + 5.0, n_steps=0)
        with pytest.raises(ValidationError, match="mode"):
            solve_path(model, const_mat, REF_T0 + 5.0, mode="bogus")


class TestOnsetAndMesh:
    def test_onset_brackets_analytical_critical_temperature(self, geom, const_mat):
        # small imperfection: the 0.01 t crossing pins the knee tightly
        q = default_imperfection_q(geom, const_mat, deflection_fraction=5e-5)
        model = build_model(geom, 64, q)
        path = solve_path(
            model, const_mat, REF_T0 + 1.3 * REF_DTCR_C, n_steps=130, mode="constant"
        )
        g = path.deflections_m
        t = path.temperatures_c
        threshold = 0.01 * geom.thickness_m
        idx = int(np.argmax(g > threshold))
        assert idx > 0
        t_cross = np.interp(threshold, g[idx - 1 : idx + 1], t[idx - 1 : idx + 1])
        t_cr = REF_T0 + REF_DTCR_C
        assert abs(t_cross - t_cr) <= 0.02 * REF_DTCR_C

    def test_mesh_convergence_64_to_128(self, geom, const_mat):
        q = default_imperfection_q(geom, const_mat)
        t_end = REF_T0 + 2.0 * REF_DTCR_C
        results = []
        for n in (64, 128):
            model = build_model(geom, n, q)
            path = solve_path(model, const_mat, t_end, n_steps=40, mode="constant")
            results.append(path.steps[-1].gamma_mid_m)
        assert abs(results[1] - results[0]) / abs(results[1]) < 5e-3


class TestCrossValidation:
    def test_agrees_with_elastica_past_onset(self, geom, const_mat):
        # small imperfection so the knee rounding does not bias the comparison
        q = default_imperfection_q(geom, const_mat, deflection_fraction=1e-5)
        model = build_model(geom, 64, q)
        path = solve_path(
            model, const_mat, REF_T0 + 3.2 * REF_DTCR_C, n_steps=160, mode="constant"
        )
        EA = REF_E_PA * geom.area_m2
        for mult in np.linspace(1.1, 3.0, 13):
            T = REF_T0 + mult * REF_DTCR_C
            g_fem = float(np.interp(T, path.temperatures_c, path.deflections_m))
            P = EA * REF_CTE * (T - REF_T0)
            g_ana = solve_state(geom, REF_E_PA, REF_CTE, REF_T0, P).gamma_max_m
            assert abs(g_fem - g_ana) / g_ana <= 0.03


def test_path_csv_format(tmp_path, geom, const_mat):
    model = build_model(geom, 16, 1e-4)
    path = solve_path(model, const_mat, REF_T0 + 20.0, n_steps=4)
    out = tmp_path / "path.csv"
    write_path_csv(path, out)
    lines = out.read_text().splitlines()
    assert lines[0] == PATH_CSV_HEADER
    assert len(lines) == len(path.steps) + 1
    first = lines[1].split(",")
    assert float(first[0]) == path.steps[0].T_c
    assert float(first[1]) == path.steps[0].gamma_mid_m
