import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaugekit import fields, forms, geometry, gauge, lie
from gaugekit.dynamics import em_field_from_connection
from gaugekit.gauge import VolumeData

MINK = geometry.minkowski(4)
VOL = VolumeData(MINK)
FAR = np.array([0.3, 1.2, -1.1, 1.1])  # |x_spatial| close to 2


def _brute_T(F, g):
    """Stress-energy by explicit index loops."""
    ginv = np.linalg.inv(g)
    n = g.shape[0]
    inv = 0.0
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    inv += ginv[a, c] * ginv[b, d] * F[a, b] * F[c, d]
    T = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            s = 0.0
            for c in range(n):
                for d in range(n):
                    s += F[a, c] * F[b, d] * ginv[c, d]
            T[a, b] = (s - 0.25 * g[a, b] * inv) / (4 * np.pi)
    return T


# --- field strength from E and B ------------------------------------------

def test_F_from_electric_field():
    F = fields.maxwell_F_from_EB([1.0, 0, 0], [0, 0, 0]).F(np.zeros(4))
    expected = np.zeros((4, 4))
    expected[0, 1], expected[1, 0] = 1.0, -1.0
    assert np.array_equal(F, expected)


def test_F_from_magnetic_field():
    F = fields.maxwell_F_from_EB([0, 0, 0], [0, 0, 1.0]).F(np.zeros(4))
    assert F[1, 2] == -1.0
    assert F[2, 1] == 1.0
    assert np.count_nonzero(F) == 2


def test_F_full_layout_and_zero():
    F = fields.maxwell_F_from_EB([1, 2, 3], [4, 5, 6]).F(np.zeros(4))
    assert (F[1, 2], F[1, 3], F[2, 3]) == (-6, 5, -4)
    assert np.array_equal(F, -F.T)
    assert not np.any(fields.maxwell_F_from_EB([0, 0, 0], [0, 0, 0]).F(np.ones(4)))


# --- Maxwell residuals ------------------------------------------------------

def test_uniform_field_residuals_vanish():
    em = fields.maxwell_F_from_EB([0.3, -1, 2], [1, 0.5, -0.2])
    dF, dd = fields.maxwell_residuals(em, VOL, [0.1, 0.2, 0.3, 0.4])
    assert dF < 1e-12 and dd < 1e-12


def test_coulomb_residuals():
    dF, dd = fields.maxwell_residuals(fields.coulomb_field(1.0), VOL, FAR, 1e-4)
    assert dF < 1e-6 and dd < 1e-6


def test_plane_wave_residuals():
    for x in ([0.0, 0.0, 0.0, 0.0], [0.7, -0.3, 1.1, 2.0]):
        dF, dd = fields.maxwell_residuals(fields.plane_wave_field(), VOL, x, 1e-4)
        assert dF < 1e-6 and dd < 1e-6


def test_source_mismatch_is_reported():
    em = fields.maxwell_F_from_EB([0, 0, 0], [0, 0, 0], j=lambda x: np.array([1.0, 0, 0, 0]))
    _, dd = fields.maxwell_residuals(em, VOL, np.zeros(4))
    assert dd == pytest.approx(1.0)


def test_broken_field_is_detected():
    # E = (x, 0, 0) has div E = 1 with no charge
    em = fields.maxwell_F_from_EB(lambda x: np.array([x[1], 0, 0]), np.zeros(3))
    _, dd = fields.maxwell_residuals(em, VOL, np.zeros(4))
    assert dd == pytest.approx(1.0, abs=1e-6)


# --- stress-energy ------------------------------------------------------------

def test_stress_energy_zero_field():
    T = fields.em_stress_energy(fields.maxwell_F_from_EB([0] * 3, [0] * 3), MINK, np.zeros(4))
    assert not np.any(T)


def test_stress_energy_pure_electric_energy_density():
    E0 = 1.7
    em = fields.maxwell_F_from_EB([E0, 0, 0], [0, 0, 0])
    T = fields.em_stress_energy(em, MINK, np.zeros(4))
    oracle = _brute_T(em.F(np.zeros(4)), MINK(np.zeros(4)))
    assert oracle[0, 0] == pytest.approx(E0**2 / (8 * np.pi), rel=1e-14)
    assert np.allclose(T, oracle, atol=1e-14)


@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_stress_energy_symmetric_traceless(vals):
    em = fields.maxwell_F_from_EB(vals[:3], vals[3:])
    x = np.zeros(4)
    T = fields.em_stress_energy(em, MINK, x)
    assert np.array_equal(T, T.T)
    assert abs(fields.stress_energy_trace(em, MINK, x)) < 1e-10
    assert np.allclose(T, _brute_T(em.F(x), MINK(x)), atol=1e-12)


@pytest.mark.parametrize("em,x", [
    (fields.plane_wave_field(), np.array([0.4, 0.1, -0.2, 0.3])),
    (fields.coulomb_field(), FAR),
])
def test_stress_energy_divergence_free(em, x):
    div = fields.stress_energy_divergence(em, MINK, x, 1e-4)
    assert np.max(np.abs(div)) < 1e-4


# --- Yang-Mills -------------------------------------------------------------

def test_ym_flat_connection():
    w = gauge.zero_connection("SU2", 4)
    assert fields.yang_mills_residual(w, VOL, None, np.zeros(4)) == 0.0


def test_ym_coulomb():
    w = gauge.coulomb_u1(1.0)
    assert fields.yang_mills_residual(w, VOL, None, FAR, fd_step=1e-4) < 1e-5


def test_ym_abelian_reduction_matches_maxwell():
    w = gauge.coulomb_u1(1.0)
    em = fields.EMField(em_field_from_connection(w))
    for x in (FAR, np.array([-0.2, 2.0, 0.5, -0.7])):
        ym = fields.yang_mills_residual(w, VOL, None, x, fd_step=1e-4)
        mx = fields.maxwell_residuals(em, VOL, x, 1e-4)[1]
        assert abs(ym - mx) < 1e-8


def test_brute_force_current_constant_su2_closed_form():
    w = gauge.constant_su2()
    E = geometry.euclidean(4)
    a, b = lie.SU2().basis[0], lie.SU2().basis[1]
    ab = lie.bracket(a, b)
    J = fields.brute_force_yang_mills_current(w, E, np.zeros(4))
    assert np.allclose(J[0], lie.bracket(b, ab), atol=1e-9)
    assert np.allclose(J[1], -lie.bracket(a, ab), atol=1e-9)
    assert np.allclose(J[2:], 0)


@pytest.mark.parametrize("metric", [geometry.euclidean(4), MINK])
def test_ym_constant_su2_with_brute_force_current(metric):
    w = gauge.constant_su2()
    v = VolumeData(metric)
    J = lambda y: fields.brute_force_yang_mills_current(w, metric, y)
    for x in (np.zeros(4), np.array([0.3, -0.2, 0.1, 0.5])):
        assert fields.yang_mills_residual(w, v, J, x, fd_step=1e-4) < 1e-8


def test_ym_residual_rejects_malformed_current():
    w = gauge.constant_su2()
    with pytest.raises(Exception):
        fields.yang_mills_residual(w, VOL, lambda y: np.zeros((3, 2, 2)), np.zeros(4))


# --- charge conservation -----------------------------------------------------

def test_charge_conservation_zero_current():
    w = gauge.poly_su2_r4()
    assert fields.charge_conservation_residual(w, VOL, lambda y: np.zeros((4, 2, 2), complex), np.zeros(4)) == 0.0


def test_charge_conservation_coulomb_vacuum():
    w = gauge.coulomb_u1(1.0)
    zero = lambda y: np.zeros((4, 1, 1), complex)
    assert fields.charge_conservation_residual(w, VOL, zero, FAR) == 0.0


def test_charge_conservation_poly_su2_converges():
    w = gauge.poly_su2_r4()
    x = np.array([0.1, -0.2, 0.3, 0.05])
    vals = []
    for s in (1e-3, 5e-4):
        J = fields.yang_mills_field(VOL, w, fd_step=s)
        vals.append(fields.charge_conservation_residual(w, VOL, J, x, fd_step=s))
    assert vals[0] < 1e-4
    assert np.log2(vals[0] / vals[1]) > 1.5


# --- action density ----------------------------------------------------------

def test_action_density_zero():
    w = gauge.zero_connection("U1", 2)
    assert fields.ym_action_density(w, VolumeData(geometry.euclidean(2)), np.zeros(2)) == 0.0


def test_action_density_constant_B():
    # k(-iB, -iB) = B^2 with Euclidean raising, so the density is -B^2/2
    w = gauge.constant_B_u1(1.5)
    val = fields.ym_action_density(w, VolumeData(geometry.euclidean(2)), np.array([0.4, -0.1]))
    assert val == pytest.approx(-1.125, abs=1e-12)


def test_action_density_electric_sign_flips_in_lorentzian():
    # F_tz only: one timelike index flips the sign of the raised component
    w = gauge.constant_B_u1(1.0, dim=4, axes=(0, 3))
    val = fields.ym_action_density(w, VOL, np.zeros(4))
    assert val == pytest.approx(0.5, abs=1e-12)


def test_action_density_gauge_invariant(rng):
    w = gauge.poly_su2_r4()
    tau = gauge.smooth_gauge(w.cocycle, rng)
    wt = gauge.gauge_transform(w, tau)
    for x in rng.uniform(-0.5, 0.5, (3, 4)):
        a = fields.ym_action_density(w, VOL, x)
        b = fields.ym_action_density(wt, VOL, x)
        assert abs(a - b) < 1e-7


# --- bundle scalar curvature -------------------------------------------------

def test_group_scalar_curvature_constants():
    assert fields.group_scalar_curvature(lie.U1()) == 0.0
    assert fields.group_scalar_curvature(lie.SU2()) == 1.5
    assert fields.group_scalar_curvature(lie.SO3()) == 1.5


@pytest.mark.parametrize("group", [lie.SU2(), lie.SO3()])
def test_group_scalar_curvature_from_brackets(group):
    total = sum(group.inner(lie.bracket(a, b), lie.bracket(a, b)) for a in group.basis for b in group.basis)
    assert 0.25 * total == pytest.approx(fields.GROUP_SCALAR_CURVATURE[group.name], abs=1e-14)


def test_scurv_trivial_product():
    g = geometry.euclidean(2)
    res = fields.scalar_curvature_decomposition_check(g, gauge.zero_connection("U1", 2), np.array([0.2, 0.1]))
    assert abs(res.S_h) < 1e-6
    assert res.gap < 1e-6


def test_scurv_constant_B():
    g = geometry.euclidean(2)
    res = fields.scalar_curvature_decomposition_check(g, gauge.constant_B_u1(1.0), np.array([0.3, -0.2]))
    # S_h = -1/2 B^2 for this bundle metric
    assert res.coupling == pytest.approx(0.5, abs=1e-12)
    assert res.S_h == pytest.approx(-0.5, abs=1e-4)
    assert res.gap < 1e-4


def test_scurv_su2_constant_converges():
    w = gauge.constant_su2()
    x = np.array([0.1, 0.2, -0.1, 0.0])
    gaps = [fields.scalar_curvature_decomposition_check(MINK, w, x, fd_step=s).gap for s in (4e-3, 2e-3)]
    assert gaps[1] < 1e-3
    assert np.log2(gaps[0] / gaps[1]) >= 1.5


# --- reports -------------------------------------------------------------------

def test_residual_report_max_merge():
    a = fields.ResidualReport()
    a.add("x", 1e-3, 1e-4)
    a.add("x", -5e-3)
    b = fields.ResidualReport()
    b.add("x", 2e-3, 1e-4)
    b.add("y", 0.0, 1e-3)
    merged = a.merge(b).as_dict()
    assert merged["x"] == {"max": 5e-3, "samples": 3, "fd_step": 1e-4}
    assert merged["y"]["samples"] == 1
