import numpy as np
import pytest

from gaugekit import dynamics as dy, gauge, geometry as geo


def test_flat_geodesics_are_straight_lines():
    g = geo.metric("euclidean3")
    x0, v0 = np.array([1.0, -2.0, 0.5]), np.array([0.3, 1.0, -0.7])
    tr = dy.geodesic_integrate(g, x0, v0, (0, 10), 1000)
    assert np.max(np.abs(tr.x - (x0 + np.outer(tr.t, v0)))) < 1e-10
    assert not tr.exited


def test_great_circle_returns_to_start():
    g = geo.metric("sphere2")
    tr = dy.geodesic_integrate(g, [np.pi / 2, 0.0], [0.0, 1.0], (0, 2 * np.pi), 1000)
    assert abs(tr.x[-1, 0] - np.pi / 2) < 1e-5
    assert abs(tr.x[-1, 1] - 2 * np.pi) < 1e-5
    assert tr.constraint_drift.max() < 1e-7 * 2 * np.pi


def test_schwarzschild_circular_orbit_frequency():
    M, r = 1.0, 6.0
    ut = 1 / np.sqrt(1 - 3 * M / r)
    omega = np.sqrt(M / r**3)
    tr = dy.geodesic_integrate(geo.metric("schwarzschild_ext"), [0, r, np.pi / 2, 0], [ut, 0, 0, ut * omega], (0, 50), 2000)
    measured = tr.x[-1, 3] / tr.x[-1, 0]
    assert abs(measured**2 / (M / r**3) - 1) < 1e-4
    assert np.max(np.abs(tr.x[:, 1] - r)) < 1e-6


def test_exit_truncates_trajectory():
    tr = dy.geodesic_integrate(geo.metric("sphere2"), [0.5, 0.0], [-1.0, 0.0], (0, 3), 300)
    assert tr.exited
    assert len(tr.t) < 301
    assert np.all(tr.x[:, 0] > 0)


def test_integrator_is_fourth_order():
    g = geo.metric("sphere2")
    args = ([1.0, 0.2], [0.4, 1.1], (0, 3))
    ref = dy.geodesic_integrate(g, *args, 3200).x[-1]
    e1 = np.linalg.norm(dy.geodesic_integrate(g, *args, 50).x[-1] - ref)
    e2 = np.linalg.norm(dy.geodesic_integrate(g, *args, 100).x[-1] - ref)
    assert e1 / e2 >= 14


def test_trajectory_csv_columns():
    tr = dy.geodesic_integrate(geo.metric("euclidean2"), [0, 0], [1, 0], (0, 1), 4)
    header = tr.to_csv().splitlines()[0]
    assert header == "t,chart,x0,x1,v0,v1,energy,constraint_drift"
    w = gauge.constant_B_u1(1.0)
    st = dy.ParticleState.with_charge(w, "R", [0, 0], [0, 1], np.array([[1j]]))
    kk = dy.kk_geodesic(geo.metric("euclidean2"), w, st, (0, 1), 4)
    assert kk.to_csv().splitlines()[0] == "t,chart,x0,x1,v0,v1,Q0,energy,constraint_drift"


def test_kk_metric_blocks():
    g = geo.metric("minkowski4")
    h0 = dy.kk_metric_eval(g, gauge.zero_connection("U1", dim=4), np.zeros(4))
    np.testing.assert_allclose(h0, np.diag([-1.0, 1, 1, 1, 1]))

    B, x = 0.7, 1.5
    w = gauge.constant_B_u1(B, dim=4, axes=(1, 2))
    h = dy.kk_metric_eval(g, w, np.array([0.0, x, 0.0, 0.0]))
    # omega = A + d(fibre) with A_y = -i B x; in the orthonormal frame k(A_y, i) = -B x
    assert h[2, 4] == pytest.approx(-B * x, abs=1e-15)
    assert h[2, 2] == pytest.approx(1 + (B * x) ** 2, abs=1e-15)
    assert h[4, 4] == 1.0
    np.testing.assert_array_equal(np.sign(np.linalg.eigvalsh(h)), [-1, 1, 1, 1, 1])


def test_kk_uncharged_matches_geodesic():
    g = geo.metric("euclidean2")
    w = gauge.constant_B_u1(1.0)
    st = dy.ParticleState.with_charge(w, "R", [0.3, -0.2], [0.5, 1.0], np.array([[0j]]))
    kk = dy.kk_geodesic(g, w, st, (0, 10), 1000)
    plain = dy.geodesic_integrate(g, [0.3, -0.2], [0.5, 1.0], (0, 10), 1000)
    assert np.max(np.abs(kk.x - plain.x)) < 1e-8


def test_cyclotron_kk_against_lorentz():
    cmp = dy.compare_kk_lorentz(geo.metric("euclidean2"), gauge.constant_B_u1(1.0), [0.0, 0.0], [0.0, 1.0], 1.0)
    assert cmp.charge_drift < 1e-7
    assert cmp.max_gap < 1e-4
    assert dy.cyclotron_radius(cmp.kk) == pytest.approx(1.0, abs=1e-3)
    assert cmp.q_over_m == 1.0


def test_cpt_reversal_retraces_base_path():
    w = gauge.constant_B_u1(1.0)
    st = dy.ParticleState.with_charge(w, "R", [0.0, 0.0], [0.0, 1.0], np.array([[1j]]))
    _, _, gap = dy.cpt_retrace(geo.metric("euclidean2"), w, st, (0, 5), 1000)
    assert gap < 1e-6


def test_nonabelian_charge_conservation():
    g = geo.metric("minkowski4")
    Q = [0.5, -0.3, 0.8]
    w = gauge.constant_su2([1, 0, 0], [0, 1, 0])
    st = dy.ParticleState.with_charge(w, "R", [0, 0.1, 0.2, 0], [1.2, 0.3, 0.5, -0.2], w.group.from_coords(Q))
    tr = dy.kk_geodesic(g, w, st, (0, 2), 800)
    assert tr.charge_drift < 1e-7
    np.testing.assert_allclose(tr.Q[0], Q, atol=1e-12)

    p = gauge.poly_su2_r4()
    st = dy.ParticleState.with_charge(p, "R", [0, 0.1, 0.2, 0], [1.2, 0.3, 0.5, -0.2], p.group.from_coords(Q))
    # here the drift is pure RK4 truncation error: it falls at fourth order
    d1 = dy.kk_geodesic(g, p, st, (0, 1), 150).charge_drift
    d2 = dy.kk_geodesic(g, p, st, (0, 1), 300).charge_drift
    assert d2 < 1e-7
    assert d1 / d2 > 14


def test_monopole_kk_run_switches_charts():
    g = geo.MetricField(geo.Chart("S2", (0.0, -np.inf), (np.pi, np.inf), periods=(None, 2 * np.pi)),
                        geo.metric("sphere2").func, (2, 0), geo.metric("sphere2").derivative)
    w = gauge.monopole_connection(1)
    st = dy.ParticleState.with_charge(w, "N", [2.6, 0.0], [0.6, 0.4], np.array([[0.3j]]))
    tr = dy.kk_geodesic(g, w, st, (0, 2), 1000)
    assert "S" in tr.chart
    assert tr.charge_drift < 1e-7


def test_lorentz_force_cyclotron_and_calibration():
    g = geo.metric("euclidean3")
    F = dy.spatial_field_from_B([0.0, 0.0, 1.0])
    tr = dy.lorentz_force_integrate(g, F, 1.0, [0, 0, 0], [1, 0, 0], (0, 2 * np.pi), 2000)
    assert dy.cyclotron_radius(tr) == pytest.approx(1.0, abs=1e-6)
    np.testing.assert_allclose(tr.x[-1], [0, 0, 0], atol=1e-6)
    assert tr.constraint_drift.max() < 1e-7
    # q v x B with v = x, B = z points along -y
    assert tr.x[10, 1] < 0


def test_lorentz_without_field_is_geodesic():
    g = geo.metric("sphere2")
    zero = lambda x: np.zeros((2, 2))
    a = dy.lorentz_force_integrate(g, zero, 3.0, [1.0, 0.2], [0.4, 1.1], (0, 2), 400)
    b = dy.geodesic_integrate(g, [1.0, 0.2], [0.4, 1.1], (0, 2), 400)
    np.testing.assert_allclose(a.x, b.x, atol=1e-14)


def test_em_field_requires_u1():
    with pytest.raises(ValueError):
        dy.em_field_from_connection(gauge.constant_su2())
