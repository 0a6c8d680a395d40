import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaugekit import atlas, lie
from gaugekit.errors import CoverError, DomainError, PreconditionError
from gaugekit.geometry import Chart

SU2 = lie.SU2()
REGION = Chart("R2", (-3.0, -3.0), (3.0, 3.0))


def strip_cover():
    """Three overlapping vertical strips of the square [-3, 3]^2."""
    charts = (
        Chart("A", (-3.0, -3.0), (0.5, 3.0)),
        Chart("B", (-1.0, -3.0), (2.0, 3.0)),
        Chart("C", (0.0, -3.0), (3.0, 3.0)),
    )
    return atlas.Cover(charts, REGION)


def coboundary_cocycle(seed):
    """``g_ab = h_a h_b^-1`` for smooth SU(2)-valued ``h_a``; satisfies the cocycle law identically."""
    rng = np.random.default_rng(seed)
    cover = strip_cover()
    coef = {a: rng.standard_normal((3, 2)) for a in cover.ids}

    def h(a, x):
        c = coef[a]
        return lie.exp(SU2.from_coords(c @ np.sin(x)))

    trans = {}
    for a in cover.ids:
        for b in cover.ids:
            if a < b:
                trans[(a, b)] = lambda x, a=a, b=b: h(a, x) @ np.linalg.inv(h(b, x))
    return atlas.Cocycle(cover, SU2, trans), h


def test_cover_has_no_gaps():
    assert strip_cover().uncovered(samples=10_000) == 0
    assert atlas.sphere_cover().uncovered(samples=10_000) == 0


def test_trivial_cocycle_passes_with_zero_violation():
    rep = atlas.validate_cocycle(atlas.trivial_cocycle(strip_cover(), SU2), samples=500)
    assert rep.passed
    assert rep.identity_violation == 0 and rep.cocycle_violation == 0


@pytest.mark.parametrize("k", [-2, -1, 0, 1, 2])
def test_integer_monopole_cocycles_pass(k):
    rep = atlas.validate_cocycle(atlas.build_monopole_bundle(k), samples=2000)
    assert rep.passed
    assert max(rep.identity_violation, rep.cocycle_violation, rep.periodicity_violation) < 1e-10


def test_fractional_monopole_fails_across_seam():
    rep = atlas.validate_cocycle(atlas.monopole_cocycle(0.5), samples=2000)
    assert not rep.passed
    # |e^{i pi} - 1| = 2 is the jump of g_NS across the seam
    assert rep.periodicity_violation == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(PreconditionError):
        atlas.build_monopole_bundle(0.5)


def test_monopole_charge_sign_gives_inverse_cocycle():
    rng = np.random.default_rng(2)
    c1, c2 = atlas.build_monopole_bundle(1), atlas.build_monopole_bundle(-1)
    for x in atlas.sphere_cover().sample(rng, 100, ("N", "S")):
        np.testing.assert_allclose(c1("N", "S", x) @ c2("N", "S", x), [[1.0]], atol=1e-15)


def test_missing_transition():
    c = atlas.Cocycle(strip_cover(), SU2, {})
    with pytest.raises(CoverError):
        c("A", "B", [0.0, 0.0])


@settings(max_examples=8)
@given(st.integers(0, 2**16))
def test_coboundary_cocycle_validates(seed):
    c, _ = coboundary_cocycle(seed)
    assert atlas.validate_cocycle(c, samples=100, seed=seed).passed


def monopole_section(k):
    bump = lambda th: np.exp(-(th - 1.5) ** 2)
    return atlas.GaugedSection(
        atlas.build_monopole_bundle(k),
        {
            "N": lambda x: np.array([bump(x[0]) * np.exp(1j * k * x[1])]),
            "S": lambda x: np.array([bump(x[0]) + 0j]),
        },
    )


def test_section_push_examples():
    c = atlas.build_monopole_bundle(1)
    s = atlas.GaugedSection(c, {"N": lambda x: np.array([1.0 + 0j]), "S": lambda x: np.array([np.exp(-1j * x[1])])})
    x = np.array([np.pi / 2, np.pi / 2])
    np.testing.assert_allclose(atlas.section_push(s, "N", "S", x), [np.exp(-1j * np.pi / 2)], atol=1e-15)
    np.testing.assert_allclose(atlas.section_push(s, "N", "S", x), s.value("S", x), atol=1e-15)
    with pytest.raises(DomainError):
        atlas.section_push(s, "N", "S", [0.1, 0.0])
    triv = atlas.GaugedSection(atlas.trivial_cocycle(strip_cover(), SU2),
                               {a: (lambda x: np.array([1.0, 2.0j])) for a in "ABC"})
    np.testing.assert_array_equal(atlas.section_push(triv, "A", "B", [0.0, 0.0]), [1.0, 2.0j])


def test_section_round_trip_and_compatibility():
    s = monopole_section(2)
    assert atlas.section_violation(s, samples=500) < 1e-12
    x = np.array([1.4, 2.3])
    back = s.action(s.cocycle("N", "S", x), atlas.section_push(s, "N", "S", x))
    np.testing.assert_allclose(back, s.value("N", x), atol=1e-12)


@given(st.integers(0, 2**16))
def test_push_is_path_independent(seed):
    c, _ = coboundary_cocycle(seed)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    s = atlas.GaugedSection(c, {"A": lambda x: v, "B": lambda x: v, "C": lambda x: v})
    for x in c.cover.sample(rng, 20, ("A", "B", "C")):
        via_b = c("C", "B", x) @ c("B", "A", x) @ v
        direct = atlas.section_push(s, "A", "C", x)
        np.testing.assert_allclose(via_b, direct, atol=1e-10)


def su2_gauge(c, h, seed):
    """Gauge field satisfying the conjugation overlap law: tau_a = h_a T h_a^-1."""
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal((3, 2))

    def T(x):
        return lie.exp(SU2.from_coords(coef @ np.cos(x) * np.exp(-(x @ x) / 4)))

    return atlas.GaugeTransformation(c, {a: (lambda x, a=a: h(a, x) @ T(x) @ np.linalg.inv(h(a, x))) for a in "ABC"})


def su2_section(c, h):
    def V(x):
        return np.array([np.sin(x[0]) + 1j, np.cos(x[1])])

    return atlas.GaugedSection(c, {a: (lambda x, a=a: h(a, x) @ V(x)) for a in "ABC"})


@settings(max_examples=10)
@given(st.integers(0, 2**16))
def test_apply_gauge_preserves_compatibility(seed):
    c, h = coboundary_cocycle(seed)
    t = su2_gauge(c, h, seed + 1)
    s = su2_section(c, h)
    assert atlas.gauge_violation(t, samples=50) < 1e-10
    assert atlas.section_violation(s, samples=50) < 1e-10
    assert atlas.section_violation(atlas.apply_gauge(t, s), samples=50) < 1e-10


def test_apply_gauge_examples():
    c, h = coboundary_cocycle(5)
    s = su2_section(c, h)
    ident = atlas.GaugeTransformation(c, {a: (lambda x: np.eye(2, dtype=complex)) for a in "ABC"})
    x = np.array([0.2, -0.4])
    np.testing.assert_allclose(atlas.apply_gauge(ident, s).value("B", x), s.value("B", x))

    m = monopole_section(1)
    phase = atlas.GaugeTransformation(m.cocycle, {a: (lambda x: np.array([[np.exp(0.3j)]])) for a in "NS"})
    y = np.array([1.0, 0.5])
    np.testing.assert_allclose(atlas.apply_gauge(phase, m).value("N", y), np.exp(-0.3j) * m.value("N", y))

    t1, t2 = su2_gauge(c, h, 7), su2_gauge(c, h, 8)
    lhs = atlas.apply_gauge(t2, atlas.apply_gauge(t1, s)).value("A", x)
    rhs = atlas.apply_gauge(atlas.compose_gauge(t1, t2), s).value("A", x)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    other, _ = coboundary_cocycle(6)
    with pytest.raises(PreconditionError):
        atlas.apply_gauge(atlas.GaugeTransformation(other, {}), s)
