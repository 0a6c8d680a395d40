"""Open covers, G-cocycles, sections in local gauges and gauge transformations.

All charts of a :class:`Cover` share one coordinate system (for the sphere:
spherical coordinates ``(theta, phi)``), and the charts are coordinate boxes.
Local data follows one convention throughout: the canonical gauges satisfy
``e_b = e_a . g_ab``, hence

* section values:  ``value_a(m) = g_ab(m) . value_b(m)``
* gauge fields:    ``tau_a(m) = g_ab(m) tau_b(m) g_ab(m)^-1``
* connections:     ``A_b = Ad(g_ab^-1) A_a + g_ab^-1 d g_ab``
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional

import numpy as np

from .errors import CoverError, DomainError, PreconditionError
from .geometry import Chart
from .lie import U1, LieGroupSpec

DEFAULT_SEED = 0xC0C1C1E
VALIDATION_TOL = 1e-10


def linear_action(g, v):
    """Defining representation on column vectors."""
    return np.asarray(g) @ np.asarray(v)


def left_action(g, h):
    """Left multiplication of G on itself."""
    return np.asarray(g) @ np.asarray(h)


@dataclass(frozen=True)
class Cover:
    """Finite cover of a base region by coordinate charts."""

    charts: tuple
    region: Optional[Chart] = None

    def __post_init__(self):
        ids = [c.id for c in self.charts]
        if len(set(ids)) != len(ids):
            raise ValueError("chart ids must be unique")

    @property
    def ids(self):
        return tuple(c.id for c in self.charts)

    @property
    def dim(self) -> int:
        return self.charts[0].dim

    def chart(self, id) -> Chart:
        for c in self.charts:
            if c.id == id:
                return c
        raise CoverError(f"no chart {id!r} in cover")

    def overlap(self, *ids, x, margin=0.0) -> bool:
        return all(self.chart(i).contains(x, margin) for i in ids)

    def _sampling_box(self):
        if self.region is None:
            raise CoverError("cover has no finite base region to sample from")
        lo = np.asarray(self.region.lower, dtype=float)
        hi = np.asarray(self.region.upper, dtype=float)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise CoverError("base region must be a finite box for sampling")
        return lo, hi

    def sample(self, rng, count, ids=()):
        """``count`` uniform points of the region lying in all charts ``ids``."""
        lo, hi = self._sampling_box()
        out = []
        tries = 0
        while len(out) < count:
            batch = rng.uniform(lo, hi, size=(max(64, 2 * (count - len(out))), lo.size))
            for x in batch:
                if self.region.contains(x) and all(self.chart(i).contains(x) for i in ids):
                    out.append(x)
                    if len(out) == count:
                        break
            tries += 1
            if tries > 1000:
                raise CoverError(f"overlap {ids} is empty or too thin to sample")
        return np.array(out)

    def uncovered(self, samples=10_000, seed=DEFAULT_SEED) -> int:
        """Number of region samples not contained in any chart."""
        rng = np.random.default_rng(seed)
        pts = self.sample(rng, samples)
        return int(sum(not any(c.contains(p) for c in self.charts) for p in pts))


@dataclass(frozen=True)
class Cocycle:
    """Transition functions ``g_ab`` of a principal bundle on a cover.

    Only one of ``(a, b)`` / ``(b, a)`` needs to be given; the other is the
    pointwise inverse.  Diagonal entries default to the identity.
    ``derivatives`` optionally maps ``(a, b)`` to ``x -> d_i g_ab`` stacked on
    axis 0.
    """

    cover: Cover
    group: LieGroupSpec
    transitions: dict = field(default_factory=dict)
    derivatives: dict = field(default_factory=dict)
    name: str = ""

    def __call__(self, a, b, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if (a, b) in self.transitions:
            val = self.transitions[(a, b)](x)
        elif (b, a) in self.transitions:
            val = np.linalg.inv(self.transitions[(b, a)](x))
        elif a == b:
            return self.group.identity()
        else:
            raise CoverError(f"no transition between charts {a!r} and {b!r}")
        val = np.asarray(val)
        if not np.all(np.isfinite(val)):
            raise CoverError(f"transition {a}->{b} failed at {x.tolist()}")
        return val

    def derivative(self, a, b, x):
        """``d_i g_ab(x)`` stacked on axis 0, or None if no hook is registered."""
        if (a, b) in self.derivatives:
            return np.asarray(self.derivatives[(a, b)](np.asarray(x, dtype=float)))
        if (b, a) in self.derivatives:
            g = self(a, b, x)
            d = np.asarray(self.derivatives[(b, a)](np.asarray(x, dtype=float)))
            # d(h^-1) = -h^-1 dh h^-1 with h^-1 = g
            return np.array([-g @ di @ g for di in d])
        if a == b:
            n = self.group.n
            return np.zeros((self.cover.dim, n, n), dtype=self.group.dtype)
        return None


@dataclass(frozen=True)
class ValidationReport:
    identity_violation: float
    cocycle_violation: float
    periodicity_violation: float
    samples: int
    tol: float = VALIDATION_TOL

    @property
    def passed(self) -> bool:
        return (
            self.identity_violation < self.tol
            and self.cocycle_violation < self.tol
            and self.periodicity_violation < self.tol
        )

    def as_dict(self):
        return {
            "identity_violation": self.identity_violation,
            "cocycle_violation": self.cocycle_violation,
            "periodicity_violation": self.periodicity_violation,
            "samples": self.samples,
            "passed": self.passed,
        }


def validate_cocycle(c: Cocycle, samples=10_000, seed=DEFAULT_SEED, tol=VALIDATION_TOL):
    """Sample-based check of ``g_aa = e`` and ``g_ab g_bc = g_ac``.

    Also checks single-valuedness: along periodic coordinates, ``g_ab`` must
    agree at coordinate values differing by a full period.
    """
    rng = np.random.default_rng(seed)
    ids = c.cover.ids
    eye = c.group.identity()
    ident = 0.0
    cocyc = 0.0
    period = 0.0
    for a in ids:
        pts = c.cover.sample(rng, samples, (a,))
        ident = max(ident, max(np.max(np.abs(c(a, a, x) - eye)) for x in pts))
    for a, b in product(ids, repeat=2):
        if a == b:
            continue
        pts = c.cover.sample(rng, samples, (a, b))
        for x in pts:
            gab = c(a, b, x)
            for axis in range(x.size):
                P = c.cover.chart(a).period(axis)
                if P is None:
                    continue
                y = x.copy()
                y[axis] += P
                if c.cover.overlap(a, b, x=y):
                    period = max(period, np.max(np.abs(gab - c(a, b, y))))
    for a, b, d in product(ids, repeat=3):
        if len({a, b, d}) == 1:
            continue
        pts = c.cover.sample(rng, max(1, samples // 4), (a, b, d))
        for x in pts:
            cocyc = max(cocyc, np.max(np.abs(c(a, b, x) @ c(b, d, x) - c(a, d, x))))
    return ValidationReport(float(ident), float(cocyc), float(period), samples, tol)


def trivial_cocycle(cover: Cover, group: LieGroupSpec) -> Cocycle:
    trans = {}
    for a, b in product(cover.ids, repeat=2):
        if a < b:
            trans[(a, b)] = lambda x, _g=group: _g.identity()
    return Cocycle(cover, group, trans, name="trivial")


SPHERE_REGION = Chart("S2", (0.0, 0.0), (np.pi, 2 * np.pi), ("theta", "phi"))


def sphere_cover(pole_margin=0.2) -> Cover:
    """North and south charts of S^2 in spherical coordinates."""
    north = Chart("N", (0.0, -np.inf), (np.pi - pole_margin, np.inf), ("theta", "phi"), (None, 2 * np.pi))
    south = Chart("S", (pole_margin, -np.inf), (np.pi, np.inf), ("theta", "phi"), (None, 2 * np.pi))
    return Cover((north, south), SPHERE_REGION)


def monopole_cocycle(k) -> Cocycle:
    """``g_NS = exp(i k phi)`` on the two-chart sphere cover (no quantisation check)."""
    k = float(k)

    def g_ns(x):
        return np.array([[np.exp(1j * k * x[1])]])

    def dg_ns(x):
        out = np.zeros((2, 1, 1), dtype=complex)
        out[1, 0, 0] = 1j * k * np.exp(1j * k * x[1])
        return out

    return Cocycle(sphere_cover(), U1(), {("N", "S"): g_ns}, {("N", "S"): dg_ns}, f"monopole({k:g})")


def build_monopole_bundle(k) -> Cocycle:
    """Dirac monopole bundle of charge ``k``; ``k`` must be an integer."""
    if isinstance(k, bool) or float(k) != int(round(float(k))):
        raise PreconditionError(f"monopole charge must be an integer, got {k!r}")
    return monopole_cocycle(int(round(float(k))))


# ---------------------------------------------------------------------------
# sections and gauge transformations

@dataclass(frozen=True)
class GaugedSection:
    """Section of an associated bundle, stored as one local function per chart."""

    cocycle: Cocycle
    local_values: dict
    action: Callable = linear_action

    def value(self, a, x):
        return self.local_values[a](np.asarray(x, dtype=float))


def section_push(s: GaugedSection, a, b, x):
    """Re-express the chart-``a`` value at ``x`` in chart ``b``."""
    if not s.cocycle.cover.overlap(a, b, x=x):
        raise DomainError(f"{np.asarray(x).tolist()} is not in the ({a}, {b}) overlap")
    return s.action(s.cocycle(b, a, x), s.value(a, x))


def section_violation(s: GaugedSection, samples=1000, seed=DEFAULT_SEED) -> float:
    """Max of ``|value_a - g_ab value_b|`` over sampled overlap points."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for a, b in product(s.cocycle.cover.ids, repeat=2):
        if a == b:
            continue
        for x in s.cocycle.cover.sample(rng, samples, (a, b)):
            diff = s.value(a, x) - s.action(s.cocycle(a, b, x), s.value(b, x))
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst


@dataclass(frozen=True)
class GaugeTransformation:
    """Local fields ``tau_a``; optional ``derivatives[a](x)`` gives ``d_i tau_a``."""

    cocycle: Cocycle
    local_tau: dict
    derivatives: dict = field(default_factory=dict)

    def tau(self, a, x):
        return np.asarray(self.local_tau[a](np.asarray(x, dtype=float)))

    def dtau(self, a, x, fd_step=1e-5):
        from ._fd import partials

        if a in self.derivatives:
            return np.asarray(self.derivatives[a](np.asarray(x, dtype=float)))
        return partials(lambda y: self.tau(a, y), x, fd_step)


def gauge_violation(t: GaugeTransformation, samples=1000, seed=DEFAULT_SEED) -> float:
    """Max of ``|tau_a - g_ab tau_b g_ab^-1|`` over sampled overlaps."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    c = t.cocycle
    for a, b in product(c.cover.ids, repeat=2):
        if a == b:
            continue
        for x in c.cover.sample(rng, samples, (a, b)):
            g = c(a, b, x)
            diff = t.tau(a, x) - g @ t.tau(b, x) @ np.linalg.inv(g)
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def apply_gauge(t: GaugeTransformation, s: GaugedSection) -> GaugedSection:
    """Pull a section back along the gauge transformation: ``value_a -> tau_a^-1 . value_a``."""
    if t.cocycle is not s.cocycle:
        raise PreconditionError("gauge transformation and section use different cocycles")
    values = {
        a: (lambda x, a=a: s.action(np.linalg.inv(t.tau(a, x)), s.value(a, x)))
        for a in s.local_values
    }
    return GaugedSection(s.cocycle, values, s.action)


def compose_gauge(t1: GaugeTransformation, t2: GaugeTransformation) -> GaugeTransformation:
    """Pointwise product ``tau1 . tau2``."""
    if t1.cocycle is not t2.cocycle:
        raise PreconditionError("gauge transformations use different cocycles")
    taus = {a: (lambda x, a=a: t1.tau(a, x) @ t2.tau(a, x)) for a in t1.local_tau}
    return GaugeTransformation(t1.cocycle, taus)
