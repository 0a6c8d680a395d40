"""Parallel transport, holonomy and covariant derivatives.

Transport solves ``dv/dt = -M(c'(t)) v`` where ``M(X)`` is the connection
matrix in the current chart: ``A_a(X)`` for a principal connection acting in
its defining representation, ``Gamma^k_ij X^i`` for a Levi-Civita connection.
The covariant derivative consistent with this is ``nabla_X s = X(s) + M(X) s``,
and its curvature commutator is ``F_ij = d_i A_j - d_j A_i + [A_i, A_j]``.

The holonomy of a loop is the group element ``P`` with ``v(1) = P v(0)``, so
``hol(c2 . c1) = hol(c2) hol(c1)``.  Around a small coordinate rectangle with
sides ``s, t`` in directions ``(i, j)`` one gets ``log(P) / (s t) -> -F_ij``;
for ``A = -i B x dy`` this is ``hol = exp(i B s t)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from ._fd import fd_steps, partials
from .atlas import GaugedSection
from .gauge import LocalConnectionForm, curvature_form
from .errors import CoverError, DomainError, PreconditionError, BranchError, CatalogError
from .geometry import MetricField, levi_civita_christoffel
from .lie import log

STEPS_PER_UNIT = 1000
MIN_STEPS = 64
REPROJECT_EVERY = 50
HALVING_TOL = 1e-7
RANK_TOL = 1e-8


# ---------------------------------------------------------------------------
# curves

@dataclass(frozen=True)
class CurveSegment:
    """Smooth piece ``s -> x(s)``, ``s in [0, length]``, lying in one chart."""

    chart: object
    func: Callable
    length: float
    derivative: Optional[Callable] = None

    def __call__(self, s):
        return np.asarray(self.func(float(s)), dtype=float)

    def velocity(self, s):
        if self.derivative is not None:
            return np.asarray(self.derivative(float(s)), dtype=float)
        h = 1e-6 * max(1.0, self.length)
        lo, hi = max(0.0, s - h), min(self.length, s + h)
        return (self(hi) - self(lo)) / (hi - lo)

    def reversed(self) -> "CurveSegment":
        L = self.length
        d = None if self.derivative is None else (lambda s, f=self.derivative: -np.asarray(f(L - s)))
        return CurveSegment(self.chart, lambda s, f=self.func: f(L - s), L, d)

    def reparametrized(self, phi, dphi, length) -> "CurveSegment":
        """Same trace traversed as ``s -> x(phi(s))``; ``phi`` monotone onto ``[0, self.length]``."""
        d = None
        if self.derivative is not None:
            d = lambda s, f=self.derivative: np.asarray(f(phi(s))) * dphi(s)
        return CurveSegment(self.chart, lambda s, f=self.func: f(phi(s)), length, d)


def line_segment(chart, start, end) -> CurveSegment:
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    delta = end - start
    return CurveSegment(chart, lambda s: start + s * delta, 1.0, lambda s: delta)


@dataclass(frozen=True)
class SampledCurve:
    """Piecewise smooth curve; consecutive segments are joined at chart switches."""

    segments: tuple

    def __post_init__(self):
        if not self.segments:
            raise PreconditionError("a curve needs at least one segment")
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def length(self) -> float:
        return float(sum(seg.length for seg in self.segments))

    @property
    def start(self):
        return self.segments[0](0.0)

    @property
    def end(self):
        last = self.segments[-1]
        return last(last.length)

    @property
    def start_chart(self):
        return self.segments[0].chart

    @property
    def end_chart(self):
        return self.segments[-1].chart

    def reversed(self) -> "SampledCurve":
        return SampledCurve(tuple(seg.reversed() for seg in reversed(self.segments)))

    def then(self, other: "SampledCurve") -> "SampledCurve":
        """Traverse ``self`` first, then ``other``."""
        return SampledCurve(self.segments + other.segments)

    def sample(self, per_unit=100):
        """``(t, chart ids, points)`` on a per-segment uniform grid."""
        ts, ids, pts = [], [], []
        offset = 0.0
        for seg in self.segments:
            m = max(2, int(math.ceil(per_unit * seg.length)))
            for s in np.linspace(0.0, seg.length, m + 1):
                ts.append(offset + s)
                ids.append(seg.chart)
                pts.append(seg(s))
            offset += seg.length
        return np.array(ts), ids, np.array(pts)


def concatenate(*curves: SampledCurve) -> SampledCurve:
    """Curve running through ``curves`` in the given order."""
    segs = ()
    for c in curves:
        segs += c.segments
    return SampledCurve(segs)


def polyline(chart, points) -> SampledCurve:
    pts = [np.asarray(p, dtype=float) for p in points]
    return SampledCurve(tuple(line_segment(chart, a, b) for a, b in zip(pts[:-1], pts[1:])))


# ---------------------------------------------------------------------------
# connection adapters

@dataclass(frozen=True)
class LeviCivita:
    """Levi-Civita connection of a metric on its tangent bundle (single chart)."""

    metric: MetricField
    analytic: bool = True

    @property
    def dim(self):
        return self.metric.dim

    def matrix(self, chart, x, X):
        gamma = levi_civita_christoffel(self.metric, x, analytic=self.analytic)
        return np.einsum("kij,i->kj", gamma, np.asarray(X, dtype=float))

    def push(self, a, b, x):
        if a != b and a != self.metric.chart.id and b != self.metric.chart.id:
            raise CoverError("the Levi-Civita adapter works in a single chart")
        return np.eye(self.dim)

    def contains(self, chart, x):
        return self.metric.chart.contains(x)

    def norm(self, x, v):
        return math.sqrt(abs(float(np.real(np.conj(v) @ self.metric(x) @ v))))

    isometric = True


@dataclass(frozen=True)
class PrincipalAdapter:
    connection: LocalConnectionForm

    @property
    def dim(self):
        return self.connection.dim

    def matrix(self, chart, x, X):
        return self.connection.chart_matrix(chart, x, X)

    def push(self, a, b, x):
        return self.connection.cocycle(b, a, x)

    def contains(self, chart, x):
        try:
            return self.connection.cocycle.cover.chart(chart).contains(x)
        except CoverError:
            return False

    def norm(self, x, v):
        return float(np.linalg.norm(v))

    @property
    def isometric(self):
        return self.connection.group.compact


def adapter(conn):
    if isinstance(conn, (LeviCivita, PrincipalAdapter)):
        return conn
    if isinstance(conn, LocalConnectionForm):
        return PrincipalAdapter(conn)
    if isinstance(conn, MetricField):
        return LeviCivita(conn)
    raise TypeError(f"cannot transport with {type(conn).__name__}")


# ---------------------------------------------------------------------------
# transport

@dataclass
class TransportResult:
    value: np.ndarray
    chart: object
    steps: int
    norm_drift: float = 0.0
    step_halving_change: Optional[float] = None
    flagged: bool = False
    history: list = field(default_factory=list)


def _segment_steps(seg, steps_per_unit):
    return max(MIN_STEPS, int(math.ceil(steps_per_unit * seg.length)))


def _rk4_segment(ad, seg, Y, steps, reproject=None, record=None):
    h = seg.length / steps
    chart = seg.chart

    def rhs(s, y):
        x = seg(s)
        if not ad.contains(chart, x):
            raise CoverError(f"curve leaves chart {chart!r} at {x.tolist()}")
        return -ad.matrix(chart, x, seg.velocity(s)) @ y

    for n in range(steps):
        s = n * h
        k1 = rhs(s, Y)
        k2 = rhs(s + h / 2, Y + h / 2 * k1)
        k3 = rhs(s + h / 2, Y + h / 2 * k2)
        k4 = rhs(s + h, Y + h * k3)
        Y = Y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if reproject is not None and (n + 1) % REPROJECT_EVERY == 0:
            Y = reproject(Y)
        if record is not None:
            record.append(Y.copy())
    return Y


def _integrate(ad, curve: SampledCurve, Y0, steps_per_unit, reproject=None, record=False):
    Y = np.asarray(Y0)
    if _needs_complex(ad) or np.iscomplexobj(Y):
        Y = Y.astype(complex)
    else:
        Y = Y.astype(float)
    history = [] if record else None
    total = 0
    chart = curve.start_chart
    for seg in curve.segments:
        if seg.chart != chart:
            Y = ad.push(chart, seg.chart, seg(0.0)) @ Y
            chart = seg.chart
        n = _segment_steps(seg, steps_per_unit)
        Y = _rk4_segment(ad, seg, Y, n, reproject, history)
        total += n
    return Y, chart, total, history


def _needs_complex(ad):
    return isinstance(ad, PrincipalAdapter) and ad.connection.group.field == "complex"


def parallel_transport_vector(conn, curve: SampledCurve, v0, steps_per_unit=STEPS_PER_UNIT,
                              verify=False, record=False) -> TransportResult:
    """Transport a fibre vector along ``curve`` by fixed-step RK4.

    ``verify`` repeats the run with half the step and flags the result when
    the endpoints differ by more than ``1e-7``.
    """
    ad = adapter(conn)
    v0 = np.asarray(v0)
    if not np.all(np.isfinite(v0)):
        raise PreconditionError("initial vector must be finite")
    if not ad.contains(curve.start_chart, curve.start):
        raise CoverError("curve does not start inside its chart")
    v, chart, steps, hist = _integrate(ad, curve, v0, steps_per_unit, record=record)
    res = TransportResult(v, chart, steps, history=hist or [])
    if ad.isometric:
        n0 = ad.norm(curve.start, v0)
        res.norm_drift = abs(ad.norm(curve.end, v) - n0)
    if verify:
        v2, *_ = _integrate(ad, curve, v0, 2 * steps_per_unit)
        res.step_halving_change = float(np.max(np.abs(v2 - v)))
        res.flagged = res.step_halving_change >= HALVING_TOL
    return res


def horizontal_lift_group(conn: LocalConnectionForm, curve: SampledCurve, g0,
                          steps_per_unit=STEPS_PER_UNIT, verify=False) -> TransportResult:
    """Horizontal lift ``g' = -A(c') g`` of ``curve`` starting at ``g0``, chart-locally."""
    ad = adapter(conn)
    group = conn.group
    g0 = np.asarray(g0, dtype=group.dtype)
    rep = group.reproject if group.compact else None
    g, chart, steps, _ = _integrate(ad, curve, g0, steps_per_unit, reproject=rep)
    if rep is not None:
        drift = float(np.max(np.abs(g.conj().T @ g - np.eye(group.n))))
    else:
        drift = 0.0
    res = TransportResult(g, chart, steps, norm_drift=drift)
    if verify:
        g2, *_ = _integrate(ad, curve, g0, 2 * steps_per_unit, reproject=rep)
        res.step_halving_change = float(np.max(np.abs(g2 - g)))
        res.flagged = res.step_halving_change >= HALVING_TOL
    return res


def is_closed(curve: SampledCurve, cover=None, tol=1e-10) -> bool:
    if curve.start_chart != curve.end_chart:
        return False
    d = curve.end - curve.start
    if cover is not None:
        chart = cover.chart(curve.start_chart)
        for axis in range(d.size):
            P = chart.period(axis)
            if P:
                d[axis] = (d[axis] + P / 2) % P - P / 2
    return bool(np.max(np.abs(d)) <= tol * (1 + np.max(np.abs(curve.start))))


def holonomy(conn: LocalConnectionForm, loop: SampledCurve, steps_per_unit=STEPS_PER_UNIT):
    """Holonomy group element of a closed loop, expressed in the loop's start chart."""
    if not is_closed(loop, conn.cocycle.cover):
        raise PreconditionError("holonomy needs a closed loop ending in its start chart")
    return horizontal_lift_group(conn, loop, conn.group.identity(), steps_per_unit).value


def lasso_rectangle(chart, x, i, j, s, t) -> SampledCurve:
    """Loop from ``x`` to a corner, around the rectangle centred at ``x`` (``i`` then ``j``), and back."""
    x = np.asarray(x, dtype=float)
    ei = np.zeros_like(x)
    ej = np.zeros_like(x)
    ei[i] = s
    ej[j] = t
    corner = x - ei / 2 - ej / 2
    return polyline(chart, [x, corner, corner + ei, corner + ei + ej, corner + ej, corner, x])


def rectangle(chart, x, i, j, s, t) -> SampledCurve:
    """Counter-clockwise coordinate rectangle with corner ``x``: first along ``i``, then ``j``."""
    x = np.asarray(x, dtype=float)
    ei = np.zeros_like(x)
    ej = np.zeros_like(x)
    ei[i] = s
    ej[j] = t
    return polyline(chart, [x, x + ei, x + ei + ej, x + ej, x])


def infinitesimal_holonomy(conn: LocalConnectionForm, chart, x, i, j, s, t,
                           steps_per_unit=None) -> np.ndarray:
    """``log(hol(rectangle)) / (s t)`` for the rectangle of sides ``s, t`` centred at ``x``.

    Tends to ``-F_ij(x)`` with error ``O(s^2 + t^2)``.
    """
    loop = lasso_rectangle(chart, x, i, j, s, t)
    if steps_per_unit is None:
        steps_per_unit = STEPS_PER_UNIT
    H = holonomy(conn, loop, steps_per_unit)
    return log(H, conn.group) / (s * t)


def richardson(values, sizes, orders=(2, 4)):
    """Richardson extrapolation of ``values[k] ~ v + c_p sizes[k]^p`` to zero size."""
    vals = [np.asarray(v) for v in values]
    sizes = list(sizes)
    for p in orders:
        if len(vals) < 2:
            break
        new = []
        for k in range(len(vals) - 1):
            r = (sizes[k] / sizes[k + 1]) ** p
            new.append((r * vals[k + 1] - vals[k]) / (r - 1))
        vals = new
        sizes = sizes[1:]
    return vals[-1]


@dataclass(frozen=True)
class CurvatureHolonomyComparison:
    sizes: tuple
    estimates: tuple
    extrapolated: np.ndarray
    curvature: np.ndarray
    errors: tuple
    extrapolation_error: float
    order: float


def compare_curvature_holonomy(conn, chart, x, i, j, sizes=(0.1, 0.05, 0.025)):
    """Infinitesimal holonomy at shrinking square sizes versus ``-F_ij`` from the structure equation."""
    group = conn.group
    F = curvature_form(conn, chart, x)[i, j]
    ests = [infinitesimal_holonomy(conn, chart, x, i, j, h, h) for h in sizes]
    extra = richardson(ests, sizes)

    def norm(Z):
        return float(np.sqrt(max(group.inner(Z, Z), 0.0))) if group.compact else float(np.linalg.norm(Z))

    errs = tuple(norm(e + F) for e in ests)
    with np.errstate(divide="ignore", invalid="ignore"):
        slopes = np.diff(np.log(errs)) / np.diff(np.log(sizes))
    order = float(np.min(slopes)) if np.all(np.array(errs) > 1e-14) else math.inf
    return CurvatureHolonomyComparison(tuple(sizes), tuple(ests), extra, -F, errs, norm(extra + F), order)


# ---------------------------------------------------------------------------
# Ambrose-Singer

@dataclass(frozen=True)
class SpanReport:
    rank_holonomy: int
    rank_curvature: int
    included: bool
    skipped_loops: int

    def as_dict(self):
        return {
            "rank_holonomy": self.rank_holonomy,
            "rank_curvature": self.rank_curvature,
            "included": self.included,
            "skipped_loops": self.skipped_loops,
        }


def _rank(vectors, tol=RANK_TOL):
    if len(vectors) == 0:
        return 0
    M = np.atleast_2d(np.array(vectors, dtype=float))
    sv = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(sv > tol * max(1.0, sv[0] if sv.size else 0.0)))


def _real_coords(group, Z):
    c = np.asarray(group.coords(Z))
    return np.concatenate([c.real, c.imag]) if np.iscomplexobj(c) else c


def _lie_closure(group, elems, tol=RANK_TOL):
    basis = []

    def add(Z):
        cand = basis + [Z]
        if _rank([_real_coords(group, b) for b in cand], tol) > len(basis):
            basis.append(Z)
            return True
        return False

    for Z in elems:
        add(Z)
    grown = True
    while grown and len(basis) < group.dim:
        grown = False
        for A in list(basis):
            for B in list(basis):
                if add(A @ B - B @ A):
                    grown = True
    return basis


def ambrose_singer_span_check(conn: LocalConnectionForm, base, loops, samples, chart=None,
                              steps_per_unit=STEPS_PER_UNIT) -> SpanReport:
    """Check that ``log`` of the loop holonomies lies in the curvature span.

    The curvature span is the Lie closure of ``P_k^-1 F_ij(x_k) P_k`` where
    ``P_k`` transports along the straight segment from ``base`` to ``x_k``.
    """
    group = conn.group
    chart = conn.charts[0] if chart is None else chart
    base = np.asarray(base, dtype=float)
    H = []
    skipped = 0
    for loop in loops:
        try:
            H.append(log(holonomy(conn, loop, steps_per_unit), group))
        except BranchError as exc:
            warnings.warn(f"skipping loop: {exc}")
            skipped += 1
    Fs = []
    n = conn.dim
    for x in samples:
        P = horizontal_lift_group(conn, polyline(chart, [base, x]), group.identity(), steps_per_unit).value
        Pinv = np.linalg.inv(P)
        F = curvature_form(conn, chart, x)
        for i in range(n):
            for j in range(i + 1, n):
                Fs.append(Pinv @ F[i, j] @ P)
    span_F = _lie_closure(group, Fs)
    rank_F = len(span_F)
    rank_H = _rank([_real_coords(group, Z) for Z in H])
    both = [_real_coords(group, Z) for Z in span_F + H]
    included = _rank(both) == rank_F
    return SpanReport(rank_H, rank_F, bool(included), skipped)


# ---------------------------------------------------------------------------
# covariant derivatives of sections

COVARIANT_STEP = 1e-5


def _section_value(s, chart, x):
    if isinstance(s, GaugedSection):
        return np.asarray(s.value(chart, x))
    return np.asarray(s(np.asarray(x, dtype=float)))


def covariant_derivative_section(conn, s, X, m, chart=None, fd_step=COVARIANT_STEP):
    """``nabla_X s = X(s) + M(X) s`` at ``m`` in chart ``chart``.

    ``s`` is a :class:`GaugedSection` or a chart-local callable.
    """
    ad = adapter(conn)
    m = np.asarray(m, dtype=float)
    X = np.asarray(X, dtype=float)
    if chart is None:
        chart = conn.charts[0] if isinstance(conn, LocalConnectionForm) else conn.metric.chart.id
    margin = fd_step * (1 + np.max(np.abs(m))) * max(1.0, float(np.max(np.abs(X))))
    if not ad.contains(chart, m) or not all(
        ad.contains(chart, m + sgn * margin * np.sign(X)) for sgn in (-1, 1)
    ):
        raise DomainError(f"point {m.tolist()} too close to the edge of chart {chart!r}")
    val = _section_value(s, chart, m)
    h = fd_step * (1 + np.max(np.abs(m)))
    dX = (_section_value(s, chart, m + h * X) - _section_value(s, chart, m - h * X)) / (2 * h)
    return dX + ad.matrix(chart, m, X) @ val


def affine_curvature_commutator(conn, s, X, Y, m, chart=None, fd_step=1e-4):
    """``nabla_X nabla_Y s - nabla_Y nabla_X s`` for constant coordinate fields ``X, Y``."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)

    def nabla(V):
        return lambda y: covariant_derivative_section(conn, s, V, y, chart, fd_step)

    return (covariant_derivative_section(conn, nabla(Y), X, m, chart, fd_step)
            - covariant_derivative_section(conn, nabla(X), Y, m, chart, fd_step))


def curvature_action(conn: LocalConnectionForm, s, X, Y, m, chart=None):
    """``F(X, Y) s`` from the structure equation, for comparison with the commutator."""
    chart = conn.charts[0] if chart is None else chart
    F = curvature_form(conn, chart, m)
    FXY = np.einsum("i,j,ijab->ab", np.asarray(X, float), np.asarray(Y, float), F)
    return FXY @ _section_value(s, chart, m)


# ---------------------------------------------------------------------------
# loop catalog

def square_loop(s=1.0, dim=2, chart="R", origin=None, axes=(0, 1)) -> SampledCurve:
    x = np.zeros(dim) if origin is None else np.asarray(origin, dtype=float)
    return rectangle(chart, x, axes[0], axes[1], s, s)


def rect_loop(i=0, j=1, s=1.0, t=1.0, dim=2, chart="R", origin=None) -> SampledCurve:
    x = np.zeros(dim) if origin is None else np.asarray(origin, dtype=float)
    return rectangle(chart, x, i, j, s, t)


def equator_loop(chart="N", turns=1) -> SampledCurve:
    """The equator ``theta = pi/2`` traversed eastward from ``phi = 0``."""
    L = 2 * np.pi * turns
    seg = CurveSegment(chart, lambda s: np.array([np.pi / 2, s]), L, lambda s: np.array([0.0, 1.0]))
    return SampledCurve((seg,))


def _rotation_to_pole(axis):
    """Rotation matrix taking the unit vector ``axis`` to ``(0, 0, 1)``."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    z = np.array([0.0, 0.0, 1.0])
    v = np.cross(a, z)
    c = float(a @ z)
    if np.linalg.norm(v) < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    K = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + K + K @ K / (1 + c)


def _spherical(q, dq, phi_ref):
    X, Y, Z = q
    th = math.acos(max(-1.0, min(1.0, Z)))
    ph = math.atan2(Y, X)
    ph = phi_ref + (ph - phi_ref + math.pi) % (2 * math.pi) - math.pi
    dth = -dq[2] / math.sin(th)
    dph = (X * dq[1] - Y * dq[0]) / (X * X + Y * Y)
    return np.array([th, ph]), np.array([dth, dph])


def great_circle_segment(u, w, R, chart, phi_ref) -> CurveSegment:
    """Unit-speed arc from ``u`` to ``w`` on the unit sphere, in coordinates rotated by ``R``."""
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    angle = math.acos(max(-1.0, min(1.0, float(u @ w))))
    e = w - (u @ w) * u
    e = e / np.linalg.norm(e)

    def both(s):
        q = R @ (math.cos(s) * u + math.sin(s) * e)
        dq = R @ (-math.sin(s) * u + math.cos(s) * e)
        return _spherical(q, dq, phi_ref)

    return CurveSegment(chart, lambda s: both(s)[0], angle, lambda s: both(s)[1])


OCTANT_POLE_AXIS = (1.0, -1.0, 0.0)


def octant_triangle(chart="S2", pole_axis=OCTANT_POLE_AXIS) -> SampledCurve:
    """Geodesic triangle ``e_z -> e_x -> e_y -> e_z`` on the unit sphere (area ``pi/2``).

    Spherical coordinates are taken about ``pole_axis`` so the loop stays away
    from the coordinate singularities.
    """
    R = _rotation_to_pole(pole_axis)
    verts = [np.array(v, dtype=float) for v in ((0, 0, 1), (1, 0, 0), (0, 1, 0), (0, 0, 1))]
    segs = []
    phi_ref = math.atan2(*(R @ verts[0])[[1, 0]])
    for u, w in zip(verts[:-1], verts[1:]):
        seg = great_circle_segment(u, w, R, chart, phi_ref)
        segs.append(seg)
        phi_ref = float(seg(seg.length)[1])
    return SampledCurve(tuple(segs))


def tangent_rotation_angle(metric: MetricField, x, v0, v1) -> float:
    """Signed angle from ``v0`` to ``v1`` in the oriented tangent plane at ``x`` (2D)."""
    g = metric(x)
    cos = float(v0 @ g @ v1)
    sin = float(np.sqrt(abs(np.linalg.det(g))) * (v0[0] * v1[1] - v0[1] * v1[0]))
    return math.atan2(sin, cos)


LOOPS = {
    "square": square_loop,
    "rect": rect_loop,
    "equator": equator_loop,
    "octant_triangle": octant_triangle,
}


def loop(name: str, **params) -> SampledCurve:
    """Look up a catalog loop by its exact name."""
    try:
        factory = LOOPS[name]
    except KeyError:
        raise CatalogError(f"unknown loop {name!r}") from None
    return factory(**params)
