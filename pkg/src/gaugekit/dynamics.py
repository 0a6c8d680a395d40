"""Geodesics, Lorentz-force motion and charged particles as geodesics of a bundle metric.

The bundle metric lives on ``chart x G`` with fibre points ``G = G_ref exp(Y)``,
``Y = sum_a y^a e_a``:

    h = blockdiag(g, 0) + W^T K W,

where ``W`` maps a tangent vector ``(xdot, ydot)`` to the basis coordinates of
``omega = Ad(G^-1) A(xdot) + exp(-Y) d exp(Y)[Ydot]`` and ``K`` is the Gram
matrix of the invariant inner product.  Along a geodesic ``Q = omega(gamma')``
is conserved.  For U(1) with ``Q = i Qr`` the base path obeys

    xdd^k = -Gamma^k_ij xd^i xd^j + Qr g^kl F_jl xd^j,   F = i * curvature,

which is the Lorentz force with charge-to-mass ratio ``Qr``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from ._fd import partials
from .gauge import LocalConnectionForm, curvature_form
from .errors import DomainError, PreconditionError
from .geometry import CHRISTOFFEL_STEP, MetricField, christoffel_from_derivative, levi_civita_christoffel
from .lie import Ad, dexp_left, exp, LieGroupSpec

RECENTER_RADIUS = 0.5


@dataclass
class Trajectory:
    """Time-stamped states with diagnostics; ``Q`` is empty for uncharged runs."""

    t: np.ndarray
    chart: list
    x: np.ndarray
    v: np.ndarray
    energy: np.ndarray
    Q: Optional[np.ndarray] = None
    exited: bool = False
    fibre: list = field(default_factory=list)

    @property
    def constraint_drift(self) -> np.ndarray:
        return np.abs(self.energy - self.energy[0])

    @property
    def charge_drift(self) -> float:
        if self.Q is None or len(self.Q) == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.Q - self.Q[0], axis=1)))

    def columns(self):
        n = self.x.shape[1]
        cols = ["t", "chart"] + [f"x{i}" for i in range(n)] + [f"v{i}" for i in range(n)]
        if self.Q is not None:
            cols += [f"Q{i}" for i in range(self.Q.shape[1])]
        return cols + ["energy", "constraint_drift"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns())
        drift = self.constraint_drift
        for k in range(len(self.t)):
            row = [repr(float(self.t[k])), str(self.chart[k])]
            row += [repr(float(a)) for a in self.x[k]] + [repr(float(a)) for a in self.v[k]]
            if self.Q is not None:
                row += [repr(float(a)) for a in self.Q[k]]
            row += [repr(float(self.energy[k])), repr(float(drift[k]))]
            w.writerow(row)
        return buf.getvalue()


def _rk4(f, y, h):
    k1 = f(y)
    k2 = f(y + h / 2 * k1)
    k3 = f(y + h / 2 * k2)
    k4 = f(y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


class _Exit(Exception):
    pass


def _spray(gamma_at, force=None):
    def f(state):
        n = state.size // 2
        x, v = state[:n], state[n:]
        acc = -np.einsum("kij,i,j->k", gamma_at(x), v, v)
        if force is not None:
            acc = acc + force(x, v)
        return np.concatenate([v, acc])
    return f


def _integrate(g: MetricField, x0, v0, t_span, steps, force=None, analytic=True):
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if x0.shape != (g.dim,) or v0.shape != (g.dim,):
        raise PreconditionError(f"initial state must have {g.dim} components")
    if not np.all(np.isfinite(v0)):
        raise PreconditionError("initial velocity must be finite")
    g.chart.require(x0)

    def gamma_at(x):
        if not g.chart.contains(x, 2 * CHRISTOFFEL_STEP * (1 + np.abs(x))):
            raise _Exit
        return levi_civita_christoffel(g, x, analytic=analytic)

    f = _spray(gamma_at, force)
    t0, t1 = map(float, t_span)
    h = (t1 - t0) / steps
    ts = [t0]
    states = [np.concatenate([x0, v0])]
    exited = False
    y = states[0]
    for k in range(steps):
        try:
            y = _rk4(f, y, h)
        except _Exit:
            exited = True
            break
        ts.append(t0 + (k + 1) * h)
        states.append(y)
    S = np.array(states)
    n = g.dim
    x, v = S[:, :n], S[:, n:]
    energy = np.array([0.5 * vi @ g(xi) @ vi for xi, vi in zip(x, v)])
    return Trajectory(np.array(ts), [g.chart.id] * len(ts), x, v, energy, exited=exited)


def geodesic_integrate(g: MetricField, x0, v0, t_span=(0.0, 1.0), steps=1000, analytic=True) -> Trajectory:
    """RK4 on ``x' = v, v'^k = -Gamma^k_ij v^i v^j``; stops with ``exited`` set at the chart edge."""
    return _integrate(g, x0, v0, t_span, steps, analytic=analytic)


def em_field_from_connection(conn: LocalConnectionForm, chart=None):
    """Real field strength ``F = i * curvature`` of a U(1) connection as ``x -> (n, n)``."""
    if conn.group.name != "U1":
        raise PreconditionError("field strength extraction needs a U(1) connection")
    chart = conn.charts[0] if chart is None else chart
    return lambda x: np.real(1j * curvature_form(conn, chart, x)[:, :, 0, 0])


def spatial_field_from_B(B):
    """``F_ij = -eps_ijk B_k`` on R^3 for a constant or callable ``B``."""
    from .forms import levi_civita

    eps = levi_civita(3)
    if callable(B):
        return lambda x: -np.einsum("ijk,k->ij", eps, np.asarray(B(x), dtype=float))
    F = -np.einsum("ijk,k->ij", eps, np.asarray(B, dtype=float))
    return lambda x: F


def lorentz_force_integrate(g: MetricField, F, q_over_m, x0, v0, t_span=(0.0, 1.0), steps=1000) -> Trajectory:
    """RK4 on ``v'^k = -Gamma^k_ij v^i v^j + (q/m) g^kl F_jl v^j``.

    ``F`` is a callable ``x -> (n, n)`` antisymmetric array or a U(1) connection.
    """
    if isinstance(F, LocalConnectionForm):
        F = em_field_from_connection(F)
    qm = float(q_over_m)

    def force(x, v):
        Fx = np.asarray(F(x), dtype=float)
        return qm * np.linalg.solve(g(x), v @ Fx)

    return _integrate(g, x0, v0, t_span, steps, force=force)


# ---------------------------------------------------------------------------
# Kaluza-Klein

@dataclass(frozen=True)
class ParticleState:
    """Point ``(x, G)`` of ``chart x G`` with base velocity and left-trivialised fibre velocity."""

    chart: object
    x: np.ndarray
    v: np.ndarray
    fibre: np.ndarray
    fibre_rate: np.ndarray

    @classmethod
    def with_charge(cls, conn: LocalConnectionForm, chart, x, v, Q, fibre=None):
        """State whose conserved charge ``omega(gamma')`` equals ``Q`` (an algebra element)."""
        group = conn.group
        G = group.identity() if fibre is None else np.asarray(fibre, dtype=group.dtype)
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        AX = conn.chart_matrix(chart, x, v)
        rate = np.asarray(Q, dtype=group.dtype) - Ad(np.linalg.inv(G), AX)
        return cls(chart, x, v, G, rate)


def _gram(group: LieGroupSpec):
    B = group.basis
    return np.array([[group.inner(a, b) for b in B] for a in B])


class KKMetric:
    """Bundle metric on ``chart x G`` near a reference fibre point ``G_ref``."""

    def __init__(self, g: MetricField, conn: LocalConnectionForm, chart, g_ref=None):
        self.g = g
        self.conn = conn
        self.group = conn.group
        self.chart = chart
        self.g_ref = self.group.identity() if g_ref is None else np.asarray(g_ref)
        self.n = g.dim
        self.d = self.group.dim
        self.K = _gram(self.group)
        self.abelian = self.group.name == "U1"
        self._basis = np.array(self.group.basis)

    def fibre_element(self, y):
        return self.g_ref @ exp(self.group.from_coords(y))

    def _coords(self, Z):
        # orthonormal basis: coordinates are invariant inner products with the generators
        return -self.group.inner_scale * np.real(np.einsum("pq,aqp->a", Z, self._basis))

    def _dexp_block(self, y):
        """Columns ``coords(dexp_left(Y, e_a))``, i.e. ``phi(-ad_Y)`` with ``phi(M) = (e^M - 1) / M``."""
        d = self.d
        Y = self.group.from_coords(y)
        ad = np.column_stack([self._coords(Y @ e - e @ Y) for e in self._basis])
        block = np.zeros((2 * d, 2 * d))
        block[:d, :d] = -ad
        block[:d, d:] = np.eye(d)
        return scipy.linalg.expm(block)[:d, d:]

    def frame(self, x, y):
        """Matrix ``W`` with ``coords(omega(xdot, ydot)) = W @ (xdot, ydot)``."""
        A = self.conn.A(self.chart, x)
        W = np.zeros((self.d, self.n + self.d))
        if self.abelian:
            W[:, : self.n] = np.real(A[:, 0, 0] / 1j)[None, :]
            W[:, self.n:] = np.eye(self.d)
            return W
        G = self.fibre_element(y)
        Ginv = np.linalg.inv(G)
        W[:, : self.n] = np.column_stack([self._coords(Ginv @ Ai @ G) for Ai in A])
        W[:, self.n:] = self._dexp_block(y)
        return W

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        x, y = z[: self.n], z[self.n:]
        W = self.frame(x, y)
        h = W.T @ self.K @ W
        h[: self.n, : self.n] += self.g(x)
        return 0.5 * (h + h.T)

    def charge(self, z, zdot):
        W = self.frame(z[: self.n], z[self.n:])
        return W @ zdot

    def christoffel(self, z, fd_step=CHRISTOFFEL_STEP):
        dh = partials(self, z, fd_step)
        return christoffel_from_derivative(np.linalg.inv(self(z)), dh)


def kk_metric_eval(g: MetricField, conn: LocalConnectionForm, x, y=None, chart=None, g_ref=None) -> np.ndarray:
    """Bundle metric matrix at base point ``x`` and fibre exponential coordinates ``y``."""
    chart = conn.charts[0] if chart is None else chart
    m = KKMetric(g, conn, chart, g_ref)
    y = np.zeros(m.d) if y is None else np.asarray(y, dtype=float)
    h = m(np.concatenate([np.asarray(x, dtype=float), y]))
    if np.linalg.cond(h) > 1e12:
        raise DomainError("bundle metric is degenerate")
    return h


def _switch_chart(conn: LocalConnectionForm, a, x, xdot, G, rate):
    """Move fibre data from chart ``a`` to another chart containing ``x``."""
    cover = conn.cocycle.cover
    for b in cover.ids:
        if b != a and conn.cocycle.cover.chart(b).contains(x, 0.05) and b in conn.potentials:
            gba = conn.cocycle(b, a, x)
            dg = conn.cocycle.derivative(b, a, x)
            if dg is None:
                dg = partials(lambda y: conn.cocycle(b, a, y), x, CHRISTOFFEL_STEP)
            mc = np.linalg.inv(gba) @ np.tensordot(xdot, dg, axes=(0, 0))
            new_rate = Ad(np.linalg.inv(G), mc) + rate
            return b, gba @ G, new_rate
    return None


def kk_geodesic(g: MetricField, conn: LocalConnectionForm, state: ParticleState,
                t_span=(0.0, 10.0), steps=2000, switch_margin=0.05) -> Trajectory:
    """Geodesic of the bundle metric; records ``Q = omega(gamma')`` in basis coordinates.

    Fibre coordinates are recentred when ``|y|`` exceeds 0.5 (non-abelian
    groups) and fibre data is pushed through the cocycle when the base leaves
    its chart.
    """
    group = conn.group
    n, d = g.dim, group.dim
    t0, t1 = map(float, t_span)
    h = (t1 - t0) / steps
    chart = state.chart
    G = np.asarray(state.fibre, dtype=group.dtype)
    metric = KKMetric(g, conn, chart, G)
    y = np.zeros(d)
    ydot = np.real(group.coords(np.asarray(state.fibre_rate)))
    z = np.concatenate([state.x, y])
    zdot = np.concatenate([state.v, ydot])
    cover = conn.cocycle.cover

    def rhs(s):
        zz, vv = s[: n + d], s[n + d:]
        if not cover.chart(chart).contains(zz[:n]) or not g.chart.contains(zz[:n]):
            raise _Exit
        gam = metric.christoffel(zz)
        return np.concatenate([vv, -np.einsum("kij,i,j->k", gam, vv, vv)])

    def record(zz, vv):
        Qc = metric.charge(zz, vv)
        return 0.5 * vv @ metric(zz) @ vv, Qc

    ts, charts, xs, vs, Es, Qs, fib = [], [], [], [], [], [], []
    S = np.concatenate([z, zdot])
    exited = False
    for k in range(steps + 1):
        zz, vv = S[: n + d], S[n + d:]
        E, Qc = record(zz, vv)
        ts.append(t0 + k * h)
        charts.append(chart)
        xs.append(zz[:n].copy())
        vs.append(vv[:n].copy())
        Es.append(E)
        Qs.append(Qc)
        fib.append(metric.fibre_element(zz[n:]))
        if k == steps:
            break
        x = zz[:n]
        if not cover.chart(chart).contains(x, switch_margin):
            Gcur = metric.fibre_element(zz[n:])
            rate = dexp_left(group.from_coords(zz[n:]), group.from_coords(vv[n:]))
            moved = _switch_chart(conn, chart, x, vv[:n], Gcur, rate)
            if moved is not None:
                chart, Gnew, rate = moved
                metric = KKMetric(g, conn, chart, Gnew)
                S = np.concatenate([x, np.zeros(d), vv[:n], np.real(group.coords(rate))])
                zz, vv = S[: n + d], S[n + d:]
        elif not metric.abelian and np.linalg.norm(zz[n:]) > RECENTER_RADIUS:
            Y = group.from_coords(zz[n:])
            rate = dexp_left(Y, group.from_coords(vv[n:]))
            metric = KKMetric(g, conn, chart, metric.fibre_element(zz[n:]))
            S = np.concatenate([zz[:n], np.zeros(d), vv[:n], np.real(group.coords(rate))])
        try:
            S = _rk4(rhs, S, h)
        except _Exit:
            exited = True
            break
    return Trajectory(np.array(ts), charts, np.array(xs), np.array(vs), np.array(Es), np.array(Qs), exited, fib)


def charge_coordinates(group: LieGroupSpec, Q) -> np.ndarray:
    return np.real(group.coords(np.asarray(Q)))


@dataclass(frozen=True)
class ForceComparison:
    kk: Trajectory
    lorentz: Trajectory
    max_gap: float
    charge_drift: float
    q_over_m: float


def compare_kk_lorentz(g: MetricField, conn: LocalConnectionForm, x0, v0, Qr, t_span=(0.0, 10.0),
                       steps=2000) -> ForceComparison:
    """Base projection of a charged bundle geodesic against direct Lorentz-force motion.

    The U(1) charge ``Q = i Qr`` corresponds to ``q = -i Q m``, i.e. ``q/m = Qr``.
    """
    if conn.group.name != "U1":
        raise PreconditionError("the force comparison is defined for U(1) bundles")
    chart = conn.charts[0]
    state = ParticleState.with_charge(conn, chart, x0, v0, np.array([[1j * Qr]]))
    kk = kk_geodesic(g, conn, state, t_span, steps)
    q_over_m = float(np.real(-1j * (1j * Qr)))
    lor = lorentz_force_integrate(g, em_field_from_connection(conn, chart), q_over_m, x0, v0, t_span, steps)
    m = min(len(kk.t), len(lor.t))
    gap = float(np.max(np.linalg.norm(kk.x[:m] - lor.x[:m], axis=1)))
    return ForceComparison(kk, lor, gap, kk.charge_drift, q_over_m)


def cpt_retrace(g: MetricField, conn: LocalConnectionForm, state: ParticleState, t_span=(0.0, 10.0), steps=2000):
    """Run forward, flip base and fibre velocities at the end point, run back.

    Returns ``(forward, backward, max pointwise gap between the base paths)``.
    """
    fwd = kk_geodesic(g, conn, state, t_span, steps)
    end_chart = fwd.chart[-1]
    x_end = fwd.x[-1]
    v_end = fwd.v[-1]
    G_end = fwd.fibre[-1]
    group = conn.group
    Q_end = group.from_coords(fwd.Q[-1])
    rate_end = Q_end - Ad(np.linalg.inv(G_end), conn.chart_matrix(end_chart, x_end, v_end))
    back_state = ParticleState(end_chart, x_end, -v_end, G_end, -rate_end)
    bwd = kk_geodesic(g, conn, back_state, t_span, steps)
    m = min(len(fwd.t), len(bwd.t))
    gap = float(np.max(np.linalg.norm(fwd.x[::-1][:m] - bwd.x[:m], axis=1)))
    return fwd, bwd, gap


def cyclotron_radius(trajectory: Trajectory, axes=(0, 1)) -> float:
    """Radius of the circle fitted algebraically through the projected base points."""
    P = trajectory.x[:, list(axes)]
    A = np.column_stack([2 * P[:, 0], 2 * P[:, 1], np.ones(len(P))])
    b = np.sum(P**2, axis=1)
    cx, cy, c = np.linalg.lstsq(A, b, rcond=None)[0]
    return float(math.sqrt(c + cx * cx + cy * cy))
