"""Charts, metric fields and the curvature of their Levi-Civita connections.

Index conventions: ``gamma[k, i, j]`` is the Christoffel symbol that multiplies
``v^i w^j`` in the ``k``-th component, with the geodesic equation
``x''^k = -gamma[k, i, j] x'^i x'^j``.  The Riemann tensor is stored as
``riemann[l, k, i, j]`` with

    R^l_{kij} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}

so that ``riemann[..., i, j]`` is the curvature 2-form.  Ricci contracts the
upper index with the first 2-form slot, ``Ric_kj = R^i_{kij}``, which gives
scalar curvature ``+2`` on the unit sphere.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import simpson

from ._fd import fd_steps, partials
from .errors import CatalogError, DomainError, NumericDomainError, PreconditionError

CHRISTOFFEL_STEP = 1e-5
CURVATURE_STEP = 1e-4
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class Chart:
    """Axis-aligned coordinate box.

    ``periods`` marks periodic coordinates (e.g. a longitude) with their
    period; points differing by a period are the same point of the manifold.
    """

    id: str
    lower: tuple
    upper: tuple
    names: tuple = ()
    periods: tuple = ()

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError(f"chart {self.id!r} has an empty domain")
        object.__setattr__(self, "_lo", lo)
        object.__setattr__(self, "_hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def period(self, axis: int) -> Optional[float]:
        if axis < len(self.periods):
            return self.periods[axis]
        return None

    def contains(self, x, margin=0.0) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,) or not np.all(np.isfinite(x)):
            return False
        return bool(np.all(x > self._lo + margin) and np.all(x < self._hi - margin))

    def require(self, x, margin=0.0):
        if not self.contains(x, margin):
            raise DomainError(
                f"point {np.asarray(x).tolist()} is not inside chart {self.id!r} "
                f"with margin {np.max(margin) if np.size(margin) else margin:g}"
            )


def box(id, n, lower=-np.inf, upper=np.inf, names=(), periods=()):
    return Chart(id, (lower,) * n, (upper,) * n, tuple(names), tuple(periods))


@dataclass(frozen=True)
class MetricField:
    """Chart-local metric ``x -> g(x)`` of signature ``(p, q)``.

    ``derivative(x)`` (optional) returns ``dg[l, i, j] = d_l g_ij``.  Set
    ``constant`` for metrics with constant coefficients; their Christoffel
    symbols are then returned as exact zeros without evaluation.
    """

    chart: Chart
    func: Callable
    signature: tuple
    derivative: Optional[Callable] = None
    name: str = ""
    params: dict = field(default_factory=dict)
    constant: bool = False

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def sign(self) -> int:
        """``(-1)^q`` for ``q`` negative eigenvalues."""
        return -1 if self.signature[1] % 2 else 1

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def checked(self, x) -> np.ndarray:
        g = self(x)
        if not np.all(np.isfinite(g)):
            raise NumericDomainError("metric has non-finite entries")
        if np.linalg.cond(g) > MAX_CONDITION:
            raise NumericDomainError(f"degenerate metric at {np.asarray(x).tolist()}")
        return g


def metric_derivative(g: MetricField, x, fd_step=CHRISTOFFEL_STEP, analytic=True):
    """``dg[l, i, j] = d_l g_ij`` at ``x``."""
    x = np.asarray(x, dtype=float)
    if analytic and g.derivative is not None:
        return np.asarray(g.derivative(x), dtype=float)
    return partials(g, x, fd_step)


def christoffel_from_derivative(ginv, dg):
    # G^k_ij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij)
    lower = 0.5 * (
        np.transpose(dg, (1, 0, 2)) + np.transpose(dg, (1, 2, 0)) - dg
    )  # lower[l, i, j]
    gamma = np.einsum("kl,lij->kij", ginv, lower)
    return 0.5 * (gamma + np.transpose(gamma, (0, 2, 1)))


def levi_civita_christoffel(g: MetricField, x, fd_step=CHRISTOFFEL_STEP, analytic=True):
    """Christoffel symbols ``gamma[k, i, j]`` of the Levi-Civita connection.

    Uses ``g.derivative`` when available (and ``analytic``), otherwise central
    differences with step ``fd_step * (1 + |x_l|)``.  The result is exactly
    symmetric in ``(i, j)``.
    """
    x = np.asarray(x, dtype=float)
    if analytic and g.constant:
        g.chart.require(x)
        return np.zeros((g.dim,) * 3)
    if analytic and g.derivative is not None:
        g.chart.require(x)
    else:
        g.chart.require(x, 2 * fd_steps(x, fd_step))
    gx = g.checked(x)
    dg = metric_derivative(g, x, fd_step, analytic)
    return christoffel_from_derivative(np.linalg.inv(gx), dg)


@dataclass(frozen=True)
class CurvatureTensor:
    point: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float


def riemann_from_christoffel(gamma_field, x, fd_step=CURVATURE_STEP):
    """Riemann tensor of an arbitrary connection given as ``x -> gamma[k,i,j]``."""
    x = np.asarray(x, dtype=float)
    G = gamma_field(x)
    dG = partials(gamma_field, x, fd_step)  # dG[i, l, j, k] = d_i G^l_jk
    half = np.einsum("iljk->lkij", dG) + np.einsum("lim,mjk->lkij", G, G)
    # a single subtraction keeps the (i, j) antisymmetry exact in floating point
    return half - np.transpose(half, (0, 1, 3, 2))


def riemann_curvature(g: MetricField, x, fd_step=CURVATURE_STEP, analytic=True):
    """Riemann, Ricci and scalar curvature of the Levi-Civita connection."""
    x = np.asarray(x, dtype=float)
    h = fd_steps(x, fd_step)
    margin = 3 * h if (g.derivative is None or not analytic) else h
    g.chart.require(x, margin)
    inner_step = fd_step if (g.derivative is None or not analytic) else CHRISTOFFEL_STEP

    def gamma_field(y):
        return levi_civita_christoffel(g, y, inner_step, analytic)

    R = riemann_from_christoffel(gamma_field, x, fd_step)
    ric = np.einsum("ikij->kj", R)
    ric = 0.5 * (ric + ric.T)
    scalar = float(np.einsum("kj,kj->", np.linalg.inv(g.checked(x)), ric))
    return CurvatureTensor(x, R, ric, scalar)


def einstein_tensor(g: MetricField, x, fd_step=CURVATURE_STEP, analytic=True):
    curv = riemann_curvature(g, x, fd_step, analytic)
    return curv.ricci - 0.5 * curv.scalar * g(x)


def einstein_residual(g: MetricField, x, T=None, fd_step=CURVATURE_STEP, analytic=True):
    """``G(x) - 8 pi T(x)``; ``T`` is a callable stress-energy field or None."""
    G = einstein_tensor(g, x, fd_step, analytic)
    if T is None:
        return G
    return G - 8.0 * np.pi * np.asarray(T(np.asarray(x, dtype=float)), dtype=float)


def torsion(gamma, x=None):
    """``T^k_ij = G^k_ij - G^k_ji`` for an array or a field ``x -> gamma``."""
    G = gamma(x) if callable(gamma) else np.asarray(gamma)
    return G - np.transpose(G, (0, 2, 1))


def _uniform_grid(t):
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 3:
        raise PreconditionError("need at least 3 samples on the time grid")
    dt = np.diff(t)
    if np.any(dt <= 0) or np.max(np.abs(dt - dt[0])) > 1e-9 * abs(dt[0]) * t.size:
        raise PreconditionError("time grid must be uniform and increasing")
    return t


def energy_integral(g: MetricField, t, points):
    """``1/2 int g(c', c') dt`` by composite Simpson, ``c'`` by central differences."""
    t = _uniform_grid(t)
    c = np.asarray(points, dtype=float)
    dc = np.gradient(c, t, axis=0, edge_order=2)
    gs = np.array([g(p) for p in c])
    integrand = 0.5 * np.einsum("ti,tij,tj->t", dc, gs, dc)
    return float(simpson(integrand, x=t))


def first_variation(g: MetricField, t, points, r, fd_step=CHRISTOFFEL_STEP, velocities=None, dr=None):
    """Derivative of the energy integral along a compactly supported variation ``r``.

    Evaluates ``int -Tg(c')(c', r) - g(c'', r) + 1/2 Tg(r)(c', c') dt`` where
    ``Tg(X) = X^l d_l g``, with ``c'`` and ``c''`` by central differences.

    When the curve velocities are known (e.g. from an integrator) pass them as
    ``velocities``; the integrand is then taken in the integrated-by-parts form
    ``g(c', r') + 1/2 Tg(r)(c', c')``, which needs no second derivative.  ``dr``
    supplies ``r'`` exactly; otherwise it is differenced.
    """
    t = _uniform_grid(t)
    c = np.asarray(points, dtype=float)
    r = np.asarray(r, dtype=float)
    if r.shape != c.shape:
        raise PreconditionError("variation must be sampled on the curve grid")
    scale = 1.0 + np.max(np.abs(r))
    if np.max(np.abs(r[[0, -1]])) > 1e-10 * scale:
        raise PreconditionError("variation must vanish at both endpoints")
    vals = np.empty(t.size)
    if velocities is not None:
        dc = np.asarray(velocities, dtype=float)
        dr = np.gradient(r, t, axis=0, edge_order=2) if dr is None else np.asarray(dr, dtype=float)
        gs = np.array([g(p) for p in c])
        dgs = np.array([metric_derivative(g, p, fd_step) for p in c])
        vals = np.einsum("ti,tij,tj->t", dc, gs, dr) + 0.5 * np.einsum("tl,tlij,ti,tj->t", r, dgs, dc, dc)
        return float(simpson(vals, x=t))
    dc = np.gradient(c, t, axis=0, edge_order=2)
    ddc = np.gradient(dc, t, axis=0, edge_order=2)
    for n, (p, v, a, w) in enumerate(zip(c, dc, ddc, r)):
        gp = g(p)
        dg = metric_derivative(g, p, fd_step)
        Tg_v = np.einsum("l,lij->ij", v, dg)
        Tg_r = np.einsum("l,lij->ij", w, dg)
        vals[n] = -v @ Tg_v @ w - a @ gp @ w + 0.5 * v @ Tg_r @ v
    return float(simpson(vals, x=t))


# ---------------------------------------------------------------------------
# metric catalog

def euclidean(n: int, name=None) -> MetricField:
    chart = box(f"R{n}", n, names=tuple("xyzw"[:n]) if n <= 4 else ())
    eye = np.eye(n)
    zero = np.zeros((n, n, n))
    return MetricField(chart, lambda x: eye, (n, 0), lambda x: zero, name or f"euclidean{n}", constant=True)


def minkowski(n: int = 4) -> MetricField:
    chart = box(f"R1,{n - 1}", n, names=("t", "x", "y", "z")[:n])
    eta = np.diag([-1.0] + [1.0] * (n - 1))
    zero = np.zeros((n, n, n))
    return MetricField(chart, lambda x: eta, (n - 1, 1), lambda x: zero, f"minkowski{n}", constant=True)


def sphere(radius: float = 1.0) -> MetricField:
    R2 = radius**2
    chart = Chart("S2", (0.0, -np.inf), (np.pi, np.inf), ("theta", "phi"), (None, 2 * np.pi))

    def g(x):
        s = np.sin(x[0])
        return np.diag([R2, R2 * s * s])

    def dg(x):
        out = np.zeros((2, 2, 2))
        out[0, 1, 1] = R2 * np.sin(2 * x[0])
        return out

    return MetricField(chart, g, (2, 0), dg, "sphere2", {"radius": radius})


def schwarzschild(M: float = 1.0) -> MetricField:
    chart = Chart(
        "schwarzschild", (-np.inf, 2 * M, 0.0, -np.inf), (np.inf,) * 2 + (np.pi, np.inf),
        ("t", "r", "theta", "phi"), (None, None, None, 2 * np.pi),
    )

    def g(x):
        r, th = x[1], x[2]
        f = 1.0 - 2.0 * M / r
        return np.diag([-f, 1.0 / f, r * r, (r * np.sin(th)) ** 2])

    def dg(x):
        r, th = x[1], x[2]
        f = 1.0 - 2.0 * M / r
        df = 2.0 * M / r**2
        out = np.zeros((4, 4, 4))
        out[1, 0, 0] = -df
        out[1, 1, 1] = -df / f**2
        out[1, 2, 2] = 2 * r
        out[1, 3, 3] = 2 * r * np.sin(th) ** 2
        out[2, 3, 3] = r * r * np.sin(2 * th)
        return out

    return MetricField(chart, g, (3, 1), dg, "schwarzschild_ext", {"M": M})


METRICS = {
    "euclidean2": lambda: euclidean(2, "euclidean2"),
    "euclidean3": lambda: euclidean(3, "euclidean3"),
    "minkowski4": lambda: minkowski(4),
    "sphere2": sphere,
    "schwarzschild_ext": schwarzschild,
}


def metric(name: str, **params) -> MetricField:
    """Look up a catalog metric by its exact name."""
    try:
        factory = METRICS[name]
    except KeyError:
        raise CatalogError(f"unknown metric {name!r}") from None
    return factory(**params)
