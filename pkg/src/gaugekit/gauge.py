"""Principal connections stored as local gauge potentials, and their curvature.

A connection is a family ``A_a`` of Lie-algebra-valued 1-forms, one per chart
of the underlying cocycle, ``A_a[i]`` being the coefficient of ``dx^i``.
Curvature is ``F = dA + 1/2 [A, A]``, i.e. ``F_ij = d_i A_j - d_j A_i + [A_i, A_j]``.
Horizontal equivariant forms are handled through their chart-local pullbacks,
which transform by ``Ad(g_ab^-1)`` on overlaps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import forms
from ._fd import fd_steps, partials
from .atlas import (
    Cocycle,
    Cover,
    GaugeTransformation,
    build_monopole_bundle,
    trivial_cocycle,
)
from .errors import CatalogError, NumericDomainError, PreconditionError
from .geometry import Chart, MetricField, box
from .lie import SU2, U1, Ad, LieGroupSpec, exp, exp_derivative, group_from_name

FORM_STEP = 1e-5


@dataclass(frozen=True)
class AlgebraValuedForm:
    """Chart-local Lie-algebra-valued k-form field ``x -> (n,)*k + (N, N)`` array."""

    degree: int
    dim: int
    func: Callable
    group: LieGroupSpec

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)))

    def norm(self, x) -> float:
        return form_norm(self.group, self(x), self.degree)


def form_norm(group: LieGroupSpec, value, degree) -> float:
    inner = group.inner if group.compact else None
    return forms.component_norm(value, degree, inner)


def constant_form(group, dim, degree, value) -> AlgebraValuedForm:
    value = forms.antisymmetrize(np.asarray(value), degree)
    return AlgebraValuedForm(degree, dim, lambda x: value, group)


def zero_form(group, dim, degree) -> AlgebraValuedForm:
    shape = (dim,) * degree + (group.n, group.n)
    return constant_form(group, dim, degree, np.zeros(shape, dtype=group.dtype))


@dataclass(frozen=True)
class VolumeData:
    """Metric plus one orientation sign per chart id (default ``+1``)."""

    metric: MetricField
    orientation: dict = field(default_factory=dict)

    def sign(self, chart_id) -> int:
        return self.orientation.get(chart_id, 1)


@dataclass(frozen=True)
class LocalConnectionForm:
    """Gauge potentials ``A_a`` on the charts of ``cocycle``.

    ``derivatives[a](x)`` (optional) returns ``dA[i, j] = d_i A_j`` exactly.
    """

    cocycle: Cocycle
    potentials: dict
    derivatives: dict = field(default_factory=dict)
    name: str = ""

    @property
    def group(self) -> LieGroupSpec:
        return self.cocycle.group

    @property
    def dim(self) -> int:
        return self.cocycle.cover.dim

    @property
    def charts(self):
        return tuple(self.potentials)

    def A(self, a, x) -> np.ndarray:
        return np.asarray(self.potentials[a](np.asarray(x, dtype=float)))

    def dA(self, a, x, fd_step=FORM_STEP) -> np.ndarray:
        if a in self.derivatives:
            return np.asarray(self.derivatives[a](np.asarray(x, dtype=float)))
        self.cocycle.cover.chart(a).require(x, fd_steps(x, fd_step))
        return partials(lambda y: self.A(a, y), x, fd_step)

    def chart_matrix(self, a, x, X) -> np.ndarray:
        """``A_a(X)`` acting on the fibre in the defining representation."""
        return np.tensordot(np.asarray(X, dtype=float), self.A(a, x), axes=(0, 0))

    def push(self, a, b, x, value):
        """Fibre vector or group element re-expressed from chart ``a`` to ``b``."""
        return self.cocycle(b, a, x) @ value

    def form(self, a) -> AlgebraValuedForm:
        return AlgebraValuedForm(1, self.dim, lambda y: self.A(a, y), self.group)


def curvature_form(w: LocalConnectionForm, a, x, fd_step=FORM_STEP) -> np.ndarray:
    """``F_ij = d_i A_j - d_j A_i + [A_i, A_j]`` at ``x`` in chart ``a``."""
    x = np.asarray(x, dtype=float)
    A = w.A(a, x)
    dA = w.dA(a, x, fd_step)
    return dA - np.swapaxes(dA, 0, 1) + forms.wedge_bracket(A, 1, A, 1) / 2.0


def curvature_field(w: LocalConnectionForm, a, fd_step=FORM_STEP) -> AlgebraValuedForm:
    return AlgebraValuedForm(2, w.dim, lambda y: curvature_form(w, a, y, fd_step), w.group)


def maurer_cartan(cocycle: Cocycle, a, b, x, fd_step=FORM_STEP):
    """``g_ab^-1 d g_ab`` as a 1-form (axis 0 = coordinate direction)."""
    g = cocycle(a, b, x)
    dg = cocycle.derivative(a, b, x)
    if dg is None:
        dg = partials(lambda y: cocycle(a, b, y), x, fd_step)
    ginv = np.linalg.inv(g)
    return np.array([ginv @ d for d in dg])


def overlap_residual(w: LocalConnectionForm, a, b, x, fd_step=FORM_STEP) -> float:
    """Norm of ``A_b - Ad(g_ab^-1) A_a - g_ab^-1 d g_ab`` at ``x``."""
    x = np.asarray(x, dtype=float)
    cover = w.cocycle.cover
    if not cover.overlap(a, b, x=x):
        raise PreconditionError(f"{x.tolist()} is not in the ({a}, {b}) overlap")
    g = w.cocycle(a, b, x)
    ginv = np.linalg.inv(g)
    expected = np.array([ginv @ Ai @ g for Ai in w.A(a, x)]) + maurer_cartan(w.cocycle, a, b, x, fd_step)
    return form_norm(w.group, w.A(b, x) - expected, 1)


def graded_bracket(a_val, k, b_val, l, dim=None):
    """Graded bracket of pointwise form values; ``k + l`` may not exceed the base dimension."""
    n = dim if dim is not None else (np.asarray(a_val).shape[0] if k else np.asarray(b_val).shape[0])
    if k + l > n:
        raise PreconditionError(f"degree {k + l} exceeds base dimension {n}")
    return forms.wedge_bracket(a_val, k, b_val, l)


def covariant_differential(w: LocalConnectionForm, a, tau: AlgebraValuedForm, x, fd_step=FORM_STEP):
    """``d^w tau = d tau + [A, tau]`` for a horizontal equivariant form in chart ``a``."""
    x = np.asarray(x, dtype=float)
    w.cocycle.cover.chart(a).require(x, fd_steps(x, fd_step))
    k = tau.degree
    d_tau = forms.exterior_derivative(tau, x, k, fd_step)
    return d_tau + forms.wedge_bracket(w.A(a, x), 1, tau(x), k)


def covariant_differential_field(w, a, tau, fd_step=FORM_STEP) -> AlgebraValuedForm:
    return AlgebraValuedForm(
        tau.degree + 1, tau.dim, lambda y: covariant_differential(w, a, tau, y, fd_step), tau.group
    )


def bianchi_residual(w: LocalConnectionForm, a, x, fd_step=FORM_STEP, curvature_step=None) -> float:
    """Invariant norm of ``d^w F`` at ``x`` (identically zero in exact arithmetic)."""
    F = curvature_field(w, a, curvature_step or fd_step)
    return form_norm(w.group, covariant_differential(w, a, F, x, fd_step), 3)


def hodge_star(v: VolumeData, value, k, x, chart_id=None) -> np.ndarray:
    """Componentwise Hodge star of an algebra-valued k-form value at ``x``."""
    g = v.metric.checked(x)
    return forms.hodge_star(g, value, k, v.sign(chart_id))


def hodge_field(v: VolumeData, tau: AlgebraValuedForm, chart_id=None) -> AlgebraValuedForm:
    return AlgebraValuedForm(
        tau.dim - tau.degree, tau.dim, lambda y: hodge_star(v, tau(y), tau.degree, y, chart_id), tau.group
    )


def covariant_codifferential(v: VolumeData, w: LocalConnectionForm, a, tau: AlgebraValuedForm, x,
                             fd_step=FORM_STEP) -> np.ndarray:
    """``delta^w = sign(g) (-1)^{nk+n+1} * d^w *`` on a k-form, ``k >= 1``."""
    k = tau.degree
    if k < 1:
        raise PreconditionError("the codifferential needs a form of degree >= 1")
    n = tau.dim
    star_tau = hodge_field(v, tau, a)
    dstar = covariant_differential(w, a, star_tau, x, fd_step)
    sign = forms.codifferential_sign(n, k, v.metric.sign)
    return sign * hodge_star(v, dstar, n - k + 1, x, a)


def covariant_codifferential_field(v, w, a, tau, fd_step=FORM_STEP) -> AlgebraValuedForm:
    return AlgebraValuedForm(
        tau.degree - 1, tau.dim, lambda y: covariant_codifferential(v, w, a, tau, y, fd_step), tau.group
    )


# ---------------------------------------------------------------------------
# gauge transformations of connections

def gauge_transform(w: LocalConnectionForm, t: GaugeTransformation, fd_step=FORM_STEP) -> LocalConnectionForm:
    """Connection pulled back by a gauge transformation: ``A' = Ad(tau^-1) A + tau^-1 d tau``."""
    if t.cocycle is not w.cocycle:
        raise PreconditionError("gauge transformation and connection use different cocycles")

    def make(a):
        def A_new(x):
            tau = t.tau(a, x)
            tinv = np.linalg.inv(tau)
            dtau = t.dtau(a, x, fd_step)
            return np.array([tinv @ Ai @ tau + tinv @ di for Ai, di in zip(w.A(a, x), dtau)])
        return A_new

    return LocalConnectionForm(w.cocycle, {a: make(a) for a in w.potentials}, name=f"{w.name}^tau")


def smooth_gauge(cocycle: Cocycle, rng, amplitude=0.7, width=1.5, center=None) -> GaugeTransformation:
    """Random smooth gauge field ``tau = exp(Y(x))`` on a single-chart cocycle.

    ``Y`` is a Gaussian bump times random plane waves; derivatives are exact.
    """
    if len(cocycle.cover.ids) != 1:
        raise PreconditionError("smooth_gauge builds fields on single-chart cocycles only")
    group = cocycle.group
    n = cocycle.cover.dim
    chart = cocycle.cover.ids[0]
    c0 = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    waves = rng.standard_normal((group.dim, n))
    phases = rng.uniform(0, 2 * np.pi, group.dim)
    coef = amplitude * rng.standard_normal(group.dim)

    def Y_and_dY(x):
        r = x - c0
        bump = np.exp(-(r @ r) / width**2)
        dbump = -2 * r / width**2 * bump
        Y = np.zeros((group.n, group.n), dtype=group.dtype)
        dY = np.zeros((n, group.n, group.n), dtype=group.dtype)
        for e, kv, p, c in zip(group.basis, waves, phases, coef):
            s = np.sin(kv @ x + p)
            ds = np.cos(kv @ x + p) * kv
            Y = Y + c * bump * s * e
            dY = dY + c * np.multiply.outer(dbump * s + bump * ds, e)
        return Y, dY

    def tau(x):
        return exp(Y_and_dY(x)[0])

    def dtau(x):
        Y, dY = Y_and_dY(x)
        return np.array([exp_derivative(Y, d) for d in dY])

    return GaugeTransformation(cocycle, {chart: tau}, {chart: dtau})


# ---------------------------------------------------------------------------
# connection catalog

def single_chart_cocycle(group: LieGroupSpec, chart: Chart) -> Cocycle:
    return trivial_cocycle(Cover((chart,), chart), group)


def zero_connection(group="SU2", dim=4, chart=None) -> LocalConnectionForm:
    group = group if isinstance(group, LieGroupSpec) else group_from_name(group)
    chart = chart or box("R", dim)
    zero = np.zeros((dim, group.n, group.n), dtype=group.dtype)
    dzero = np.zeros((dim, dim, group.n, group.n), dtype=group.dtype)
    return LocalConnectionForm(
        single_chart_cocycle(group, chart), {chart.id: lambda x: zero}, {chart.id: lambda x: dzero}, "zero"
    )


def _monopole_potentials(k):
    half = 0.5 * k

    def A_N(x):
        out = np.zeros((2, 1, 1), dtype=complex)
        out[1, 0, 0] = -1j * half * (1 - np.cos(x[0]))
        return out

    def A_S(x):
        out = np.zeros((2, 1, 1), dtype=complex)
        out[1, 0, 0] = 1j * half * (1 + np.cos(x[0]))
        return out

    def dA_N(x):
        out = np.zeros((2, 2, 1, 1), dtype=complex)
        out[0, 1, 0, 0] = -1j * half * np.sin(x[0])
        return out

    def dA_S(x):
        out = np.zeros((2, 2, 1, 1), dtype=complex)
        out[0, 1, 0, 0] = -1j * half * np.sin(x[0])
        return out

    return {"N": A_N, "S": A_S}, {"N": dA_N, "S": dA_S}


def monopole_connection(k=1) -> LocalConnectionForm:
    """U(1) monopole: ``A_N = -i k/2 (1 - cos t) dphi``, ``A_S = i k/2 (1 + cos t) dphi``."""
    cocycle = build_monopole_bundle(k)
    pots, ders = _monopole_potentials(int(round(k)))
    return LocalConnectionForm(cocycle, pots, ders, f"monopole({k})")


def monopole_chart_connection(k=1, chart="N") -> LocalConnectionForm:
    """One hemisphere potential of the monopole as a single-chart connection."""
    full = monopole_connection(k)
    c = full.cocycle.cover.chart(chart)
    pots, ders = _monopole_potentials(int(round(k)))
    return LocalConnectionForm(
        single_chart_cocycle(U1(), c), {chart: pots[chart]}, {chart: ders[chart]}, f"monopole_{chart}({k})"
    )


def _as_algebra(group, value):
    value = np.asarray(value)
    if value.ndim == 1:
        return group.from_coords(value)
    return value.astype(group.dtype)


def constant_connection(group, dim, components, chart=None, name="constant") -> LocalConnectionForm:
    chart = chart or box("R", dim)
    A = np.zeros((dim, group.n, group.n), dtype=group.dtype)
    for axis, val in components.items():
        A[axis] = _as_algebra(group, val)
    dzero = np.zeros((dim, dim, group.n, group.n), dtype=group.dtype)
    return LocalConnectionForm(
        single_chart_cocycle(group, chart), {chart.id: lambda x: A}, {chart.id: lambda x: dzero}, name
    )


def constant_su2(a=(1.0, 0.0, 0.0), b=(0.0, 1.0, 0.0), dim=4, axes=(0, 1)) -> LocalConnectionForm:
    """Constant su(2) connection with ``A_{axes[0]} = a``, ``A_{axes[1]} = b``."""
    G = SU2()
    return constant_connection(G, dim, {axes[0]: a, axes[1]: b}, name="constant_su2")


POLY_SEED = 20240611


def poly_su2_r4(scale=0.4) -> LocalConnectionForm:
    """Fixed quadratic su(2) connection on R^4 with exact derivatives.

    ``A_mu^a(x) = c_{mu a} + L_{mu a nu} x^nu + 1/2 x^T Q_{mu a} x``, coefficients
    drawn once from a fixed seed.
    """
    G = SU2()
    rng = np.random.default_rng(POLY_SEED)
    c = scale * rng.standard_normal((4, 3))
    L = scale * rng.standard_normal((4, 3, 4))
    Q = scale * rng.standard_normal((4, 3, 4, 4))
    Q = 0.5 * (Q + np.swapaxes(Q, 2, 3))
    basis = np.array(G.basis)
    chart = box("R", 4)

    def A(x):
        coef = c + L @ x + 0.5 * np.einsum("maij,i,j->ma", Q, x, x)
        return np.einsum("ma,apq->mpq", coef, basis)

    def dA(x):
        dcoef = L + np.einsum("maij,j->mai", Q, x)  # [mu, a, nu]
        return np.einsum("man,apq->nmpq", dcoef, basis)

    return LocalConnectionForm(single_chart_cocycle(G, chart), {"R": A}, {"R": dA}, "poly_su2_r4")


def coulomb_u1(q=1.0, core=0.0) -> LocalConnectionForm:
    """``A = -i (q / r) dt`` on Minkowski space with the time axis removed."""
    chart = Chart("R1,3*", (-np.inf,) * 4, (np.inf,) * 4, ("t", "x", "y", "z"))

    def A(x):
        r = np.linalg.norm(x[1:])
        out = np.zeros((4, 1, 1), dtype=complex)
        out[0, 0, 0] = -1j * q / r
        return out

    def dA(x):
        r = np.linalg.norm(x[1:])
        out = np.zeros((4, 4, 1, 1), dtype=complex)
        for i in range(1, 4):
            out[i, 0, 0, 0] = 1j * q * x[i] / r**3
        return out

    return LocalConnectionForm(single_chart_cocycle(U1(), chart), {chart.id: A}, {chart.id: dA}, f"coulomb_u1({q})")


def constant_B_u1(B=1.0, dim=2, axes=(0, 1)) -> LocalConnectionForm:
    """``A = -i B x dy`` with ``(x, y)`` the coordinates ``axes``: curvature ``F_xy = -i B``."""
    ix, iy = axes
    chart = box("R", dim)

    def A(x):
        out = np.zeros((dim, 1, 1), dtype=complex)
        out[iy, 0, 0] = -1j * B * x[ix]
        return out

    dA_const = np.zeros((dim, dim, 1, 1), dtype=complex)
    dA_const[ix, iy, 0, 0] = -1j * B

    return LocalConnectionForm(
        single_chart_cocycle(U1(), chart), {chart.id: A}, {chart.id: lambda x: dA_const}, f"constant_B_u1({B})"
    )


CONNECTIONS = {
    "zero": zero_connection,
    "monopole": monopole_connection,
    "monopole_N": lambda k=1: monopole_chart_connection(k, "N"),
    "monopole_S": lambda k=1: monopole_chart_connection(k, "S"),
    "constant_su2": constant_su2,
    "poly_su2_r4": poly_su2_r4,
    "coulomb_u1": coulomb_u1,
    "constant_B_u1": constant_B_u1,
}


def connection(name: str, **params) -> LocalConnectionForm:
    """Look up a catalog connection by its exact name."""
    try:
        factory = CONNECTIONS[name]
    except KeyError:
        raise CatalogError(f"unknown connection {name!r}") from None
    return factory(**params)


def check_metric_compatible(v: VolumeData, w: LocalConnectionForm):
    if v.metric.dim != w.dim:
        raise NumericDomainError("metric and connection live on bases of different dimension")
