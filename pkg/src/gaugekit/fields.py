"""Maxwell and Yang-Mills field equations, stress-energy and the bundle scalar curvature.

Electromagnetic fields are real antisymmetric 4x4 arrays ``F_ab`` with
``F_0i = E_i`` and ``F_ij = -eps_ijk B_k``.  A U(1) connection gives the
field strength ``F = i * curvature``.  Yang-Mills quantities are evaluated on
chart-local curvature with the invariant inner product of the group.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import forms
from ._fd import partials
from .gauge import (
    FORM_STEP,
    AlgebraValuedForm,
    LocalConnectionForm,
    VolumeData,
    covariant_codifferential,
    curvature_field,
    curvature_form,
    form_norm,
)
from .dynamics import KKMetric
from .errors import PreconditionError
from .geometry import MetricField, levi_civita_christoffel, riemann_curvature
from .lie import LieGroupSpec

# Scalar curvature of each group with its bi-invariant metric in the chosen
# normalisation.  With an orthonormal basis, S = 1/4 sum_{a,b} |[e_a, e_b]|^2.
# su(2) with e_a = i sigma_a / 2 and k = -2 tr: [e_a, e_b] = -eps_abc e_c, so
# S = 1/4 * 6 = 3/2 (the round 3-sphere of radius 2).  so(3) with k = -tr/2
# is isometric to su(2) here, hence also 3/2.  U(1) is flat.
GROUP_SCALAR_CURVATURE = {"U1": 0.0, "SU2": 1.5, "SO3": 1.5}


def group_scalar_curvature(group: LieGroupSpec) -> float:
    """Scalar curvature of ``group`` from its structure constants (compact groups)."""
    if group.name in GROUP_SCALAR_CURVATURE:
        return GROUP_SCALAR_CURVATURE[group.name]
    if not group.compact:
        raise PreconditionError("scalar curvature needs a definite invariant inner product")
    total = 0.0
    for a in group.basis:
        for b in group.basis:
            c = a @ b - b @ a
            total += group.inner(c, c)
    return 0.25 * total


@dataclass(frozen=True)
class EMField:
    """Chart-local field strength ``x -> F_ab`` and current ``x -> j_a`` (or None)."""

    F: Callable
    j: Optional[Callable] = None

    def current(self, x):
        if self.j is None:
            return np.zeros(4)
        return np.asarray(self.j(np.asarray(x, dtype=float)), dtype=float)


def _as_field(v):
    if callable(v):
        return lambda x: np.asarray(v(np.asarray(x, dtype=float)), dtype=float)
    c = np.asarray(v, dtype=float)
    return lambda x: c


def maxwell_F_from_EB(E, B, j=None) -> EMField:
    """Field strength from observer electric and magnetic fields (constants or callables of ``x``)."""
    Ef, Bf = _as_field(E), _as_field(B)
    eps = forms.levi_civita(3)

    def F(x):
        e, b = Ef(x), Bf(x)
        out = np.zeros((4, 4))
        out[0, 1:] = e
        out[1:, 0] = -e
        out[1:, 1:] = -np.einsum("ijk,k->ij", eps, b)
        return out

    return EMField(F, j)


def coulomb_field(q=1.0) -> EMField:
    """Point charge at the spatial origin: ``E = q x / r^3``, ``B = 0``."""
    return maxwell_F_from_EB(lambda x: q * x[1:] / np.linalg.norm(x[1:]) ** 3, np.zeros(3))


def plane_wave_field(amplitude=1.0) -> EMField:
    """``E = (0, a cos(t - x), 0)``, ``B = (0, 0, a cos(t - x))``."""
    def E(x):
        return np.array([0.0, amplitude * np.cos(x[0] - x[1]), 0.0])

    def B(x):
        return np.array([0.0, 0.0, amplitude * np.cos(x[0] - x[1])])

    return maxwell_F_from_EB(E, B)


def maxwell_residuals(em: EMField, v: VolumeData, x, fd_step=1e-4):
    """``(|dF|, |delta F - j|)`` at ``x``."""
    x = np.asarray(x, dtype=float)
    v.metric.chart.require(x, 2 * fd_step * (1 + np.abs(x)))
    dF = forms.exterior_derivative(em.F, x, 2, fd_step)
    deltaF = forms.codifferential(v.metric, em.F, x, 2, fd_step, v.sign(v.metric.chart.id))
    return (forms.component_norm(dF, 3), forms.component_norm(deltaF - em.current(x), 1))


def em_stress_energy(em: EMField, g: MetricField, x) -> np.ndarray:
    """``T_ab = (F_ac F_b^c - 1/4 g_ab F_cd F^cd) / 4 pi``."""
    x = np.asarray(x, dtype=float)
    gx = g.checked(x)
    ginv = np.linalg.inv(gx)
    F = np.asarray(em.F(x), dtype=float)
    FF = F @ ginv @ F.T
    inv = float(np.sum((ginv @ F @ ginv) * F))
    T = (FF - 0.25 * gx * inv) / (4 * np.pi)
    return 0.5 * (T + T.T)


def stress_energy_trace(em: EMField, g: MetricField, x) -> float:
    return float(np.sum(np.linalg.inv(g(x)) * em_stress_energy(em, g, x)))


def stress_energy_divergence(em: EMField, g: MetricField, x, fd_step=1e-4) -> np.ndarray:
    """``nabla^a T_ab`` with the Levi-Civita connection of ``g``."""
    x = np.asarray(x, dtype=float)
    T = em_stress_energy(em, g, x)
    dT = partials(lambda y: em_stress_energy(em, g, y), x, fd_step)  # dT[c, a, b]
    G = levi_civita_christoffel(g, x)
    cov = dT - np.einsum("dca,db->cab", G, T) - np.einsum("dcb,ad->cab", G, T)
    return np.einsum("ca,cab->b", np.linalg.inv(g(x)), cov)


# ---------------------------------------------------------------------------
# Yang-Mills

def _deg1(value, group, dim):
    arr = np.asarray(value)
    if arr.shape != (dim, group.n, group.n):
        raise PreconditionError(f"current must be a ({dim}, {group.n}, {group.n}) array")
    return arr


def yang_mills_field(v: VolumeData, w: LocalConnectionForm, chart=None, fd_step=FORM_STEP) -> AlgebraValuedForm:
    """``x -> delta^w F`` as a 1-form field."""
    chart = w.charts[0] if chart is None else chart
    F = curvature_field(w, chart, fd_step)
    return AlgebraValuedForm(
        1, w.dim, lambda y: covariant_codifferential(v, w, chart, F, y, fd_step), w.group
    )


def yang_mills_residual(w: LocalConnectionForm, v: VolumeData, J, x, chart=None, fd_step=FORM_STEP) -> float:
    """Invariant norm of ``delta^w F - J`` at ``x``; ``J`` is a callable 1-form or None."""
    chart = w.charts[0] if chart is None else chart
    x = np.asarray(x, dtype=float)
    lhs = yang_mills_field(v, w, chart, fd_step)(x)
    Jx = np.zeros_like(lhs) if J is None else _deg1(J(x), w.group, w.dim)
    return form_norm(w.group, lhs - Jx, 1)


def brute_force_yang_mills_current(w: LocalConnectionForm, g: MetricField, x, chart=None, fd_step=FORM_STEP):
    """``J_j = -g^ik (d_k F_ij + [A_k, F_ij])`` by explicit index sums (flat metrics)."""
    chart = w.charts[0] if chart is None else chart
    x = np.asarray(x, dtype=float)
    ginv = np.linalg.inv(g(x))
    A = w.A(chart, x)
    F = curvature_form(w, chart, x, fd_step)
    dF = partials(lambda y: curvature_form(w, chart, y, fd_step), x, fd_step)
    n = w.dim
    J = np.zeros_like(A)
    for j in range(n):
        for i in range(n):
            for k in range(n):
                if ginv[i, k] == 0.0:
                    continue
                DF = dF[k, i, j] + A[k] @ F[i, j] - F[i, j] @ A[k]
                J[j] = J[j] - ginv[i, k] * DF
    return J


def charge_conservation_residual(w: LocalConnectionForm, v: VolumeData, J, x, chart=None,
                                 fd_step=FORM_STEP) -> float:
    """Invariant norm of ``delta^w J`` for a 1-form field ``J`` (callable or form)."""
    chart = w.charts[0] if chart is None else chart
    if not isinstance(J, AlgebraValuedForm):
        J = AlgebraValuedForm(1, w.dim, J, w.group)
    val = covariant_codifferential(v, w, chart, J, np.asarray(x, dtype=float), fd_step)
    return form_norm(w.group, val, 0)


def ym_action_density(w: LocalConnectionForm, v: VolumeData, x, chart=None, fd_step=FORM_STEP) -> float:
    """``-1/2 sum_{i<j} k(F_ij, F^ij)``, indices raised by the metric."""
    chart = w.charts[0] if chart is None else chart
    x = np.asarray(x, dtype=float)
    F = curvature_form(w, chart, x, fd_step)
    ginv = np.linalg.inv(v.metric.checked(x))
    return -0.5 * forms.form_inner(F, F, 2, ginv, w.group.inner)


# ---------------------------------------------------------------------------
# bundle scalar curvature

@dataclass(frozen=True)
class ScalarCurvatureSplit:
    S_h: float
    S_g: float
    coupling: float
    S_k: float
    gap: float

    def as_dict(self):
        return {"S_h": self.S_h, "S_g": self.S_g, "coupling": self.coupling, "S_k": self.S_k, "gap": self.gap}


def bundle_metric_field(g: MetricField, w: LocalConnectionForm, chart=None) -> MetricField:
    """Bundle metric on ``chart x (exponential coordinates)`` as a :class:`MetricField`."""
    from .geometry import Chart

    chart = w.charts[0] if chart is None else chart
    kk = KKMetric(g, w, chart)
    d = w.group.dim
    base = w.cocycle.cover.chart(chart)
    lower = tuple(max(a, b) for a, b in zip(base.lower, g.chart.lower)) + (-np.pi,) * d
    upper = tuple(min(a, b) for a, b in zip(base.upper, g.chart.upper)) + (np.pi,) * d
    ext = Chart(f"{chart}xG", lower, upper)
    p, q = g.signature
    return MetricField(ext, kk, (p + d, q), None, f"bundle({g.name},{w.name})")


def scalar_curvature_decomposition_check(g: MetricField, w: LocalConnectionForm, x, chart=None,
                                         fd_step=1e-3) -> ScalarCurvatureSplit:
    """Compare the bundle scalar curvature with ``S_g - 1/2 <F, F> + S_k``.

    ``S_h`` comes from nested central differences of the bundle metric at the
    identity fibre point; the other terms are evaluated directly.
    """
    chart = w.charts[0] if chart is None else chart
    x = np.asarray(x, dtype=float)
    h = bundle_metric_field(g, w, chart)
    z = np.concatenate([x, np.zeros(w.group.dim)])
    S_h = riemann_curvature(h, z, fd_step, analytic=False).scalar
    S_g = riemann_curvature(g, x).scalar
    F = curvature_form(w, chart, x)
    coupling = 0.5 * forms.form_inner(F, F, 2, np.linalg.inv(g(x)), w.group.inner)
    S_k = group_scalar_curvature(w.group)
    gap = abs(S_h - S_g + coupling - S_k)
    return ScalarCurvatureSplit(S_h, S_g, coupling, S_k, gap)


# ---------------------------------------------------------------------------
# reports

@dataclass
class ResidualReport:
    """Per-identity maximum residual, sample count and step."""

    entries: dict = field(default_factory=dict)

    def add(self, name, value, fd_step=None):
        value = float(abs(value))
        if name in self.entries:
            old, count, step = self.entries[name]
            self.entries[name] = (max(old, value), count + 1, step)
        else:
            self.entries[name] = (value, 1, fd_step)

    def merge(self, other: "ResidualReport"):
        for name, (val, count, step) in other.entries.items():
            if name in self.entries:
                old, c0, s0 = self.entries[name]
                self.entries[name] = (max(old, val), c0 + count, s0)
            else:
                self.entries[name] = (val, count, step)
        return self

    def max(self, name) -> float:
        return self.entries[name][0]

    def as_dict(self):
        return {
            name: {"max": val, "samples": count, "fd_step": step}
            for name, (val, count, step) in sorted(self.entries.items())
        }
