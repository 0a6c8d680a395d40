"""Pointwise exterior calculus on coordinate patches.

A k-form value at a point is a full, antisymmetric array whose first ``k``
axes are coordinate indices; any trailing axes (e.g. an ``N x N`` Lie algebra
matrix) are carried along untouched, so the same routines serve scalar and
Lie-algebra-valued forms.  Antisymmetry is exact: every constructor goes
through :func:`antisymmetrize`.

Hodge star: ``a ^ *b = <a, b> mu`` with ``mu = o sqrt|det g| dx^0 ^ ... ^ dx^{n-1}``
and orientation sign ``o``.  In components

    (*a)_J = o sqrt|g| / k!  a^I eps_{IJ}.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations
from math import comb, factorial

import numpy as np

from ._fd import partials


def _perm_sign(p):
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def _signed_perms(k):
    return tuple((p, _perm_sign(p)) for p in permutations(range(k)))


def antisymmetrize(T, k):
    """Average of ``sign(s) T`` over permutations ``s`` of the first ``k`` axes."""
    T = np.asarray(T)
    if k <= 1:
        return T.copy()
    rest = tuple(range(k, T.ndim))
    out = np.zeros_like(T)
    for p, s in _signed_perms(k):
        out = out + s * np.transpose(T, p + rest)
    return out / factorial(k)


@lru_cache(maxsize=None)
def levi_civita(n):
    eps = np.zeros((n,) * n)
    for p, s in _signed_perms(n):
        eps[p] = s
    eps.setflags(write=False)
    return eps


def exterior_derivative(field, x, k, fd_step):
    """``d`` of a k-form field at ``x``; ``(dt)_{i0..ik} = sum_j (-1)^j d_{ij} t_{..^ij..}``."""
    D = partials(field, x, fd_step)
    return (k + 1) * antisymmetrize(D, k + 1)


def wedge_bracket(a, k, b, l):
    """Graded bracket of Lie-algebra-valued forms (matrix commutator of coefficients).

    ``[a, b]_{I J} = (k+l)! / (k! l!) Alt([a_I, b_J])``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.shape[0] if k > 0 else (b.shape[0] if l > 0 else 0)
    N = a.shape[-1]
    ae = a.reshape((n,) * k + (1,) * l + (N, N))
    be = b.reshape((1,) * k + (n,) * l + (N, N))
    T = ae @ be - be @ ae
    T = np.broadcast_to(T, (n,) * (k + l) + (N, N))
    return comb(k + l, k) * antisymmetrize(T, k + l)


def wedge(a, k, b, l):
    """Wedge product of scalar forms."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    T = np.multiply.outer(a, b)
    return comb(k + l, k) * antisymmetrize(T, k + l)


def raise_indices(a, k, ginv):
    out = np.asarray(a)
    for axis in range(k):
        out = np.moveaxis(np.tensordot(ginv, out, axes=([1], [axis])), 0, axis)
    return out


def hodge_star(g, a, k, orientation=1):
    """Hodge star of a k-form value ``a`` for the metric matrix ``g``."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    ginv = np.linalg.inv(g)
    vol = orientation * np.sqrt(abs(np.linalg.det(g)))
    up = raise_indices(a, k, ginv)
    eps = levi_civita(n)
    trailing = np.asarray(a).ndim - k
    if k == 0:
        out = np.multiply.outer(eps, up)
    else:
        out = np.tensordot(up, eps, axes=(list(range(k)), list(range(k))))
        out = np.moveaxis(out, list(range(trailing)), list(range(out.ndim - trailing, out.ndim)))
    return vol / factorial(k) * out


def star_sign(n, k, metric_sign):
    """``**`` on k-forms equals this sign."""
    return metric_sign * (-1) ** (k * (n - k))


def codifferential_sign(n, k, metric_sign):
    """Prefactor ``sign(g) (-1)^{nk+n+1}`` of ``delta = +- * d *`` on k-forms."""
    return metric_sign * (-1) ** (n * k + n + 1)


def form_inner(a, b, k, ginv, algebra_inner=None):
    """Pointwise ``<a, b> = sum_{I increasing} k(a_I, b^I)``."""
    up = raise_indices(b, k, ginv)
    a = np.asarray(a)
    if algebra_inner is None:
        return float(np.sum(a * up) / factorial(k))
    total = 0.0
    n = a.shape[0] if k else 0
    for idx in combinations(range(n), k) if k else [()]:
        total += algebra_inner(a[idx], up[idx])
    # increasing multi-indices already account for the 1/k!
    return float(total)


def component_norm(a, k, algebra_inner=None):
    """Coordinate norm ``sqrt(sum_{I increasing} |a_I|^2)`` (invariant inner on values)."""
    a = np.asarray(a)
    n = a.shape[0] if k else 0
    total = 0.0
    for idx in combinations(range(n), k) if k else [()]:
        v = a[idx]
        if algebra_inner is None:
            total += float(np.sum(np.abs(v) ** 2))
        else:
            total += algebra_inner(v, v)
    return float(np.sqrt(max(total, 0.0)))


def codifferential(metric, field, x, k, fd_step, orientation=1):
    """Scalar codifferential ``delta = sign(g)(-1)^{nk+n+1} * d *`` of a k-form field."""
    n = metric.dim

    def star_field(y):
        return hodge_star(metric(y), field(y), k, orientation)

    dstar = exterior_derivative(star_field, x, n - k, fd_step)
    return codifferential_sign(n, k, metric.sign) * hodge_star(metric(x), dstar, n - k + 1, orientation)
