"""Matrix Lie groups and their Lie algebras.

Group and algebra elements are plain square numpy arrays. A :class:`LieGroupSpec`
carries everything that depends on the group: membership tests, the canonical
generators, the Ad-invariant inner product and drift repair.

Conventions
-----------
The invariant inner product is ``k(X, Y) = -c * Re tr(XY)`` with ``c`` chosen per
group so that the canonical generators below are orthonormal:

* ``U1``:  generator ``i``; ``c = 1`` so that ``k(i, i) = 1``.
* ``SU2``: generators ``e_a = i sigma_a / 2``; ``c = 2``.  With this choice
  ``[e_x, e_y] = -e_z`` (cyclic), i.e. the structure constants are ``-eps_abc``.
* ``SO3``: generators ``(L_a)_{jk} = -eps_{ajk}``; ``c = 1/2`` and
  ``[L_x, L_y] = +L_z``.
* ``GLn``: elementary matrices ``E_ij``; ``c = -1``, so ``k(X, Y) = tr(XY)``,
  which is Ad-invariant but indefinite.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import BranchError, NumericDomainError

GROUP_NAMES = ("U1", "SO3", "SU2", "GLn")

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@lru_cache(maxsize=None)
def _basis(name: str, n: int) -> tuple:
    if name == "U1":
        mats = [np.array([[1j]])]
    elif name == "SU2":
        mats = [0.5j * s for s in _PAULI]
    elif name == "SO3":
        mats = []
        for a in range(3):
            L = np.zeros((3, 3))
            for j in range(3):
                for k in range(3):
                    L[j, k] = -_levi_civita3(a, j, k)
            mats.append(L)
    elif name == "GLn":
        mats = []
        for i in range(n):
            for j in range(n):
                E = np.zeros((n, n))
                E[i, j] = 1.0
                mats.append(E)
    else:
        raise ValueError(f"unknown group {name!r}")
    for m in mats:
        m.setflags(write=False)
    return tuple(mats)


def _levi_civita3(i, j, k):
    return (i - j) * (j - k) * (k - i) / 2


@dataclass(frozen=True)
class LieGroupSpec:
    """A concrete matrix group: ``U1``, ``SO3``, ``SU2`` or ``GLn``."""

    name: str
    n: int
    field: str

    def __post_init__(self):
        if self.name not in GROUP_NAMES:
            raise ValueError(f"unknown group {self.name!r}")
        if self.field not in ("real", "complex"):
            raise ValueError("field must be 'real' or 'complex'")

    @property
    def dtype(self):
        return complex if self.field == "complex" else float

    @property
    def inner_scale(self) -> float:
        return {"U1": 1.0, "SU2": 2.0, "SO3": 0.5, "GLn": -1.0}[self.name]

    @property
    def compact(self) -> bool:
        return self.name != "GLn"

    @property
    def basis(self) -> tuple:
        """Canonical generators, orthonormal for :meth:`inner`."""
        return _basis(self.name, self.n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def identity(self) -> np.ndarray:
        return np.eye(self.n, dtype=self.dtype)

    def contains(self, g, tol: float = 1e-10) -> bool:
        g = np.asarray(g)
        if g.shape != (self.n, self.n) or not np.all(np.isfinite(g)):
            return False
        eye = np.eye(self.n)
        if self.name == "GLn":
            return bool(np.all(np.isreal(g))) and abs(np.linalg.det(g)) > tol
        if self.name == "SO3":
            return (
                np.max(np.abs(np.imag(g))) <= tol
                and np.max(np.abs(g.T @ g - eye)) <= tol
                and abs(np.linalg.det(g).real - 1.0) <= tol
            )
        unitary = np.max(np.abs(g.conj().T @ g - eye)) <= tol
        if self.name == "U1":
            return bool(unitary)
        return bool(unitary and abs(np.linalg.det(g) - 1.0) <= tol)

    def in_algebra(self, Z, tol: float = 1e-12) -> bool:
        Z = np.asarray(Z)
        if Z.shape != (self.n, self.n) or not np.all(np.isfinite(Z)):
            return False
        if self.name == "GLn":
            return bool(np.max(np.abs(np.imag(Z))) <= tol)
        if self.name == "SO3":
            return np.max(np.abs(np.imag(Z))) <= tol and np.max(np.abs(Z + Z.T)) <= tol
        skew = np.max(np.abs(Z + Z.conj().T)) <= tol
        if self.name == "U1":
            return bool(skew)
        return bool(skew and abs(np.trace(Z)) <= tol)

    def project_algebra(self, Z) -> np.ndarray:
        """Nearest algebra element (orthogonal projection of the matrix)."""
        Z = np.asarray(Z)
        if self.name == "GLn":
            return np.real(Z).astype(float)
        if self.name == "SO3":
            Zr = np.real(Z)
            return 0.5 * (Zr - Zr.T)
        A = 0.5 * (Z - Z.conj().T)
        if self.name == "SU2":
            A = A - np.trace(A) / self.n * np.eye(self.n)
        return A.astype(complex)

    def inner(self, Z1, Z2) -> float:
        return invariant_inner(self, Z1, Z2)

    def coords(self, Z) -> np.ndarray:
        """Components of ``Z`` in the canonical generator basis."""
        Z = np.asarray(Z)
        if self.name == "GLn":
            return np.real(Z).reshape(-1).astype(float)
        return np.array([self.inner(Z, e) for e in self.basis])

    def from_coords(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = np.zeros((self.n, self.n), dtype=self.dtype)
        for c, e in zip(v, self.basis):
            out = out + c * e
        return out

    def random_algebra(self, rng, scale: float = 1.0) -> np.ndarray:
        return self.from_coords(scale * rng.standard_normal(self.dim))

    def random_element(self, rng, scale: float = 1.0) -> np.ndarray:
        if self.name == "GLn":
            return np.eye(self.n) + 0.3 * scale * rng.standard_normal((self.n, self.n))
        return exp(self.random_algebra(rng, scale))

    def reproject(self, g) -> np.ndarray:
        return reproject(self, g)


def U1() -> LieGroupSpec:
    return LieGroupSpec("U1", 1, "complex")


def SU2() -> LieGroupSpec:
    return LieGroupSpec("SU2", 2, "complex")


def SO3() -> LieGroupSpec:
    return LieGroupSpec("SO3", 3, "real")


def GLn(n: int) -> LieGroupSpec:
    return LieGroupSpec("GLn", n, "real")


def group_from_name(name: str, n: int | None = None) -> LieGroupSpec:
    if name == "U1":
        return U1()
    if name == "SU2":
        return SU2()
    if name == "SO3":
        return SO3()
    if name == "GLn":
        if n is None:
            raise ValueError("GLn needs a matrix dimension")
        return GLn(n)
    raise ValueError(f"unknown group {name!r}")


def _check_finite(M):
    M = np.asarray(M)
    if not np.all(np.isfinite(M)):
        raise NumericDomainError("non-finite matrix entries")
    return M


def exp(Z) -> np.ndarray:
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    Z = _check_finite(Z)
    return scipy.linalg.expm(Z)


def exp_derivative(Z, dZ) -> np.ndarray:
    """Directional derivative ``d/dt exp(Z + t dZ)`` at ``t = 0``.

    Uses the block-triangular identity
    ``exp([[Z, dZ], [0, Z]]) = [[exp Z, D], [0, exp Z]]``.
    """
    Z = _check_finite(Z)
    dZ = _check_finite(dZ)
    n = Z.shape[0]
    dtype = np.result_type(Z, dZ)
    block = np.zeros((2 * n, 2 * n), dtype=dtype)
    block[:n, :n] = Z
    block[n:, n:] = Z
    block[:n, n:] = dZ
    return scipy.linalg.expm(block)[:n, n:]


def dexp_left(Z, dZ, terms: int = 40) -> np.ndarray:
    """Left-trivialised differential ``exp(-Z) d exp(Z)[dZ]``.

    Series ``sum_k (-1)^k ad_Z^k(dZ) / (k+1)!``.
    """
    out = np.zeros_like(np.asarray(dZ), dtype=np.result_type(Z, dZ))
    term = np.asarray(dZ, dtype=out.dtype)
    fact = 1.0
    for k in range(terms):
        fact *= k + 1
        out = out + ((-1) ** k / fact) * term
        term = Z @ term - term @ Z
        if not np.any(term):
            break
    return out


def log(g, group: LieGroupSpec | None = None) -> np.ndarray:
    """Principal matrix logarithm.

    Raises :class:`BranchError` when ``||g - I||_2 >= 1.9``.
    """
    g = _check_finite(g)
    n = g.shape[0]
    dist = np.linalg.norm(g - np.eye(n), 2)
    if dist >= 1.9:
        raise BranchError(f"||g - I|| = {dist:.3f} outside the principal branch")
    L = scipy.linalg.logm(g)
    if group is not None:
        return group.project_algebra(L)
    if np.isrealobj(g):
        L = np.real(L)
    return L


def bracket(X, Y) -> np.ndarray:
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape != Y.shape:
        raise ValueError(f"dimension mismatch {X.shape} vs {Y.shape}")
    return X @ Y - Y @ X


def Ad(g, Z) -> np.ndarray:
    """Adjoint action ``g Z g^-1``."""
    g = np.asarray(g)
    Z = np.asarray(Z)
    if g.shape != Z.shape:
        raise ValueError(f"dimension mismatch {g.shape} vs {Z.shape}")
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise NumericDomainError("singular group element") from exc
    return g @ Z @ ginv


def invariant_inner(group: LieGroupSpec, Z1, Z2) -> float:
    Z1 = np.asarray(Z1)
    Z2 = np.asarray(Z2)
    if Z1.shape != (group.n, group.n) or Z2.shape != (group.n, group.n):
        raise ValueError("dimension mismatch")
    return float(-group.inner_scale * np.real(np.trace(Z1 @ Z2)))


def reproject(group: LieGroupSpec, g) -> np.ndarray:
    """Nearest group element, via normalisation or polar decomposition."""
    g = _check_finite(g)
    if group.name == "U1":
        z = g[0, 0]
        if abs(z) < 1e-12:
            raise NumericDomainError("rank-deficient U(1) element")
        return np.array([[z / abs(z)]], dtype=complex)
    U, s, Vh = np.linalg.svd(g)
    if s[-1] <= 1e-12 * s[0]:
        raise NumericDomainError("rank-deficient matrix cannot be reprojected")
    if group.name == "GLn":
        return np.array(g, dtype=float)
    W = U @ Vh
    if group.name == "SO3":
        W = np.real(W)
        if np.linalg.det(W) < 0:
            raise NumericDomainError("matrix is closer to O(3) \\ SO(3)")
        return W
    phase = np.linalg.det(W)
    return W * phase ** (-1.0 / group.n)
