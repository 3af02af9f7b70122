"""Dense linear algebra with respect to arbitrary SPD inner products.

Every chain group carries a Gram matrix ``W``.  Operators that are
self-adjoint for ``W`` are moved to orthonormal coordinates through the
Cholesky factor ``W = L L^T``, where they become ordinary symmetric
matrices ``L^T M L^{-T}``.  That keeps a single symmetric eigensolver
behind every spectrum in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg as sla

from .errors import InputError, NotPositiveDefiniteError, NotSymmetricError

SYM_TOL = 1e-10


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds.

    ``rank_tol`` is relative to the largest singular value (floored at 1 so
    that matrices made of round-off count as zero).  ``eig_tol`` is relative
    to ``max(1, lambda_max)``.
    """

    rank_tol: float = 1e-10
    eig_tol: float = 1e-9

    def __post_init__(self):
        if not (self.rank_tol > 0 and self.eig_tol > 0):
            raise InputError("tolerances must be strictly positive")

    def rank_threshold(self, sigma_max: float) -> float:
        return self.rank_tol * max(1.0, sigma_max)

    def eig_threshold(self, lam_max: float) -> float:
        return self.eig_tol * max(1.0, lam_max)


DEFAULT_TOL = Tolerance()


def as_matrix(a, shape=None) -> np.ndarray:
    m = np.array(a, dtype=float)
    if m.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got ndim={m.ndim}")
    if shape is not None and m.shape != tuple(shape):
        raise InputError(f"expected shape {tuple(shape)}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return m


def is_symmetric(s: np.ndarray, tol: float = SYM_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(s)))) if s.size else 1.0
    return s.shape[0] == s.shape[1] and bool(np.all(np.abs(s - s.T) <= tol * scale))


class InnerProduct:
    """An SPD Gram matrix with a lazily computed Cholesky factor."""

    def __init__(self, gram):
        g = as_matrix(gram)
        if g.shape[0] != g.shape[1]:
            raise InputError(f"Gram matrix must be square, got {g.shape}")
        if not is_symmetric(g):
            raise NotSymmetricError("Gram matrix is not symmetric")
        self.gram = (g + g.T) / 2
        self.gram.setflags(write=False)
        # fail early on indefinite input
        _ = self.cholesky

    @classmethod
    def identity(cls, n: int) -> "InnerProduct":
        return cls(np.eye(n))

    @classmethod
    def diagonal(cls, weights) -> "InnerProduct":
        w = np.asarray(weights, dtype=float).reshape(-1)
        return cls(np.diag(w))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @cached_property
    def cholesky(self) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((0, 0))
        try:
            return np.linalg.cholesky(self.gram)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError("Gram matrix is not positive definite") from exc

    def is_diagonal(self) -> bool:
        return bool(np.all(self.gram == np.diag(np.diag(self.gram))))

    def solve(self, b: np.ndarray) -> np.ndarray:
        """``W^{-1} b`` through the Cholesky factor."""
        if self.dim == 0:
            return np.zeros_like(b, dtype=float)
        return sla.cho_solve((self.cholesky, True), b)

    def inner(self, u, v) -> float:
        return float(np.asarray(u) @ self.gram @ np.asarray(v))

    def to_orthonormal(self, m: np.ndarray) -> np.ndarray:
        """Coordinates ``L^T m L^{-T}`` of an operator in a W-orthonormal basis."""
        if self.dim == 0:
            return np.zeros((0, 0))
        lt = self.cholesky.T
        # (L^T m) L^{-T} = solve(L, (L^T m)^T)^T
        left = lt @ m
        return sla.solve_triangular(self.cholesky, left.T, lower=True).T

    def from_orthonormal_vectors(self, y: np.ndarray) -> np.ndarray:
        """Map coefficient vectors ``y`` (orthonormal frame) back: ``x = L^{-T} y``."""
        if self.dim == 0:
            return np.zeros((0, y.shape[1] if y.ndim == 2 else 0))
        return sla.solve_triangular(self.cholesky.T, y, lower=False)

    def principal(self, idx) -> "InnerProduct":
        idx = np.asarray(idx, dtype=int)
        return InnerProduct(self.gram[np.ix_(idx, idx)])

    def __repr__(self):
        return f"InnerProduct(dim={self.dim})"


def _check_gram(w: InnerProduct, n: int, what: str):
    if w.dim != n:
        raise InputError(f"{what} inner product has dimension {w.dim}, expected {n}")


def weighted_adjoint(a, w_dom: InnerProduct, w_cod: InnerProduct) -> np.ndarray:
    """Adjoint of ``a: dom -> cod``, i.e. ``W_dom^{-1} a^T W_cod``."""
    a = as_matrix(a)
    _check_gram(w_dom, a.shape[1], "domain")
    _check_gram(w_cod, a.shape[0], "codomain")
    return w_dom.solve(a.T @ w_cod.gram)


def symmetric_eigenvalues(s, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending, with multiplicity."""
    s = as_matrix(s)
    if s.shape[0] != s.shape[1]:
        raise InputError(f"eigenvalues need a square matrix, got {s.shape}")
    if not is_symmetric(s):
        raise NotSymmetricError("matrix is not symmetric within tolerance")
    if s.size == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh((s + s.T) / 2)


def cluster_eigenvalues(values, tol: Tolerance = DEFAULT_TOL) -> list[tuple[float, int]]:
    """Group sorted eigenvalues whose consecutive gaps are within ``eig_tol``.

    Returns ``(mean value, multiplicity)`` pairs.
    """
    vals = np.sort(np.asarray(values, dtype=float))
    if vals.size == 0:
        return []
    thr = tol.eig_threshold(float(np.max(np.abs(vals))))
    groups = [[vals[0]]]
    for v in vals[1:]:
        if v - groups[-1][-1] <= thr:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [(float(np.mean(g)), len(g)) for g in groups]


def _fix_signs(b: np.ndarray) -> np.ndarray:
    """Flip columns so the first clearly nonzero entry is positive."""
    for j in range(b.shape[1]):
        col = b[:, j]
        big = np.flatnonzero(np.abs(col) > 1e-8 * max(1.0, float(np.max(np.abs(col)))))
        if big.size and col[big[0]] < 0:
            b[:, j] = -col
    return b


def matrix_rank(a, tol: Tolerance = DEFAULT_TOL) -> int:
    a = as_matrix(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > tol.rank_threshold(float(s[0]))))


def orthonormal_basis(span, w: InnerProduct | None = None, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """W-orthonormal basis ``B`` of the column space of ``span`` (``B^T W B = I``)."""
    span = as_matrix(span)
    n = span.shape[0]
    w = w or InnerProduct.identity(n)
    _check_gram(w, n, "ambient")
    if span.size == 0 or n == 0:
        return np.zeros((n, 0))
    transformed = w.cholesky.T @ span  # coordinates in an orthonormal frame
    u, s, _ = np.linalg.svd(transformed, full_matrices=False)
    r = int(np.sum(s > tol.rank_threshold(float(s[0]))))
    return _fix_signs(w.from_orthonormal_vectors(u[:, :r]))


def nullspace_basis(a, w_dom: InnerProduct | None = None, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """W-orthonormal basis of ``ker a``; its column count is ``cols - rank(a)``."""
    a = as_matrix(a)
    n = a.shape[1]
    w_dom = w_dom or InnerProduct.identity(n)
    _check_gram(w_dom, n, "domain")
    if n == 0:
        return np.zeros((0, 0))
    if a.shape[0] == 0:
        return _fix_signs(w_dom.from_orthonormal_vectors(np.eye(n)))
    # a x = (a L^{-T}) y with y = L^T x orthonormal coordinates
    a_t = sla.solve_triangular(w_dom.cholesky, a.T, lower=True).T
    _, s, vt = np.linalg.svd(a_t, full_matrices=True)
    r = int(np.sum(s > tol.rank_threshold(float(s[0]) if s.size else 0.0)))
    return _fix_signs(w_dom.from_orthonormal_vectors(vt[r:].T))


def subspace_intersection_dim(a, b, tol: Tolerance = DEFAULT_TOL) -> int:
    """``dim(col a ∩ col b) = rank a + rank b - rank [a | b]``."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[0] != b.shape[0]:
        raise InputError(f"row counts differ: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[1] == 0 or b.shape[1] == 0:
        return 0
    return matrix_rank(a, tol) + matrix_rank(b, tol) - matrix_rank(np.hstack([a, b]), tol)
