"""Chain and persistent Laplacians, their spectra, and Hodge-type checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .complexes import ChainComplexRep, InclusionRep, check_inclusion
from .errors import InvariantError, NumericalError
from .linalg import (DEFAULT_TOL, InnerProduct, Tolerance, nullspace_basis,
                     orthonormal_basis, subspace_intersection_dim,
                     symmetric_eigenvalues, weighted_adjoint)

SELF_ADJOINT_TOL = 1e-9
INF = math.inf


@dataclass
class LaplacianRep:
    """Operator on ``C_k`` in the chain basis, together with that basis' Gram."""

    op: np.ndarray
    gram: InnerProduct
    kind: str
    degree: int

    @property
    def dim(self) -> int:
        return self.op.shape[0]

    def symmetric(self) -> np.ndarray:
        """The operator in W-orthonormal coordinates."""
        s = self.gram.to_orthonormal(self.op)
        return (s + s.T) / 2

    def check_self_adjoint(self, tol: float = SELF_ADJOINT_TOL):
        w = self.gram.gram
        lhs = w @ self.op
        if lhs.size == 0:
            return
        err = np.max(np.abs(lhs - lhs.T))
        if err > tol * max(1.0, float(np.max(np.abs(lhs)))):
            raise InvariantError(f"{self.kind} Laplacian in degree {self.degree} "
                                 f"is not self-adjoint (error {err:.3e})")

    def __add__(self, other: "LaplacianRep") -> "LaplacianRep":
        return LaplacianRep(self.op + other.op, self.gram, "full", self.degree)


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    kernel_dim: int
    tol: Tolerance = field(default=DEFAULT_TOL, repr=False)

    def __len__(self):
        return len(self.eigenvalues)

    def lambda_q(self, q: int) -> float:
        return lambda_q(self, q)

    def nonzero(self) -> np.ndarray:
        return self.eigenvalues[self.kernel_dim:]


class Triple(NamedTuple):
    up: LaplacianRep
    down: LaplacianRep
    full: LaplacianRep


@dataclass
class PersistentPair:
    """``K ⊂ L`` with an isometric chain inclusion ``incl``."""

    K: ChainComplexRep
    L: ChainComplexRep
    incl: InclusionRep

    def __post_init__(self):
        check_inclusion(self.K, self.L, self.incl)

    @classmethod
    def trivial(cls, c: ChainComplexRep) -> "PersistentPair":
        return cls(c, c, InclusionRep({k: np.eye(c.dim(k)) for k in range(c.top + 1)}))

    def J(self, k: int) -> np.ndarray:
        return self.incl.map(k, self.L.dim(k), self.K.dim(k))


def up_laplacian(c: ChainComplexRep, k: int) -> LaplacianRep:
    d = c.boundary(k + 1)
    op = d @ weighted_adjoint(d, c.inner(k + 1), c.inner(k))
    lap = LaplacianRep(op, c.inner(k), "up", k)
    lap.check_self_adjoint()
    return lap


def down_laplacian(c: ChainComplexRep, k: int) -> LaplacianRep:
    d = c.boundary(k)
    op = weighted_adjoint(d, c.inner(k), c.inner(k - 1)) @ d
    lap = LaplacianRep(op, c.inner(k), "down", k)
    lap.check_self_adjoint()
    return lap


def full_laplacian(c: ChainComplexRep, k: int) -> LaplacianRep:
    return up_laplacian(c, k) + down_laplacian(c, k)


def _complement_projector(j: np.ndarray, w_small: InnerProduct, w_big: InnerProduct) -> np.ndarray:
    """``I - J (J^T W J)^{-1} J^T W``; with J isometric, ``J^T W J = W_small``."""
    n = w_big.dim
    if j.shape[1] == 0:
        return np.eye(n)
    return np.eye(n) - j @ w_small.solve(j.T @ w_big.gram)


def persistent_subspace(p: PersistentPair, k: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """W-orthonormal basis of ``{c in C^L_{k+1} : D^L_{k+1} c in J_k(C^K_k)}``."""
    d = p.L.boundary(k + 1)
    proj = _complement_projector(p.J(k), p.K.inner(k), p.L.inner(k))
    return nullspace_basis(proj @ d, p.L.inner(k + 1), tol)


def persistent_boundary(p: PersistentPair, k: int, z: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Matrix of ``D^L_{k+1}`` restricted to ``span z``, written in the K basis."""
    j = p.J(k)
    d = p.L.boundary(k + 1)
    if z.shape[1] == 0:
        return np.zeros((p.K.dim(k), 0))
    image = d @ z
    proj = _complement_projector(j, p.K.inner(k), p.L.inner(k))
    resid = proj @ image
    if resid.size and np.max(np.abs(resid)) > 1e3 * tol.rank_tol * max(1.0, float(np.max(np.abs(image)))):
        raise NumericalError(f"restricted boundary leaves the subcomplex (residual {np.max(np.abs(resid)):.3e})")
    if j.shape[1] == 0:
        return np.zeros((0, z.shape[1]))
    return p.K.inner(k).solve(j.T @ p.L.inner(k).gram @ image)


def persistent_laplacians(p: PersistentPair, k: int, tol: Tolerance = DEFAULT_TOL) -> Triple:
    z = persistent_subspace(p, k, tol)
    m = persistent_boundary(p, k, z, tol)
    w = p.K.inner(k)
    # z is orthonormal, so the adjoint of m is W_z^{-1} m^T W = m^T W
    up = LaplacianRep(m @ weighted_adjoint(m, InnerProduct.identity(m.shape[1]), w), w, "up", k)
    up.check_self_adjoint()
    down = down_laplacian(p.K, k)
    return Triple(up, down, up + down)


def schur_persistent_up(p: PersistentPair, k: int) -> LaplacianRep:
    """Up persistent Laplacian as a generalized Schur complement of ``Δ^L_{+,k}``.

    Needs a column-selection ``J_k`` and diagonal Grams.  Works in the
    symmetric ``W^{1/2}`` frame and eliminates the coordinates outside K with
    a pseudo-inverse.
    """
    j = p.J(k)
    w_l = p.L.inner(k)
    if not (w_l.is_diagonal() and p.L.inner(k + 1).is_diagonal()):
        raise NumericalError("Schur-complement route needs diagonal Grams")
    if not (np.all((j == 0) | (j == 1)) and np.all(j.sum(axis=0) == 1) and np.all(j.sum(axis=1) <= 1)):
        raise NumericalError("Schur-complement route needs a column-selection inclusion")
    up_l = up_laplacian(p.L, k)
    sym = up_l.symmetric()
    inside = np.argmax(j, axis=0) if j.shape[1] else np.zeros(0, dtype=int)
    outside = np.setdiff1d(np.arange(j.shape[0]), inside)
    a = sym[np.ix_(inside, inside)]
    b = sym[np.ix_(inside, outside)]
    c = sym[np.ix_(outside, outside)]
    schur = a - b @ np.linalg.pinv(c, rcond=1e-10, hermitian=True) @ b.T if outside.size else a
    w_k = p.K.inner(k)
    root = np.sqrt(np.diag(w_k.gram))
    op = (schur / root[:, None]) * root[None, :]
    return LaplacianRep(op, w_k, "up", k)


def spectrum(lap: LaplacianRep, tol: Tolerance = DEFAULT_TOL) -> Spectrum:
    lap.check_self_adjoint()
    vals = symmetric_eigenvalues(lap.symmetric(), tol)
    if vals.size == 0:
        return Spectrum(vals, 0, tol)
    thr = tol.eig_threshold(float(np.max(np.abs(vals))))
    if vals[0] < -thr:
        raise InvariantError(f"{lap.kind} Laplacian has negative eigenvalue {vals[0]:.3e}")
    zero = np.abs(vals) <= thr
    vals = np.where(zero, 0.0, vals)
    return Spectrum(np.sort(vals), int(np.sum(zero)), tol)


def lambda_q(s: Spectrum, q: int) -> float:
    """``q``-th smallest eigenvalue (1-based), infinite past the dimension."""
    if q < 1:
        raise ValueError("q starts at 1")
    return float(s.eigenvalues[q - 1]) if q <= len(s.eigenvalues) else INF


def persistent_betti(p: PersistentPair, k: int, tol: Tolerance = DEFAULT_TOL) -> int:
    """Rank of ``H_k(K) -> H_k(L)`` from boundary ranks alone."""
    cycles = nullspace_basis(p.K.boundary(k), p.K.inner(k), tol)
    z = cycles.shape[1]
    if z == 0:
        return 0
    pushed = p.J(k) @ cycles
    return z - subspace_intersection_dim(pushed, p.L.boundary(k + 1), tol)


@dataclass
class CheckReport:
    ok: bool
    details: dict

    def __bool__(self):
        return self.ok


def hodge_check(p: PersistentPair, k: int, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Kernel of the full persistent Laplacian against persistent Betti number.

    Also compares with ``dim(ker D^K_k ∩ ker (d^{K,L}_{k+1})^*)``.
    """
    lap = persistent_laplacians(p, k, tol)
    spec = spectrum(lap.full, tol)
    beta = persistent_betti(p, k, tol)
    w = p.K.inner(k)
    z = persistent_subspace(p, k, tol)
    m = persistent_boundary(p, k, z, tol)
    adj = weighted_adjoint(m, InnerProduct.identity(m.shape[1]), w)
    stacked = np.vstack([p.K.boundary(k), adj])
    joint = nullspace_basis(stacked, w, tol).shape[1]
    ok = spec.kernel_dim == beta == joint
    return CheckReport(ok, {"kernel_dim": spec.kernel_dim, "betti": beta, "joint_kernel_dim": joint})


def multiset_match(a, b, tol: Tolerance = DEFAULT_TOL) -> tuple[bool, float]:
    """Greedy sorted pairing; returns (match, largest paired gap)."""
    a, b = np.sort(np.asarray(a, float)), np.sort(np.asarray(b, float))
    if a.size != b.size:
        return False, INF
    if a.size == 0:
        return True, 0.0
    gap = float(np.max(np.abs(a - b)))
    thr = tol.eig_threshold(float(max(np.max(np.abs(a)), np.max(np.abs(b)))))
    return gap <= thr, gap


def splitting_check(target: PersistentPair | ChainComplexRep, k: int, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Nonzero spectrum of the full Laplacian = union of nonzero up and down spectra."""
    p = target if isinstance(target, PersistentPair) else PersistentPair.trivial(target)
    lap = persistent_laplacians(p, k, tol)
    full = spectrum(lap.full, tol).nonzero()
    union = np.concatenate([spectrum(lap.up, tol).nonzero(), spectrum(lap.down, tol).nonzero()])
    ok, gap = multiset_match(full, union, tol)
    return CheckReport(ok, {"full_nonzero": full.tolist(), "union_nonzero": np.sort(union).tolist(), "gap": gap})


def hodge_decomposition_check(c: ChainComplexRep, k: int, tol: Tolerance = DEFAULT_TOL,
                              orth_tol: float = 1e-9) -> CheckReport:
    """``C_k = im D_k^* ⊕ ker Δ_k ⊕ im D_{k+1}``, W-orthogonally."""
    w = c.inner(k)
    d_k = c.boundary(k)
    coimage = orthonormal_basis(weighted_adjoint(d_k, w, c.inner(k - 1)), w, tol)
    image = orthonormal_basis(c.boundary(k + 1), w, tol)
    lap = full_laplacian(c, k)
    harmonic = nullspace_basis(lap.op, w, tol)
    parts = {"coimage": coimage, "harmonic": harmonic, "image": image}
    worst = 0.0
    names = list(parts)
    for i in range(3):
        for j in range(i + 1, 3):
            a, b = parts[names[i]], parts[names[j]]
            if a.size and b.size:
                worst = max(worst, float(np.max(np.abs(a.T @ w.gram @ b))))
    dims = {n: v.shape[1] for n, v in parts.items()}
    total = sum(dims.values())
    ok = total == c.dim(k) and worst <= orth_tol
    return CheckReport(ok, {**dims, "total": total, "n": c.dim(k), "max_cross_inner": worst})
