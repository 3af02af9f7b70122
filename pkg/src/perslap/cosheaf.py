"""Cellular cosheaves over simplicial complexes and their chain complexes."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .complexes import (ChainComplexRep, Simplex, WeightedComplex, facets,
                        make_simplex)
from .errors import InputError, InvariantError
from .linalg import DEFAULT_TOL, InnerProduct, Tolerance, as_matrix, symmetric_eigenvalues

FUNCTOR_TOL = 1e-10


@dataclass
class Cosheaf:
    """Stalks on simplices and restriction maps ``F(sigma) -> F(tau)`` for facets.

    ``restriction[(tau, sigma)]`` has shape ``(dim F(tau), dim F(sigma))``.
    Missing maps between nonzero stalks are an error; maps into or out of a
    zero stalk may be omitted.
    """

    base: WeightedComplex
    stalk_dim: dict[Simplex, int]
    restriction: dict[tuple[Simplex, Simplex], np.ndarray]
    stalk_gram: dict[Simplex, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for s in self.base.all_simplices():
            n = self.stalk_dim.get(s)
            if n is None or n < 0:
                raise InputError(f"simplex {s} needs a nonnegative stalk dimension")
            if s in self.stalk_gram:
                self.stalk_gram[s] = as_matrix(self.stalk_gram[s], (n, n))
                InnerProduct(self.stalk_gram[s])
        fixed = {}
        for (tau, sigma), m in self.restriction.items():
            tau, sigma = make_simplex(tau), make_simplex(sigma)
            if sigma not in self.base or tau not in facets(sigma):
                raise InputError(f"restriction {tau} ⊂ {sigma} is not a facet incidence of the base")
            fixed[(tau, sigma)] = as_matrix(m, (self.stalk_dim[tau], self.stalk_dim[sigma]))
        self.restriction = fixed
        self.check_functorial()

    def map(self, tau: Simplex, sigma: Simplex) -> np.ndarray:
        m = self.restriction.get((tau, sigma))
        if m is not None:
            return m
        shape = (self.stalk_dim[tau], self.stalk_dim[sigma])
        if 0 in shape:
            return np.zeros(shape)
        raise InputError(f"missing restriction map {tau} ⊂ {sigma}")

    def gram(self, s: Simplex) -> np.ndarray:
        if s in self.stalk_gram:
            return self.stalk_gram[s]
        return np.eye(self.stalk_dim[s])

    def check_functorial(self, tol: float = FUNCTOR_TOL):
        """Both routes ``sigma -> tau_i -> rho`` across a codim-2 face must agree."""
        for k in range(2, self.base.top_degree + 1):
            for sigma in self.base.basis(k):
                for rho in combinations(sigma, k - 1):
                    mids = [tau for tau in facets(sigma) if set(rho) <= set(tau)]
                    routes = [self.map(rho, tau) @ self.map(tau, sigma) for tau in mids]
                    for other in routes[1:]:
                        if routes[0].size and np.max(np.abs(routes[0] - other)) > tol * max(
                                1.0, float(np.max(np.abs(routes[0])))):
                            raise InputError(f"cosheaf is not functorial on {rho} ⊂ {sigma}")

    def restrict(self, sub: WeightedComplex) -> "Cosheaf":
        """Pull back to a subcomplex of the base."""
        keep = set(sub.all_simplices())
        return Cosheaf(
            sub,
            {s: n for s, n in self.stalk_dim.items() if s in keep},
            {ts: m for ts, m in self.restriction.items() if ts[1] in keep},
            {s: g for s, g in self.stalk_gram.items() if s in keep},
        )


def constant_cosheaf(cx: WeightedComplex) -> Cosheaf:
    """The cosheaf with one-dimensional stalks and identity restrictions."""
    dims = {s: 1 for s in cx.all_simplices()}
    maps = {(tau, sigma): np.eye(1) for sigma in cx.all_simplices() for tau in facets(sigma)}
    return Cosheaf(cx, dims, maps)


def cosheaf_assemble(f: Cosheaf) -> ChainComplexRep:
    """Block boundary matrices over stalks, in the base complex's simplex order.

    Basis labels are ``(simplex, i)`` for the ``i``-th coordinate of a stalk.
    """
    cx = f.base
    top = cx.top_degree
    offsets, dims, labels, inners = [], [], [], []
    for k in range(top + 1):
        off, pos, lab = {}, 0, []
        blocks = []
        for s in cx.basis(k):
            off[s] = pos
            n = f.stalk_dim[s]
            lab.extend((s, i) for i in range(n))
            blocks.append(f.gram(s))
            pos += n
        offsets.append(off)
        dims.append(pos)
        labels.append(lab)
        gram = np.zeros((pos, pos))
        p = 0
        for b in blocks:
            gram[p:p + b.shape[0], p:p + b.shape[0]] = b
            p += b.shape[0]
        inners.append(InnerProduct(gram))
    bds = {}
    for k in range(1, top + 1):
        d = np.zeros((dims[k - 1], dims[k]))
        for sigma in cx.basis(k):
            c0, nc = offsets[k][sigma], f.stalk_dim[sigma]
            for ell, tau in enumerate(facets(sigma)):
                r0, nr = offsets[k - 1][tau], f.stalk_dim[tau]
                sign = -1.0 if ell % 2 else 1.0
                d[r0:r0 + nr, c0:c0 + nc] += sign * f.map(tau, sigma)
        bds[k] = d
    try:
        return ChainComplexRep(dims, bds, inners, labels)
    except InvariantError as exc:
        raise InputError(f"cosheaf boundary does not square to zero: {exc}") from exc


def psd_square_root(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Symmetric ``B`` with ``B^T B = A`` for symmetric PSD ``A``."""
    a = as_matrix(a)
    vals = symmetric_eigenvalues(a, tol)
    if vals.size and vals[0] < -tol.eig_threshold(float(np.max(np.abs(vals)))):
        raise InputError(f"matrix is not positive semi-definite (min eigenvalue {vals[0]:.3e})")
    lam, u = np.linalg.eigh((a + a.T) / 2)
    lam = np.clip(lam, 0.0, None)
    return (u * np.sqrt(lam)) @ u.T


def psd_realization(a, tol: Tolerance = DEFAULT_TOL) -> tuple[Cosheaf, Cosheaf, int]:
    """A cosheaf pair over the edge ``ab`` whose degree-1 persistent Laplacian is ``A``.

    Stalks: ``F(a) = 0``, ``F(b) = F(ab) = R^n``, restriction ``b ⊂ ab`` is
    the symmetric square root of ``A``.  Returns ``(F, G, k)`` with ``G = F``.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InputError("matrix must be square")
    b = psd_square_root(a, tol)
    base = WeightedComplex.from_simplices([("a",), ("b",), ("a", "b")])
    f = Cosheaf(base, {("a",): 0, ("b",): n, ("a", "b"): n}, {(("b",), ("a", "b")): b})
    return f, f, 1
