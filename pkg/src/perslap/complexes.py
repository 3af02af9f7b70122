"""Weighted simplicial complexes, sublevel filtrations and chain complexes.

Simplices are tuples of vertex ids in increasing order.  Within each degree
the basis order is lexicographic in the vertex tuple; every matrix in the
package is written against that order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import InputError, InvariantError
from .linalg import InnerProduct, as_matrix, matrix_rank

Simplex = tuple

CHAIN_TOL = 1e-12


def make_simplex(vertices: Iterable[Hashable]) -> Simplex:
    vs = tuple(vertices)
    if not vs:
        raise InputError("a simplex needs at least one vertex")
    if len(set(vs)) != len(vs):
        raise InputError(f"repeated vertex in simplex {vs}")
    try:
        return tuple(sorted(vs))
    except TypeError as exc:
        raise InputError(f"vertex ids in {vs} are not mutually comparable") from exc


def facets(sigma: Simplex) -> list[Simplex]:
    """Facets in the order of the removed vertex index."""
    if len(sigma) == 1:
        return []
    return [sigma[:i] + sigma[i + 1:] for i in range(len(sigma))]


def boundary_sign(sigma: Simplex, tau: Simplex) -> int:
    """Incidence number ``(-1)^l`` where ``tau`` omits the ``l``-th vertex of ``sigma``."""
    sigma, tau = make_simplex(sigma), make_simplex(tau)
    if len(tau) != len(sigma) - 1 or not set(tau) <= set(sigma):
        raise InputError(f"{tau} is not a facet of {sigma}")
    (missing,) = set(sigma) - set(tau)
    return -1 if sigma.index(missing) % 2 else 1


def closure(simplices: Iterable[Iterable[Hashable]]) -> set[Simplex]:
    """All faces of the given simplices."""
    out: set[Simplex] = set()
    for s in simplices:
        s = make_simplex(s)
        for r in range(1, len(s) + 1):
            out.update(combinations(s, r))
    return out


@dataclass
class WeightedComplex:
    """A finite simplicial complex with positive weights.

    ``grams`` optionally replaces the diagonal weight inner product of a
    degree by a full SPD matrix in the canonical basis order.
    """

    simplices: dict[int, list[Simplex]]
    weights: dict[Simplex, float]
    grams: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self._index = {k: {s: i for i, s in enumerate(ss)} for k, ss in self.simplices.items()}
        self.validate()

    @classmethod
    def from_simplices(cls, simplices, weights=None, grams=None) -> "WeightedComplex":
        """Build from an iterable of vertex lists.  Missing weights default to 1."""
        by_dim: dict[int, set] = {}
        for s in simplices:
            s = make_simplex(s)
            by_dim.setdefault(len(s) - 1, set()).add(s)
        sorted_dims = {k: sorted(v) for k, v in by_dim.items()}
        w = {}
        weights = weights or {}
        for ss in sorted_dims.values():
            for s in ss:
                w[s] = float(weights.get(s, 1.0))
        return cls(sorted_dims, w, dict(grams or {}))

    @classmethod
    def empty(cls) -> "WeightedComplex":
        return cls({}, {})

    def validate(self):
        for k, ss in self.simplices.items():
            if list(ss) != sorted(set(ss)):
                raise InputError(f"degree-{k} simplices must be sorted and duplicate-free")
            for s in ss:
                if len(s) != k + 1:
                    raise InputError(f"simplex {s} listed in degree {k}")
                for f in facets(s):
                    if f not in self._index.get(k - 1, {}):
                        raise InputError(f"complex is not closed: facet {f} of {s} missing")
                w = self.weights.get(s)
                if w is None or not (w > 0) or not np.isfinite(w):
                    raise InputError(f"simplex {s} needs a positive finite weight, got {w}")
        for k, g in self.grams.items():
            n = self.dim(k)
            g = as_matrix(g, (n, n))
            self.grams[k] = g
            InnerProduct(g)

    @property
    def top_degree(self) -> int:
        nonempty = [k for k, ss in self.simplices.items() if ss]
        return max(nonempty) if nonempty else -1

    def dim(self, k: int) -> int:
        return len(self.simplices.get(k, ()))

    def basis(self, k: int) -> list[Simplex]:
        return list(self.simplices.get(k, ()))

    def index(self, k: int) -> dict[Simplex, int]:
        return self._index.get(k, {})

    def all_simplices(self) -> list[Simplex]:
        return [s for k in sorted(self.simplices) for s in self.simplices[k]]

    def __contains__(self, s) -> bool:
        s = tuple(s)
        return s in self._index.get(len(s) - 1, {})

    def __len__(self):
        return sum(len(v) for v in self.simplices.values())

    def inner_product(self, k: int) -> InnerProduct:
        if k in self.grams:
            return InnerProduct(self.grams[k])
        return InnerProduct.diagonal([self.weights[s] for s in self.basis(k)])

    def subcomplex(self, keep: Iterable[Simplex]) -> "WeightedComplex":
        """Restriction to ``keep`` (must be face-closed); Grams become principal blocks."""
        keep = set(map(tuple, keep))
        sims = {}
        grams = {}
        for k, ss in self.simplices.items():
            kept = [s for s in ss if s in keep]
            if kept:
                sims[k] = kept
                if k in self.grams:
                    idx = [self._index[k][s] for s in kept]
                    grams[k] = self.grams[k][np.ix_(idx, idx)]
        return WeightedComplex(sims, {s: self.weights[s] for ss in sims.values() for s in ss}, grams)


def boundary_matrix(cx: WeightedComplex, k: int) -> np.ndarray:
    """``D_k`` with rows indexed by (k-1)-simplices and columns by k-simplices."""
    if k < 0:
        raise InputError("degree must be nonnegative")
    cols = cx.basis(k)
    rows = cx.index(k - 1) if k >= 1 else {}
    d = np.zeros((cx.dim(k - 1) if k >= 1 else 0, len(cols)))
    if k == 0:
        return d
    for j, sigma in enumerate(cols):
        for ell, tau in enumerate(facets(sigma)):
            d[rows[tau], j] = -1.0 if ell % 2 else 1.0
    return d


@dataclass
class ChainComplexRep:
    """Coordinates of a finite chain complex with inner products.

    ``boundaries[k]`` is ``D_k`` of shape ``(n_{k-1}, n_k)`` for
    ``1 <= k <= top``; degrees outside the stored range are zero spaces.
    ``labels[k]`` names the basis vectors so that inclusions can be matched.
    """

    dims: list[int]
    boundaries: dict[int, np.ndarray]
    inners: list[InnerProduct]
    labels: list[list] | None = None

    def __post_init__(self):
        self.dims = [int(n) for n in self.dims]
        for k, d in list(self.boundaries.items()):
            self.boundaries[k] = as_matrix(d, (self.dim(k - 1), self.dim(k)))
        if len(self.inners) != len(self.dims):
            raise InputError("need one inner product per degree")
        for k, w in enumerate(self.inners):
            if w.dim != self.dims[k]:
                raise InputError(f"degree-{k} inner product has dim {w.dim}, expected {self.dims[k]}")
        if self.labels is not None:
            for k, lab in enumerate(self.labels):
                if len(lab) != self.dims[k]:
                    raise InputError(f"degree-{k} labels do not match dimension")
        self.check_chain()

    @classmethod
    def from_matrices(cls, boundaries: Sequence, grams: Sequence | None = None, labels=None):
        """Build from ``[D_1, D_2, ...]``; dims are read off the shapes.

        The first matrix fixes ``n_0``; an empty list of matrices is not
        allowed here (use ``dims`` directly).
        """
        mats = [as_matrix(d) for d in boundaries]
        if not mats:
            raise InputError("need at least one boundary matrix")
        dims = [mats[0].shape[0]] + [d.shape[1] for d in mats]
        for k, d in enumerate(mats, start=1):
            if d.shape[0] != dims[k - 1]:
                raise InputError(f"D_{k} has {d.shape[0]} rows, expected {dims[k - 1]}")
        if grams is None:
            inners = [InnerProduct.identity(n) for n in dims]
        else:
            inners = [g if isinstance(g, InnerProduct) else InnerProduct(g) for g in grams]
        return cls(dims, {k: d for k, d in enumerate(mats, start=1)}, inners, labels)

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    def boundary(self, k: int) -> np.ndarray:
        if k in self.boundaries:
            return self.boundaries[k]
        return np.zeros((self.dim(k - 1), self.dim(k)))

    def inner(self, k: int) -> InnerProduct:
        if 0 <= k < len(self.inners):
            return self.inners[k]
        return InnerProduct.identity(0)

    def check_chain(self, tol: float = CHAIN_TOL):
        for k in range(2, self.top + 1):
            prod = self.boundary(k - 1) @ self.boundary(k)
            scale = max(1.0, float(np.max(np.abs(self.boundary(k - 1)), initial=0)) *
                        float(np.max(np.abs(self.boundary(k)), initial=0)))
            if prod.size and np.max(np.abs(prod)) > tol * scale:
                raise InvariantError(f"D_{k - 1} D_{k} != 0 (max {np.max(np.abs(prod)):.3e})")


def assemble(cx: WeightedComplex) -> ChainComplexRep:
    """Chain complex of ``cx`` with ``W_k = diag(weights)`` (or the supplied Gram)."""
    top = cx.top_degree
    dims = [cx.dim(k) for k in range(top + 1)]
    bds = {k: boundary_matrix(cx, k) for k in range(1, top + 1)}
    inners = [cx.inner_product(k) for k in range(top + 1)]
    labels = [cx.basis(k) for k in range(top + 1)]
    return ChainComplexRep(dims, bds, inners, labels)


@dataclass
class InclusionRep:
    """Per-degree matrices ``J_k`` embedding ``C^K_k`` into ``C^L_k``."""

    maps: dict[int, np.ndarray]

    def map(self, k: int, n_l: int = 0, n_k: int = 0) -> np.ndarray:
        if k in self.maps:
            return self.maps[k]
        return np.zeros((n_l, n_k))

    def compose(self, first: "InclusionRep") -> "InclusionRep":
        """``self ∘ first``."""
        keys = set(self.maps) & set(first.maps)
        return InclusionRep({k: self.maps[k] @ first.maps[k] for k in keys})


def check_inclusion(small: ChainComplexRep, big: ChainComplexRep, incl: InclusionRep,
                    tol: float = CHAIN_TOL):
    """Raise unless ``incl`` is an injective isometric chain map."""
    top = max(small.top, big.top)
    for k in range(top + 1):
        j = incl.map(k, big.dim(k), small.dim(k))
        if j.shape != (big.dim(k), small.dim(k)):
            raise InputError(f"J_{k} has shape {j.shape}, expected {(big.dim(k), small.dim(k))}")
        if j.size == 0:
            continue
        iso = j.T @ big.inner(k).gram @ j - small.inner(k).gram
        scale = max(1.0, float(np.max(np.abs(big.inner(k).gram))))
        if np.max(np.abs(iso)) > tol * scale:
            raise InvariantError(f"J_{k} is not an isometry")
        if matrix_rank(j) != small.dim(k):
            raise InvariantError(f"J_{k} is not injective")
    for k in range(1, top + 1):
        jk = incl.map(k, big.dim(k), small.dim(k))
        jk1 = incl.map(k - 1, big.dim(k - 1), small.dim(k - 1))
        lhs = jk1 @ small.boundary(k)
        rhs = big.boundary(k) @ jk
        if lhs.size and np.max(np.abs(lhs - rhs)) > tol * max(1.0, float(np.max(np.abs(rhs), initial=0))):
            raise InvariantError(f"J does not commute with D_{k}")


def inclusion(small: ChainComplexRep, big: ChainComplexRep) -> InclusionRep:
    """Column-selection inclusion matching basis labels of ``small`` inside ``big``."""
    if small.labels is None or big.labels is None:
        raise InputError("label-based inclusion needs labelled chain complexes")
    maps = {}
    for k in range(max(small.top, big.top) + 1):
        lab_small = small.labels[k] if k <= small.top else []
        lab_big = big.labels[k] if k <= big.top else []
        pos = {lab: i for i, lab in enumerate(lab_big)}
        j = np.zeros((len(lab_big), len(lab_small)))
        for c, lab in enumerate(lab_small):
            if lab not in pos:
                raise InputError(f"{lab!r} of the smaller complex is missing from the larger one")
            j[pos[lab], c] = 1.0
        maps[k] = j
    incl = InclusionRep(maps)
    try:
        check_inclusion(small, big, incl)
    except InvariantError as exc:
        raise InputError(f"not a subcomplex with compatible weights: {exc}") from exc
    return incl


def prefix_inclusion(small: ChainComplexRep, big: ChainComplexRep) -> InclusionRep:
    """Include each ``C^small_k`` as the first ``n_k`` coordinates of ``C^big_k``."""
    maps = {}
    for k in range(max(small.top, big.top) + 1):
        maps[k] = np.eye(big.dim(k), small.dim(k))
    incl = InclusionRep(maps)
    check_inclusion(small, big, incl)
    return incl


@dataclass
class Filtration:
    """A monotone birth function on a final complex.

    ``sublevel(t)`` is the literal set ``{birth <= t}``.  The filtration
    family used for persistence, ``at(t)``, is constant below the first
    critical value: simplices born at the minimum birth exist for all
    ``t``.
    """

    complex: WeightedComplex
    birth: dict[Simplex, float]

    def __post_init__(self):
        for s in self.complex.all_simplices():
            if s not in self.birth:
                raise InputError(f"simplex {s} has no birth value")
            if not np.isfinite(self.birth[s]):
                raise InputError(f"birth of {s} is not finite")
            for f in facets(s):
                if self.birth[f] > self.birth[s]:
                    raise InputError(f"birth of face {f} exceeds birth of {s}")

    def critical_values(self) -> np.ndarray:
        return np.unique(np.array(list(self.birth.values()), dtype=float))

    @property
    def min_birth(self) -> float:
        vals = self.critical_values()
        return float(vals[0]) if vals.size else 0.0

    def sublevel(self, t: float) -> WeightedComplex:
        return self.complex.subcomplex(s for s, b in self.birth.items() if b <= t)

    def at(self, t: float) -> WeightedComplex:
        return self.sublevel(max(t, self.min_birth))


def sublevel(f: Filtration, t: float) -> WeightedComplex:
    return f.sublevel(t)


def monotonize(cx: WeightedComplex, birth: dict) -> dict:
    """Raise births so that every face is born no later than its cofaces."""
    out = dict(birth)
    for k in sorted(cx.simplices):
        for s in cx.basis(k):
            out[s] = max([out[s]] + [out[f] for f in facets(s)])
    return out
