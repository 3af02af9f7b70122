"""Random weighted complexes, filtrations and nested triples for property tests."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .complexes import (ChainComplexRep, Filtration, WeightedComplex,
                        assemble, inclusion, monotonize, prefix_inclusion)
from .laplacians import PersistentPair
from .linalg import nullspace_basis


def log_uniform_weights(rng, n, lo=0.25, hi=4.0) -> np.ndarray:
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=n))


def random_spd(rng, n, cond=10.0) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (q * np.exp(rng.uniform(0, np.log(cond), size=n))) @ q.T


def flag_simplices(n_vertices: int, edges, max_dim: int = 2) -> list[tuple]:
    """Cliques of the graph up to ``max_dim``."""
    adj = {v: set() for v in range(n_vertices)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    out = [(v,) for v in range(n_vertices)]
    out += [tuple(sorted(e)) for e in edges]
    for d in range(2, max_dim + 1):
        for c in combinations(range(n_vertices), d + 1):
            if all(b in adj[a] for a, b in combinations(c, 2)):
                out.append(c)
    return out


def random_flag_complex(rng, n_vertices=None, p_edge=None, max_dim=2, weighted=True,
                        full_gram=False) -> WeightedComplex:
    """Erdős–Rényi flag complex with log-uniform weights in ``[1/4, 4]``."""
    n = int(n_vertices if n_vertices is not None else rng.integers(3, 8))
    p = float(p_edge if p_edge is not None else rng.uniform(0.3, 0.8))
    edges = [e for e in combinations(range(n), 2) if rng.random() < p]
    sims = flag_simplices(n, edges, max_dim)
    cx = WeightedComplex.from_simplices(sims)
    if weighted:
        w = log_uniform_weights(rng, len(cx))
        cx = WeightedComplex(cx.simplices, dict(zip(cx.all_simplices(), w)))
    if full_gram:
        grams = {k: random_spd(rng, cx.dim(k)) for k in cx.simplices if cx.dim(k)}
        cx = WeightedComplex(cx.simplices, cx.weights, grams)
    return cx


def random_weighted_filtration(rng, n_vertices=None, p_edge=None, max_dim=2, levels=None,
                               full_gram=False) -> Filtration:
    """Uniform births made face-monotone by propagating maxima.

    ``levels`` quantizes births to that many distinct values, which keeps
    the critical grid small.
    """
    cx = random_flag_complex(rng, n_vertices, p_edge, max_dim, full_gram=full_gram)
    raw = rng.uniform(0.0, 1.0, size=len(cx))
    if levels:
        raw = np.floor(raw * levels) / levels
    birth = monotonize(cx, dict(zip(cx.all_simplices(), raw.tolist())))
    return Filtration(cx, birth)


def random_triple_thresholds(rng, f: Filtration) -> tuple[float, float, float]:
    cv = f.critical_values()
    return tuple(float(x) for x in np.sort(rng.choice(cv, size=3, replace=True)))


def random_pair(rng, full_gram=False, **kw) -> PersistentPair:
    """``K = P_s ⊂ L = P_t`` from a random filtration."""
    f = random_weighted_filtration(rng, full_gram=full_gram, **kw)
    cv = f.critical_values()
    s, t = np.sort(rng.choice(cv, size=2, replace=True))
    k, l = assemble(f.at(s)), assemble(f.at(t))
    return PersistentPair(k, l, inclusion(k, l))


def rips_filtration(points: np.ndarray, max_dim=2, weights=None, scale=None) -> Filtration:
    """Flag filtration with births = diameter of the vertex set (vertices at 0).

    Edges longer than ``scale`` are dropped.
    """
    points = np.asarray(points, float)
    n = len(points)
    dist = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    edges = [(a, b) for a, b in combinations(range(n), 2) if scale is None or dist[a, b] <= scale]
    sims = flag_simplices(n, edges, max_dim)
    cx = WeightedComplex.from_simplices(sims, weights)
    birth = {}
    for s in cx.all_simplices():
        birth[s] = 0.0 if len(s) == 1 else max(dist[a, b] for a, b in combinations(s, 2))
    return Filtration(cx, birth)


def perturbed_rips_pair(rng, n_points=None, delta=0.1, dim=2, max_dim=2, scale=None):
    """Two Rips filtrations whose point clouds differ by at most ``delta / 2`` per point.

    Births move by at most ``delta``.  The edge set is fixed by the first
    cloud so both live on the same complex; weights are shared.
    """
    n = int(n_points if n_points is not None else rng.integers(4, 8))
    pts = rng.uniform(0, 1, size=(n, dim))
    noise = rng.uniform(-1, 1, size=(n, dim))
    noise *= (delta / 2) / np.maximum(np.linalg.norm(noise, axis=1, keepdims=True), 1e-12)
    noise *= rng.uniform(0, 1, size=(n, 1))
    f = rips_filtration(pts, max_dim, scale=scale)
    w = dict(zip(f.complex.all_simplices(), log_uniform_weights(rng, len(f.complex))))
    cx = WeightedComplex(f.complex.simplices, w)
    moved = pts + noise
    dist = np.linalg.norm(moved[:, None, :] - moved[None, :, :], axis=-1)
    birth_g = {s: 0.0 if len(s) == 1 else max(dist[a, b] for a, b in combinations(s, 2))
               for s in cx.all_simplices()}
    return Filtration(cx, f.birth), Filtration(cx, birth_g)


def condition_triple(rng, n1=None, n2=None, a=None, p=None, general_gram=True):
    """Abstract triple built so the pulled-back image of ``d^{2,3}`` lies in ``ker d^1``.

    Degree 0 is ``R^a`` in all three complexes, degree 1 is ``R^n1 ⊂ R^n2 =
    R^n2`` and degree 2 is ``0, 0, R^p``.  Columns of ``d^3_2`` are
    ``(x, y)`` with ``x ∈ ker D1``, ``y ∈ ker D2`` where ``d_1 = [D1 | D2]``.
    """
    from .analysis import FiltrationTriple

    n1 = int(n1 if n1 is not None else rng.integers(1, 5))
    extra = int(n2 - n1 if n2 is not None else rng.integers(1, 5))
    n2 = n1 + extra
    a = int(a if a is not None else rng.integers(1, max(2, min(n1, extra)) + 1))
    p = int(p if p is not None else rng.integers(1, 4))
    d1 = rng.standard_normal((a, n1))
    d2 = rng.standard_normal((a, extra))
    # rank-deficient blocks so both kernels are nontrivial
    if a > 1:
        d1[-1] = d1[:-1].sum(axis=0)
        d2[-1] = d2[:-1].sum(axis=0)
    k1, k2 = nullspace_basis(d1), nullspace_basis(d2)
    cols = []
    for _ in range(p):
        x = k1 @ rng.standard_normal(k1.shape[1]) if k1.shape[1] else np.zeros(n1)
        y = k2 @ rng.standard_normal(k2.shape[1]) if k2.shape[1] else np.zeros(extra)
        cols.append(np.concatenate([x, y]))
    top = np.column_stack(cols)
    full_d1 = np.hstack([d1, d2])
    if general_gram:
        # the new degree-1 directions stay orthogonal to the old ones, so the
        # pull-back to C^1 keeps the x block
        g1 = np.zeros((n2, n2))
        g1[:n1, :n1] = random_spd(rng, n1)
        g1[n1:, n1:] = random_spd(rng, extra)
        g0, g2 = random_spd(rng, a), random_spd(rng, p)
    else:
        g0, g1, g2 = np.eye(a), np.eye(n2), np.eye(p)
    c1 = ChainComplexRep.from_matrices([d1, np.zeros((n1, 0))], [g0, g1[:n1, :n1], np.zeros((0, 0))])
    c2 = ChainComplexRep.from_matrices([full_d1, np.zeros((n2, 0))], [g0, g1, np.zeros((0, 0))])
    c3 = ChainComplexRep.from_matrices([full_d1, top], [g0, g1, g2])
    return FiltrationTriple(c1, c2, c3, prefix_inclusion(c1, c2), prefix_inclusion(c2, c3))
