"""Persistent spectral counting functions, interleaving distances and audits.

Filtrations here are sublevel families of a birth function, held constant
below the first critical value.  All counting functions are therefore
piecewise constant on the cells between consecutive critical values, and
every infimum in the interleaving distance can be found on a finite set of
candidate shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .complexes import (ChainComplexRep, Filtration, InclusionRep, assemble,
                        check_inclusion, inclusion)
from .errors import InputError, InvariantError
from .laplacians import (PersistentPair, Spectrum, lambda_q,
                         persistent_boundary, persistent_laplacians,
                         persistent_subspace, spectrum)
from .linalg import DEFAULT_TOL, Tolerance

INF = math.inf
KINDS = ("up", "down", "full")


def _le(a: float, b: float, tol: Tolerance) -> bool:
    """``a <= b`` with relative slack; infinity is the largest value."""
    if b == INF:
        return True
    if a == INF:
        return False
    return a <= b + tol.eig_threshold(max(abs(a), abs(b)))


def _eq(a: float, b: float, tol: Tolerance) -> bool:
    return _le(a, b, tol) and _le(b, a, tol)


@dataclass
class FiltrationTriple:
    """``P1 ⊂ P2 ⊂ P3`` with the two composable inclusions."""

    c1: ChainComplexRep
    c2: ChainComplexRep
    c3: ChainComplexRep
    j12: InclusionRep
    j23: InclusionRep
    j13: InclusionRep | None = None

    def __post_init__(self):
        composite = self.j23.compose(self.j12)
        if self.j13 is not None:
            for k, m in composite.maps.items():
                if not np.allclose(self.j13.map(k, *m.shape), m, atol=1e-12):
                    raise InputError(f"supplied J13 differs from J23·J12 in degree {k}")
        self.j13 = composite
        check_inclusion(self.c1, self.c3, self.j13)

    @cached_property
    def pair12(self) -> PersistentPair:
        return PersistentPair(self.c1, self.c2, self.j12)

    @cached_property
    def pair13(self) -> PersistentPair:
        return PersistentPair(self.c1, self.c3, self.j13)

    @cached_property
    def pair23(self) -> PersistentPair:
        return PersistentPair(self.c2, self.c3, self.j23)

    @classmethod
    def from_filtration(cls, f: Filtration, thresholds) -> "FiltrationTriple":
        t1, t2, t3 = thresholds
        if not t1 <= t2 <= t3:
            raise InputError("triple thresholds must be nondecreasing")
        c = [assemble(f.at(t)) for t in (t1, t2, t3)]
        return cls(c[0], c[1], c[2], inclusion(c[0], c[1]), inclusion(c[1], c[2]))


# -- counting functions ---------------------------------------------------------


class SpectralTable:
    """Spectra of every persistent pair ``(P_s, P_t)`` of a filtration.

    Cells are indexed by positions in ``breakpoints``; stages are assembled
    once and shared between cells.
    """

    def __init__(self, f: Filtration, k: int, breakpoints=None, tol: Tolerance = DEFAULT_TOL):
        self.filtration = f
        self.k = k
        self.tol = tol
        bp = f.critical_values() if breakpoints is None else np.unique(np.asarray(breakpoints, float))
        self.breakpoints = bp
        stages = [assemble(f.at(t)) for t in bp]
        self.spectra: dict[tuple[int, int], dict[str, Spectrum]] = {}
        for i in range(len(bp)):
            for j in range(i, len(bp)):
                pair = PersistentPair(stages[i], stages[j], inclusion(stages[i], stages[j]))
                laps = persistent_laplacians(pair, k, tol)
                self.spectra[(i, j)] = {kind: spectrum(getattr(laps, kind), tol) for kind in KINDS}

    def counting_function(self, kind: str, q: int) -> "CountingFunction":
        n = len(self.breakpoints)
        table = np.full((n, n), np.nan)
        for (i, j), specs in self.spectra.items():
            table[i, j] = lambda_q(specs[kind], q)
        return CountingFunction(kind, self.k, q, self.breakpoints, table)


@dataclass
class CountingFunction:
    """``(s, t) -> lambda_q`` of one Laplacian kind, tabulated on a breakpoint grid.

    Off-grid arguments are floored onto the grid; arguments below the first
    breakpoint read the first row/column.
    """

    kind: str
    degree: int
    q: int
    breakpoints: np.ndarray
    table: np.ndarray

    def _index(self, x) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints, np.asarray(x, float), side="right") - 1
        return np.clip(idx, 0, len(self.breakpoints) - 1)

    def values(self, s, t) -> np.ndarray:
        return self.table[self._index(s), self._index(t)]

    def value(self, s: float, t: float) -> float:
        if s > t:
            raise ValueError("interval needs s <= t")
        return float(self.values([s], [t])[0])

    def cells(self):
        n = len(self.breakpoints)
        for i in range(n):
            for j in range(i, n):
                yield self.breakpoints[i], self.breakpoints[j], float(self.table[i, j])


def counting_function(f: Filtration, kind: str, k: int, q: int, breakpoints=None,
                      tol: Tolerance = DEFAULT_TOL) -> CountingFunction:
    if kind not in KINDS:
        raise InputError(f"kind must be one of {KINDS}")
    return SpectralTable(f, k, breakpoints, tol).counting_function(kind, q)


def _ge_array(a: np.ndarray, b: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Elementwise ``a >= b`` with slack; ``inf >= anything``; ``finite >= inf`` fails."""
    out = np.ones(a.shape, dtype=bool)
    b_inf = np.isinf(b)
    out[b_inf] = np.isinf(a[b_inf])
    fin = ~b_inf & ~np.isinf(a)
    scale = np.maximum(1.0, np.maximum(np.abs(a[fin]), np.abs(b[fin])))
    out[fin] = a[fin] >= b[fin] - tol.eig_tol * scale
    return out


def _shift_ok(f: CountingFunction, g: CountingFunction, eps: float, grid: np.ndarray,
              tol: Tolerance) -> bool:
    # every real interval falls in a cell of this refined grid, and both
    # sides are constant on each cell
    pts = np.unique(np.concatenate([grid, grid + eps, grid - eps]))
    pts = np.concatenate([[pts[0] - 1.0], pts])
    s, t = np.meshgrid(pts, pts, indexing="ij")
    keep = s <= t
    s, t = s[keep], t[keep]
    if not np.all(_ge_array(f.values(s - eps, t + eps), g.values(s, t), tol)):
        return False
    return bool(np.all(_ge_array(g.values(s - eps, t + eps), f.values(s, t), tol)))


def is_monotone(f: CountingFunction, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether ``f(I) <= f(J)`` for grid intervals ``I ⊂ J``."""
    t = f.table
    n = t.shape[0]
    for i in range(n):
        for j in range(i, n):
            if i > 0 and not _le(t[i, j], t[i - 1, j], tol):
                return False
            if j + 1 < n and not _le(t[i, j], t[i, j + 1], tol):
                return False
    return True


def function_interleaving_distance(f: CountingFunction, g: CountingFunction,
                                   tol: Tolerance = DEFAULT_TOL, search: str = "auto") -> float:
    """Smallest shift ``eps`` with ``f(I^eps) >= g(I)`` and ``g(I^eps) >= f(I)`` for all ``I``.

    The infimum is one of ``0``, a breakpoint difference or half of one; a
    candidate ``c`` wins when the condition holds at ``c`` or just above it.
    For monotone functions validity is monotone in ``eps`` and the
    candidates are bisected (``search="auto"``); otherwise they are scanned
    in order.
    """
    grid = np.unique(np.concatenate([f.breakpoints, g.breakpoints]))
    diffs = np.abs(grid[:, None] - grid[None, :]).ravel()
    cands = np.unique(np.concatenate([[0.0], diffs, diffs / 2]))

    def wins(i: int) -> bool:
        c = cands[i]
        nxt = cands[i + 1] if i + 1 < len(cands) else c + 1.0
        return _shift_ok(f, g, c, grid, tol) or _shift_ok(f, g, (c + nxt) / 2, grid, tol)

    if search == "auto":
        search = "bisect" if is_monotone(f, tol) and is_monotone(g, tol) else "scan"
    if search == "bisect":
        if not wins(len(cands) - 1):
            return INF
        lo, hi = -1, len(cands) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if wins(mid):
                hi = mid
            else:
                lo = mid
        return float(cands[hi])
    for i in range(len(cands)):
        if wins(i):
            return float(cands[i])
    return INF


def filtration_interleaving_distance(f: Filtration, g: Filtration) -> float:
    """Interleaving distance of two filtrations of the same weighted complex.

    Simplices born at a filtration's first critical value are present for
    all times; the two filtrations must agree on that initial set or the
    distance is infinite.  Otherwise it is the sup-distance of births over
    the remaining simplices.
    """
    simp_f, simp_g = set(f.birth), set(g.birth)
    if simp_f != simp_g:
        raise InputError("filtrations live on different simplex sets")
    for s in simp_f:
        if f.complex.weights[s] != g.complex.weights[s]:
            raise InputError(f"weights of {s} differ between the filtrations")
    mf, mg = f.min_birth, g.min_birth
    initial_f = {s for s, b in f.birth.items() if b == mf}
    initial_g = {s for s, b in g.birth.items() if b == mg}
    if initial_f != initial_g:
        return INF
    rest = simp_f - initial_f
    if not rest:
        return 0.0
    return float(max(abs(f.birth[s] - g.birth[s]) for s in rest))


# -- audits -----------------------------------------------------------------------


@dataclass
class AuditRow:
    relation: str
    q: int
    lhs: float
    rhs: float
    holds: bool
    guaranteed: bool


@dataclass
class MonotonicityReport:
    k: int
    rows: list[AuditRow] = field(default_factory=list)

    @property
    def violations(self) -> list[AuditRow]:
        """Failures of relations that must hold."""
        return [r for r in self.rows if r.guaranteed and not r.holds]

    @property
    def full_flags(self) -> list[int]:
        """``q`` values where the full counting function fails to be monotone."""
        return [r.q for r in self.rows if r.relation == "full_23_le_13" and not r.holds]


def _spectra(pair: PersistentPair, k: int, tol: Tolerance) -> dict[str, Spectrum]:
    laps = persistent_laplacians(pair, k, tol)
    return {kind: spectrum(getattr(laps, kind), tol) for kind in KINDS}


def monotonicity_audit(t: FiltrationTriple, k: int, q_max: int | None = None,
                       tol: Tolerance = DEFAULT_TOL) -> MonotonicityReport:
    """Compare counting functions of the pairs (1,2), (1,3), (2,3).

    Guaranteed: down(1,2) = down(1,3), down(2,3) <= down(1,3),
    up(1,2) <= up(1,3), up(2,3) <= up(1,3) and full(1,2) <= full(1,3).
    Reported only: full(2,3) <= full(1,3).
    """
    s12, s13, s23 = (_spectra(p, k, tol) for p in (t.pair12, t.pair13, t.pair23))
    if q_max is None:
        q_max = max(t.c1.dim(k), t.c2.dim(k), 1)
    rep = MonotonicityReport(k)
    for q in range(1, q_max + 1):
        lam = {name: {kind: lambda_q(sp[kind], q) for kind in KINDS}
               for name, sp in (("12", s12), ("13", s13), ("23", s23))}
        checks = [
            ("down_12_eq_13", lam["12"]["down"], lam["13"]["down"], _eq, True),
            ("down_23_le_13", lam["23"]["down"], lam["13"]["down"], _le, True),
            ("up_12_le_13", lam["12"]["up"], lam["13"]["up"], _le, True),
            ("up_23_le_13", lam["23"]["up"], lam["13"]["up"], _le, True),
            ("full_12_le_13", lam["12"]["full"], lam["13"]["full"], _le, True),
            ("full_23_le_13", lam["23"]["full"], lam["13"]["full"], _le, False),
        ]
        for name, a, b, rel, guaranteed in checks:
            rep.rows.append(AuditRow(name, q, a, b, rel(a, b, tol), guaranteed))
    return rep


def full_monotonicity_condition(t: FiltrationTriple, k: int, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether the pull-back of ``im d^{2,3}_{k+1}`` to ``C^1_k`` lies in ``ker d^1_k``.

    True implies full monotonicity for this ``k``; the converse fails in
    general.
    """
    p23 = t.pair23
    z = persistent_subspace(p23, k, tol)
    image = persistent_boundary(p23, k, z, tol)
    if image.shape[1] == 0 or t.c1.dim(k) == 0:
        return True
    j = t.j12.map(k, t.c2.dim(k), t.c1.dim(k))
    w1, w2 = t.c1.inner(k), t.c2.inner(k)
    pulled = w1.solve(j.T @ w2.gram @ image)
    res = t.c1.boundary(k) @ pulled
    if res.size == 0:
        return True
    scale = max(1.0, float(np.max(np.abs(t.c1.boundary(k)))) * float(np.max(np.abs(pulled), initial=0)))
    return bool(np.max(np.abs(res)) <= 1e3 * tol.rank_tol * scale)


@dataclass
class StabilityRow:
    kind: str
    q: int
    spectral_distance: float
    filtration_distance: float
    holds: bool


@dataclass
class StabilityReport:
    k: int
    filtration_distance: float
    rows: list[StabilityRow] = field(default_factory=list)

    @property
    def violations(self) -> list[StabilityRow]:
        return [r for r in self.rows if r.kind != "full" and not r.holds]

    @property
    def full_exceedances(self) -> list[StabilityRow]:
        return [r for r in self.rows if r.kind == "full" and not r.holds]


def stability_audit(f: Filtration, g: Filtration, k: int, q_max: int | None = None,
                    tol: Tolerance = DEFAULT_TOL, kinds=KINDS) -> StabilityReport:
    """Spectral interleaving distances against the filtration distance."""
    d_filt = filtration_interleaving_distance(f, g)
    tf, tg = SpectralTable(f, k, tol=tol), SpectralTable(g, k, tol=tol)
    if q_max is None:
        q_max = max(f.complex.dim(k), 1)
    rep = StabilityReport(k, d_filt)
    for kind in kinds:
        for q in range(1, q_max + 1):
            d = function_interleaving_distance(tf.counting_function(kind, q), tg.counting_function(kind, q), tol)
            holds = d_filt == INF or _le(d, d_filt, tol)
            rep.rows.append(StabilityRow(kind, q, d, d_filt, holds))
    return rep


@dataclass
class ParametricResult:
    r: float
    condition: bool
    spectrum13: np.ndarray
    spectrum23: np.ndarray
    monotone: bool


def parametric_r_example(r: float, tol: Tolerance = DEFAULT_TOL) -> ParametricResult:
    """Full monotonicity of the ``(r, -r)`` configuration; it holds iff ``|r| <= 1/sqrt 2``."""
    from .catalog import parametric_triple

    t = parametric_triple(r)
    rep = monotonicity_audit(t, 1, tol=tol)
    if rep.violations:
        raise InvariantError(f"guaranteed monotonicity failed: {rep.violations}")
    s13 = spectrum(persistent_laplacians(t.pair13, 1, tol).full, tol).eigenvalues
    s23 = spectrum(persistent_laplacians(t.pair23, 1, tol).full, tol).eigenvalues
    return ParametricResult(r, full_monotonicity_condition(t, 1, tol), s13, s23, not rep.full_flags)


@dataclass
class SearchHit:
    filtration: Filtration
    thresholds: tuple[float, float, float]
    k: int
    report: MonotonicityReport
    planted: bool = False


@dataclass
class SearchResult:
    flagged: list[SearchHit] = field(default_factory=list)
    fatal: list[SearchHit] = field(default_factory=list)
    trials: int = 0


def counterexample_search(seed: int, budget: int, k: int = 1, planted=None,
                          tol: Tolerance = DEFAULT_TOL, **gen_params) -> SearchResult:
    """Random triples from random weighted flag filtrations, audited for monotonicity.

    ``planted`` is an optional list of ``(filtration, thresholds)`` audited
    before the random trials.  Triples breaking a guaranteed relation go to
    ``fatal`` instead of ``flagged``.
    """
    from .generators import random_triple_thresholds, random_weighted_filtration

    rng = np.random.default_rng(seed)
    out = SearchResult()
    jobs = [(f, tuple(th), True) for f, th in (planted or [])]
    for f, th, is_planted in jobs:
        _audit_into(out, f, th, k, tol, is_planted)
    for _ in range(budget):
        f = random_weighted_filtration(rng, **gen_params)
        th = random_triple_thresholds(rng, f)
        _audit_into(out, f, th, k, tol, False)
    return out


def _audit_into(out: SearchResult, f: Filtration, th, k: int, tol: Tolerance, planted: bool):
    triple = FiltrationTriple.from_filtration(f, th)
    rep = monotonicity_audit(triple, k, tol=tol)
    out.trials += 1
    hit = SearchHit(f, tuple(float(x) for x in th), k, rep, planted)
    if rep.violations:
        out.fatal.append(hit)
    elif rep.full_flags:
        out.flagged.append(hit)
