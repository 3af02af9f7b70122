"""Acceptance gate: one test per criterion, each at its stated tolerance.

A summary line per criterion is printed at the end of the pytest run.
"""

import numpy as np
import pytest

from perslap.analysis import (FiltrationTriple, filtration_interleaving_distance,
                              full_monotonicity_condition, monotonicity_audit,
                              parametric_r_example, stability_audit)
from perslap.catalog import (coordinate_shift_triple, glued_triangles_triple, parametric_triple,
                             square_with_diagonal_pair, step_filtrations)
from perslap.complexes import assemble, inclusion
from perslap.cosheaf import Cosheaf, constant_cosheaf, cosheaf_assemble, psd_realization
from perslap.generators import (condition_triple, perturbed_rips_pair, random_pair,
                                random_triple_thresholds, random_weighted_filtration)
from perslap.laplacians import (PersistentPair, full_laplacian, hodge_check,
                                hodge_decomposition_check, persistent_betti, persistent_boundary,
                                persistent_laplacians, persistent_subspace, schur_persistent_up,
                                spectrum, splitting_check)

MAX_DIM = 50
DEGREES = (0, 1, 2)

# reference bases for the square with a diagonal, as positions in lexicographic order
K_EDGES = [("a", "b"), ("b", "c"), ("a", "d"), ("c", "d")]
L_EDGES = K_EDGES + [("a", "c")]


def permutation(labels, order):
    pos = {lab: i for i, lab in enumerate(labels)}
    return [pos[lab] for lab in order]


def bounded_pairs(n, seed, full_grams=True):
    """``n`` random weighted pairs with every chain group of dimension at most 50.

    With ``full_grams`` every other pair carries dense SPD Grams.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        p = random_pair(rng, full_gram=full_grams and len(out) % 2 == 1, n_vertices=int(rng.integers(3, 11)))
        if max(p.L.dims) <= MAX_DIM:
            out.append(p)
    return out


@pytest.fixture(scope="module")
def pairs():
    return bounded_pairs(200, 20240601)


def test_criterion_01_square_with_diagonal(criterion):
    p = square_with_diagonal_pair()
    pk = permutation(p.K.labels[1], K_EDGES)
    pl = permutation(p.L.labels[1], L_EDGES)
    # boundaries in the reference bases
    d1 = p.K.boundary(1)[:, pk]
    d2 = p.L.boundary(2)[pl, :]
    np.testing.assert_array_equal(d1, [[-1, 0, -1, 0], [1, -1, 0, 0], [0, 1, 0, -1], [0, 0, 1, 1]])
    np.testing.assert_array_equal(d2, [[1, 0], [1, 0], [0, -1], [0, 1], [-1, 1]])
    np.testing.assert_array_equal(p.J(1)[np.ix_(pl, pk)], np.eye(5, 4))

    z = persistent_subspace(p, 1)
    m = persistent_boundary(p, 1, z)[pk]
    lap = persistent_laplacians(p, 1).full.op[np.ix_(pk, pk)]
    want = 0.5 * np.array([[5, -1, 1, 1], [-1, 5, -1, -1], [1, -1, 5, 1], [1, -1, 1, 5]])
    spec = spectrum(persistent_laplacians(p, 1).full).eigenvalues
    ok = (np.max(np.abs(z[:, 0] - np.array([1, 1]) / np.sqrt(2))) <= 1e-12
          and np.max(np.abs(m[:, 0] - np.array([1, 1, -1, 1]) / np.sqrt(2))) <= 1e-12
          and np.max(np.abs(lap - want)) <= 1e-12
          and np.max(np.abs(spec - [2, 2, 2, 4])) <= 1e-9)
    # the reference list (4,4,4,8) is exactly twice the computed spectrum
    regression = np.max(np.abs(2 * spec - [4, 4, 4, 8])) <= 1e-9
    criterion(1, ok and regression, f"spectrum {np.round(spec, 12).tolist()}, doubled = reference (4,4,4,8)")
    assert ok and regression


def test_criterion_02_glued_triangles(criterion):
    t = glued_triangles_triple()
    a = persistent_laplacians(t.pair13, 1).full.op
    b = persistent_laplacians(t.pair23, 1).full.op
    want_a = np.array([[3, 0, 1, 0], [0, 3, 1, 0], [1, 1, 2, 0], [0, 0, 0, 3]])
    want_b = np.array([[3, 0, 1, 0, 0], [0, 4, 0, 0, 0], [1, 0, 3, 0, 0], [0, 0, 0, 3, -1], [0, 0, 0, -1, 3]])
    sa = spectrum(persistent_laplacians(t.pair13, 1).full).eigenvalues
    sb = spectrum(persistent_laplacians(t.pair23, 1).full).eigenvalues
    rep = monotonicity_audit(t, 1)
    ok = (np.max(np.abs(a - want_a)) <= 1e-12 and np.max(np.abs(b - want_b)) <= 1e-12
          and np.max(np.abs(sa - [1, 3, 3, 4])) <= 1e-9
          and np.max(np.abs(sb - [2, 2, 4, 4, 4])) <= 1e-9
          and rep.full_flags == [1, 3] and not rep.violations)
    criterion(2, ok, f"flags at q = {rep.full_flags}")
    assert ok


def test_criterion_03_coordinate_shift(criterion):
    t = coordinate_shift_triple()
    a = persistent_laplacians(t.pair13, 1).full.op
    b = persistent_laplacians(t.pair23, 1).full.op
    rep = monotonicity_audit(t, 1)
    ok = (np.max(np.abs(a - np.eye(2))) <= 1e-12 and np.max(np.abs(b - np.diag([2, 1, 2]))) <= 1e-12
          and rep.full_flags == [2] and not rep.violations)
    criterion(3, ok, f"flags at q = {rep.full_flags}")
    assert ok


def test_criterion_04_parametric_threshold(criterion):
    half = parametric_r_example(0.5)
    b = persistent_laplacians(parametric_triple(0.5).pair23, 1).full.op
    lo, hi = 0.5, 1.0
    assert parametric_r_example(lo).monotone and not parametric_r_example(hi).monotone
    for _ in range(60):
        mid = (lo + hi) / 2
        if parametric_r_example(mid).monotone:
            lo = mid
        else:
            hi = mid
    flip = (lo + hi) / 2
    ok = (np.max(np.abs(b - [[1.25, 0.75], [0.75, 1.25]])) <= 1e-12
          and np.max(np.abs(half.spectrum23 - [0.5, 2.0])) <= 1e-9
          and half.condition is False and half.monotone
          and abs(flip - 2 ** -0.5) <= 1e-6)
    criterion(4, ok, f"flag flips at r = {flip:.9f} (1/sqrt 2 = {2 ** -0.5:.9f})")
    assert ok


def test_criterion_05_staged_filtrations(criterion):
    p, q = step_filtrations()
    d = filtration_interleaving_distance(p, q)
    rep = stability_audit(p, q, 1)
    updown = [r.spectral_distance for r in rep.rows if r.kind != "full"]
    full_q1 = next(r.spectral_distance for r in rep.rows if r.kind == "full" and r.q == 1)
    ok = d == 1.0 and max(updown) <= 1.0 and full_q1 == np.inf
    criterion(5, ok, f"d(P,Q) = {d}, max up/down = {max(updown)}, full q=1 = {full_q1}")
    assert ok


def test_criterion_06_pair_identities(criterion, pairs):
    failures = []
    worst_orth = 0.0
    for i, p in enumerate(pairs):
        for k in DEGREES:
            for lap in persistent_laplacians(p, k):
                lap.check_self_adjoint()
                s = spectrum(lap)
                if s.eigenvalues.size and s.eigenvalues[0] < 0:
                    failures.append((i, k, "psd"))
            if not splitting_check(p, k):
                failures.append((i, k, "splitting"))
            if not hodge_check(p, k):
                failures.append((i, k, "hodge"))
            dec = hodge_decomposition_check(p.L, k, orth_tol=1e-9)
            worst_orth = max(worst_orth, dec.details["max_cross_inner"])
            if not dec:
                failures.append((i, k, "decomposition"))
    ok = not failures
    criterion(6, ok, f"{len(pairs)} pairs x {len(DEGREES)} degrees, max cross inner product {worst_orth:.1e}")
    assert ok, failures[:5]


def test_criterion_07_guaranteed_monotonicity(criterion):
    rng = np.random.default_rng(7)
    violations = 0
    for i in range(200):
        f = random_weighted_filtration(rng, full_gram=i % 2 == 1)
        t = FiltrationTriple.from_filtration(f, random_triple_thresholds(rng, f))
        for k in DEGREES:
            violations += len(monotonicity_audit(t, k).violations)
    criterion(7, violations == 0, f"200 triples, {violations} violations")
    assert violations == 0


def test_criterion_08_condition_implies_monotonicity(criterion):
    rng = np.random.default_rng(8)
    bad = 0
    for i in range(100):
        t = condition_triple(rng, general_gram=i % 2 == 0)
        assert full_monotonicity_condition(t, 1)
        rep = monotonicity_audit(t, 1)
        bad += bool(rep.full_flags or rep.violations)
    criterion(8, bad == 0, f"100 triples satisfying the condition, {bad} flagged")
    assert bad == 0


def test_criterion_09_stability(criterion):
    rng = np.random.default_rng(9)
    worst = -np.inf
    failures = 0
    for _ in range(100):
        delta = float(rng.uniform(0.0, 0.1))
        f, g = perturbed_rips_pair(rng, n_points=int(rng.integers(3, 6)), delta=delta)
        d_filt = filtration_interleaving_distance(f, g)
        assert d_filt <= delta + 1e-12
        rep = stability_audit(f, g, 1, kinds=("up", "down"))
        for r in rep.rows:
            worst = max(worst, r.spectral_distance - delta)
            failures += r.spectral_distance > delta + 1e-9
    criterion(9, failures == 0, f"100 perturbed filtrations, max(d_I - delta) = {worst:.2e}")
    assert failures == 0


def test_criterion_10_oracle_equivalence(criterion, pairs):
    schur_pairs = bounded_pairs(50, 10, full_grams=False)
    worst = 0.0
    for p in schur_pairs:
        for k in DEGREES:
            diff = schur_persistent_up(p, k).op - persistent_laplacians(p, k).up.op
            worst = max(worst, float(np.max(np.abs(diff), initial=0.0)))
    mismatch = sum(persistent_betti(p, k) != spectrum(persistent_laplacians(p, k).full).kernel_dim
                   for p in pairs for k in DEGREES)
    ok = worst <= 1e-8 and mismatch == 0
    criterion(10, ok, f"max Schur gap {worst:.1e}, Betti/kernel mismatches {mismatch}")
    assert ok


def test_criterion_11_cosheaves(criterion):
    rng = np.random.default_rng(11)
    worst_const = 0.0
    for _ in range(20):
        f = random_weighted_filtration(rng)
        cx = f.complex
        base = constant_cosheaf(cx)
        grams = {s: np.array([[cx.weights[s]]]) for s in cx.all_simplices()}
        a = cosheaf_assemble(Cosheaf(cx, base.stalk_dim, base.restriction, grams))
        b = assemble(cx)
        for k in range(cx.top_degree + 1):
            worst_const = max(worst_const, float(np.max(np.abs(full_laplacian(a, k).op - full_laplacian(b, k).op))))
    worst_psd = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 9))
        g = rng.standard_normal((n, int(rng.integers(0, n + 1))))
        target = g @ g.T
        f1, f2, k = psd_realization(target)
        c1, c2 = cosheaf_assemble(f1), cosheaf_assemble(f2)
        lap = persistent_laplacians(PersistentPair(c1, c2, inclusion(c1, c2)), k).full.op
        worst_psd = max(worst_psd, float(np.max(np.abs(lap - target))))
    ok = worst_const <= 1e-12 and worst_psd <= 1e-8
    criterion(11, ok, f"constant cosheaf gap {worst_const:.1e}, realization gap {worst_psd:.1e}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
