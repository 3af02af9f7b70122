import numpy as np
import pytest
from hypothesis import given, strategies as st

from perslap.catalog import four_cycle, square_with_diagonal_pair
from perslap.complexes import ChainComplexRep, assemble, boundary_matrix, prefix_inclusion
from perslap.errors import InvariantError, NumericalError
from perslap.generators import random_pair, random_spd
from perslap.laplacians import (LaplacianRep, PersistentPair, down_laplacian, full_laplacian,
                                hodge_check, hodge_decomposition_check, lambda_q, multiset_match,
                                persistent_betti, persistent_laplacians, persistent_subspace,
                                schur_persistent_up, spectrum, splitting_check, up_laplacian)
from perslap.linalg import InnerProduct

from oracles import exact_persistent_betti, persistent_up_reference

seeds = st.integers(0, 2**32 - 1)
degrees = st.integers(0, 2)


def test_four_cycle_hodge_laplacian_by_hand():
    c = assemble(four_cycle())
    lap = full_laplacian(c, 1)
    d = boundary_matrix(four_cycle(), 1)
    np.testing.assert_array_equal(lap.op, d.T @ d)
    s = spectrum(lap)
    np.testing.assert_allclose(s.eigenvalues, [0, 2, 2, 4], atol=1e-12)
    assert s.kernel_dim == 1


def test_trivial_pair_gives_chain_laplacian():
    c = assemble(four_cycle())
    laps = persistent_laplacians(PersistentPair.trivial(c), 1)
    np.testing.assert_allclose(laps.full.op, full_laplacian(c, 1).op, atol=1e-12)


def test_lambda_q_is_infinite_past_dimension():
    s = spectrum(full_laplacian(assemble(four_cycle()), 1))
    assert lambda_q(s, 4) == pytest.approx(4.0)
    assert lambda_q(s, 5) == np.inf
    with pytest.raises(ValueError):
        lambda_q(s, 0)


def test_negative_eigenvalue_is_an_invariant_error():
    lap = LaplacianRep(-np.eye(2), InnerProduct.identity(2), "up", 0)
    with pytest.raises(InvariantError):
        spectrum(lap)


def test_square_with_diagonal_persistent_subspace():
    z = persistent_subspace(square_with_diagonal_pair(), 1)
    np.testing.assert_allclose(z[:, 0], [2 ** -0.5, 2 ** -0.5])


def test_empty_subcomplex_degree():
    small = ChainComplexRep.from_matrices([np.zeros((1, 0))])
    big = ChainComplexRep.from_matrices([np.array([[1.0]])])
    laps = persistent_laplacians(PersistentPair(small, big, prefix_inclusion(small, big)), 1)
    assert laps.full.op.shape == (0, 0)
    assert spectrum(laps.full).kernel_dim == 0


@given(seeds, degrees)
def test_up_laplacian_matches_square_root_frame_reference(seed, k):
    rng = np.random.default_rng(seed)
    p = random_pair(rng, full_gram=bool(rng.integers(2)))
    ref = persistent_up_reference(p.L.boundary(k + 1), p.J(k), p.K.inner(k).gram,
                                  p.L.inner(k).gram, p.L.inner(k + 1).gram)
    np.testing.assert_allclose(persistent_laplacians(p, k).up.op, ref, atol=1e-8)


@given(seeds, degrees)
def test_schur_route_agrees(seed, k):
    p = random_pair(np.random.default_rng(seed))
    np.testing.assert_allclose(schur_persistent_up(p, k).op, persistent_laplacians(p, k).up.op, atol=1e-8)


def test_schur_route_refuses_full_grams():
    rng = np.random.default_rng(0)
    c = ChainComplexRep.from_matrices([np.array([[1.0, -1.0]])], [np.eye(1), random_spd(rng, 2)])
    with pytest.raises(NumericalError):
        schur_persistent_up(PersistentPair.trivial(c), 0)


@given(seeds, degrees)
def test_persistent_betti_matches_exact_rational_rank(seed, k):
    p = random_pair(np.random.default_rng(seed))
    assert persistent_betti(p, k) == exact_persistent_betti(p.K.boundary(k), p.L.boundary(k + 1), p.J(k))


@given(seeds, degrees)
def test_laplacians_are_self_adjoint_and_psd(seed, k):
    rng = np.random.default_rng(seed)
    p = random_pair(rng, full_gram=bool(rng.integers(2)))
    for lap in persistent_laplacians(p, k):
        lap.check_self_adjoint()
        assert spectrum(lap).eigenvalues.min(initial=0) >= 0


@given(seeds, degrees)
def test_down_part_ignores_the_larger_complex(seed, k):
    p = random_pair(np.random.default_rng(seed))
    np.testing.assert_allclose(persistent_laplacians(p, k).down.op, down_laplacian(p.K, k).op)


@given(seeds, degrees)
def test_hodge_theorem_and_splitting(seed, k):
    rng = np.random.default_rng(seed)
    p = random_pair(rng, full_gram=bool(rng.integers(2)))
    assert hodge_check(p, k).ok
    assert splitting_check(p, k).ok
    assert hodge_decomposition_check(p.L, k).ok


@given(seeds)
def test_persistent_up_bounded_by_up_laplacian_of_k(seed):
    # d^{K,L} contains d^K, so Δ^{K,L}_+ - Δ^K_+ is PSD
    p = random_pair(np.random.default_rng(seed))
    diff = persistent_laplacians(p, 1).up.op - up_laplacian(p.K, 1).op
    w = p.K.inner(1)
    if diff.size:
        assert np.linalg.eigvalsh(w.to_orthonormal(diff)).min() >= -1e-9


def test_multiset_match_detects_size_mismatch():
    assert multiset_match([1.0], [1.0, 2.0])[0] is False
