import numpy as np
import pytest
from hypothesis import given, strategies as st

from perslap.complexes import (ChainComplexRep, Filtration, InclusionRep, WeightedComplex,
                               assemble, boundary_matrix, boundary_sign, check_inclusion,
                               closure, facets, inclusion, make_simplex, monotonize,
                               prefix_inclusion)
from perslap.errors import InputError, InvariantError
from perslap.generators import random_flag_complex, random_weighted_filtration

from oracles import all_cliques, signed_boundary

seeds = st.integers(0, 2**32 - 1)


def test_make_simplex_sorts_and_rejects_repeats():
    assert make_simplex("cab") == ("a", "b", "c")
    with pytest.raises(InputError):
        make_simplex([1, 1])
    with pytest.raises(InputError):
        make_simplex([])


def test_facets_and_signs_of_a_triangle():
    assert facets((0, 1, 2)) == [(1, 2), (0, 2), (0, 1)]
    assert [boundary_sign((0, 1, 2), f) for f in facets((0, 1, 2))] == [1, -1, 1]


def test_closure_of_triangle():
    assert closure([(0, 1, 2)]) == {(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)}


def test_triangle_boundary_by_hand():
    cx = WeightedComplex.from_simplices(closure([(0, 1, 2)]))
    np.testing.assert_array_equal(boundary_matrix(cx, 1), [[-1, -1, 0], [1, 0, -1], [0, 1, 1]])
    np.testing.assert_array_equal(boundary_matrix(cx, 2), [[1], [-1], [1]])


def test_unclosed_input_is_rejected():
    with pytest.raises(InputError):
        WeightedComplex.from_simplices([(0,), (0, 1)])


def test_nonpositive_weight_is_rejected():
    with pytest.raises(InputError):
        WeightedComplex.from_simplices(closure([(0, 1)]), {(0, 1): 0.0})


@given(seeds)
def test_boundary_matches_alternating_sum(seed):
    cx = random_flag_complex(np.random.default_rng(seed), max_dim=3)
    for k in range(1, cx.top_degree + 1):
        np.testing.assert_array_equal(boundary_matrix(cx, k), signed_boundary(cx.basis(k), cx.basis(k - 1)))


@given(seeds)
def test_boundary_squares_to_zero(seed):
    c = assemble(random_flag_complex(np.random.default_rng(seed), max_dim=3))
    for k in range(2, c.top + 1):
        assert not np.any(c.boundary(k - 1) @ c.boundary(k))


def test_flag_generator_matches_clique_enumeration():
    rng = np.random.default_rng(3)
    cx = random_flag_complex(rng, n_vertices=6, p_edge=0.6)
    edges = cx.basis(1)
    assert sorted(cx.all_simplices()) == sorted(all_cliques(6, edges, 2))


def test_weights_become_diagonal_gram():
    cx = WeightedComplex.from_simplices(closure([(0, 1)]), {(0,): 2.0, (1,): 3.0, (0, 1): 0.5})
    c = assemble(cx)
    np.testing.assert_array_equal(c.inner(0).gram, np.diag([2.0, 3.0]))
    np.testing.assert_array_equal(c.inner(1).gram, [[0.5]])


def test_chain_complex_rejects_nonzero_square():
    with pytest.raises(InvariantError):
        ChainComplexRep.from_matrices([np.array([[1.0, 1.0]]), np.array([[1.0], [0.0]])])


def test_label_inclusion_of_edge_into_triangle():
    big = WeightedComplex.from_simplices(closure([(0, 1, 2)]))
    small = big.subcomplex(closure([(0, 1)]))
    j = inclusion(assemble(small), assemble(big))
    np.testing.assert_array_equal(j.map(1), [[1.0], [0.0], [0.0]])
    assert j.map(2).shape == (1, 0)


def test_inclusion_with_changed_weight_is_rejected():
    big = WeightedComplex.from_simplices(closure([(0, 1)]))
    small = WeightedComplex.from_simplices([(0,)], {(0,): 2.0})
    with pytest.raises(InputError):
        inclusion(assemble(small), assemble(big))


def test_non_chain_map_is_rejected():
    c = ChainComplexRep.from_matrices([np.array([[1.0, -1.0]])])
    swap = InclusionRep({0: np.eye(1), 1: np.array([[0.0, 1.0], [1.0, 0.0]])})
    with pytest.raises(InvariantError):
        check_inclusion(c, c, swap)


def test_prefix_inclusion_dimensions():
    small = ChainComplexRep.from_matrices([np.array([[1.0]])])
    big = ChainComplexRep.from_matrices([np.array([[1.0, 1.0]])])
    assert prefix_inclusion(small, big).map(1).shape == (2, 1)


def test_filtration_rejects_face_born_late():
    cx = WeightedComplex.from_simplices(closure([(0, 1)]))
    with pytest.raises(InputError):
        Filtration(cx, {(0,): 0.0, (1,): 2.0, (0, 1): 1.0})


def test_sublevel_is_literal_and_at_is_clamped():
    cx = WeightedComplex.from_simplices(closure([(0, 1)]))
    f = Filtration(cx, {(0,): 1.0, (1,): 1.0, (0, 1): 2.0})
    assert len(f.sublevel(0.0)) == 0
    assert len(f.at(0.0)) == 2
    assert len(f.at(2.0)) == 3


@given(seeds)
def test_monotonized_births_give_subcomplexes(seed):
    rng = np.random.default_rng(seed)
    f = random_weighted_filtration(rng)
    for t in f.critical_values():
        sub = f.at(t)
        for s in sub.all_simplices():
            assert all(x in sub for x in facets(s))
    # monotonize is idempotent on monotone births
    assert monotonize(f.complex, f.birth) == f.birth


@given(seeds)
def test_subcomplex_keeps_principal_gram_block(seed):
    rng = np.random.default_rng(seed)
    cx = random_flag_complex(rng, full_gram=True)
    keep = closure(cx.basis(1)[: max(1, cx.dim(1) // 2)]) | set(cx.basis(0))
    sub = cx.subcomplex(keep)
    j = inclusion(assemble(sub), assemble(cx))
    for k in range(sub.top_degree + 1):
        big = cx.inner_product(k).gram
        np.testing.assert_allclose(j.map(k).T @ big @ j.map(k), sub.inner_product(k).gram)
