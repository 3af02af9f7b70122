"""Small hand-checkable configurations used by tests, docs and the CLI.

Abstract triples are written in degrees 0, 1, 2 and audited at ``k = 1``;
every inclusion puts the smaller space in the first coordinates.
"""

from __future__ import annotations

import numpy as np

from .complexes import (ChainComplexRep, Filtration, WeightedComplex,
                        assemble, closure, inclusion, prefix_inclusion)
from .laplacians import PersistentPair


def square_with_diagonal() -> tuple[WeightedComplex, WeightedComplex]:
    """A 4-cycle ``a-b-c-d`` inside the square filled by triangles ``abc``, ``acd``."""
    big = WeightedComplex.from_simplices(closure(["abc", "acd"]))
    small = big.subcomplex(closure(["ab", "bc", "ad", "cd"]))
    return small, big


def square_with_diagonal_pair() -> PersistentPair:
    small, big = square_with_diagonal()
    k, l = assemble(small), assemble(big)
    return PersistentPair(k, l, inclusion(k, l))


def four_cycle() -> WeightedComplex:
    return WeightedComplex.from_simplices(closure([(0, 1), (1, 2), (2, 3), (0, 3)]))


def abstract_triple(chains: list[ChainComplexRep]):
    """Three chain complexes nested by prefix inclusions."""
    from .analysis import FiltrationTriple

    c1, c2, c3 = chains
    return FiltrationTriple(c1, c2, c3, prefix_inclusion(c1, c2), prefix_inclusion(c2, c3))


def coordinate_shift_triple():
    """Degree-1 spaces ``R^2 ⊂ R^3`` where the full Laplacian's second eigenvalue grows.

    Persistent Laplacians come out as ``I_2`` and ``diag(2, 1, 2)``.
    """
    d1_small = np.array([[1.0, 0.0]])
    d1 = np.array([[1.0, 0.0, -1.0]])
    d2 = np.array([[0.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    c1 = ChainComplexRep.from_matrices([d1_small, np.zeros((2, 0))])
    c2 = ChainComplexRep.from_matrices([d1, np.zeros((3, 0))])
    c3 = ChainComplexRep.from_matrices([d1, d2])
    return abstract_triple([c1, c2, c3])


def parametric_triple(r: float):
    """``R ⊂ R^2`` in degree 1 with ``d_2 = (r, -r)^T`` and ``d_1 = (1, 1)``.

    Persistent Laplacians: ``1`` and ``[[1 + r^2, 1 - r^2], [1 - r^2, 1 + r^2]]``.
    """
    c1 = ChainComplexRep.from_matrices([np.array([[1.0]]), np.zeros((1, 0))])
    c2 = ChainComplexRep.from_matrices([np.array([[1.0, 1.0]]), np.zeros((2, 0))])
    c3 = ChainComplexRep.from_matrices([np.array([[1.0, 1.0]]), np.array([[r], [-r]])])
    return abstract_triple([c1, c2, c3])


# Two triangles abc, acd glued along ac; the first stage is the triangle
# boundary abc plus the pendant edge ad.
STAGE1 = closure(["ab", "ac", "bc", "ad"])
STAGE2 = closure(["abc", "ad", "cd"])
STAGE3 = closure(["abc", "acd"])


def glued_triangles_complex() -> WeightedComplex:
    return WeightedComplex.from_simplices(STAGE3)


def glued_triangles_triple():
    """Simplicial triple where the smallest full persistent eigenvalue drops."""
    from .analysis import FiltrationTriple

    cx = glued_triangles_complex()
    chains = [assemble(cx.subcomplex(stage)) for stage in (STAGE1, STAGE2, STAGE3)]
    return FiltrationTriple(chains[0], chains[1], chains[2],
                            inclusion(chains[0], chains[1]), inclusion(chains[1], chains[2]))


def step_filtrations() -> tuple[Filtration, Filtration]:
    """Two filtrations of the glued triangles at interleaving distance 1.

    The first jumps straight from stage 1 to stage 3 at ``t = 1/2``; the
    second passes through stage 2 on ``[1/2, 3/2)``.
    """
    cx = glued_triangles_complex()
    direct, staged = {}, {}
    for s in cx.all_simplices():
        if s in STAGE1:
            direct[s] = staged[s] = 0.0
        elif s in STAGE2:
            direct[s], staged[s] = 0.5, 0.5
        else:
            direct[s], staged[s] = 0.5, 1.5
    return Filtration(cx, direct), Filtration(cx, staged)


def glued_triangles_filtration() -> tuple[Filtration, tuple[float, float, float]]:
    """The glued triangles with stage ``i`` born at ``i - 1``, plus matching thresholds."""
    cx = glued_triangles_complex()
    birth = {s: 0.0 if s in STAGE1 else 1.0 if s in STAGE2 else 2.0 for s in cx.all_simplices()}
    return Filtration(cx, birth), (0.0, 1.0, 2.0)


def square_with_diagonal_filtration() -> Filtration:
    """The square with its 4-cycle at time 0 and both triangles at time 1."""
    small, big = square_with_diagonal()
    return Filtration(big, {s: 0.0 if s in small else 1.0 for s in big.all_simplices()})
