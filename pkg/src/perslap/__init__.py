"""Persistent Laplacians of weighted simplicial complexes and cellular cosheaves."""

from .analysis import (CountingFunction, FiltrationTriple, SpectralTable,
                       counting_function, counterexample_search,
                       filtration_interleaving_distance, full_monotonicity_condition,
                       function_interleaving_distance, monotonicity_audit,
                       parametric_r_example, stability_audit)
from .complexes import (ChainComplexRep, Filtration, InclusionRep, WeightedComplex,
                        assemble, boundary_matrix, closure, inclusion, sublevel)
from .cosheaf import Cosheaf, constant_cosheaf, cosheaf_assemble, psd_realization
from .errors import (InputError, InvariantError, NotPositiveDefiniteError,
                     NotSymmetricError, NumericalError, PersLapError)
from .laplacians import (LaplacianRep, PersistentPair, Spectrum, down_laplacian,
                         full_laplacian, hodge_check, lambda_q, persistent_betti,
                         persistent_laplacians, schur_persistent_up, spectrum,
                         splitting_check, up_laplacian)
from .linalg import DEFAULT_TOL, InnerProduct, Tolerance, weighted_adjoint

__version__ = "0.1.0"

__all__ = [
    "ChainComplexRep",
    "Cosheaf",
    "CountingFunction",
    "DEFAULT_TOL",
    "Filtration",
    "FiltrationTriple",
    "InclusionRep",
    "InnerProduct",
    "InputError",
    "InvariantError",
    "LaplacianRep",
    "NotPositiveDefiniteError",
    "NotSymmetricError",
    "NumericalError",
    "PersLapError",
    "PersistentPair",
    "SpectralTable",
    "Spectrum",
    "Tolerance",
    "WeightedComplex",
    "assemble",
    "boundary_matrix",
    "closure",
    "constant_cosheaf",
    "cosheaf_assemble",
    "counterexample_search",
    "counting_function",
    "down_laplacian",
    "filtration_interleaving_distance",
    "full_laplacian",
    "full_monotonicity_condition",
    "function_interleaving_distance",
    "hodge_check",
    "inclusion",
    "lambda_q",
    "monotonicity_audit",
    "parametric_r_example",
    "persistent_betti",
    "persistent_laplacians",
    "psd_realization",
    "schur_persistent_up",
    "spectrum",
    "splitting_check",
    "stability_audit",
    "sublevel",
    "up_laplacian",
    "weighted_adjoint",
]
