"""Exception hierarchy.

The CLI maps these onto exit codes, so keep the split between input
problems, numerical breakdowns and violated invariants.
"""


class PersLapError(Exception):
    """Base class for all package errors."""


class InputError(PersLapError, ValueError):
    """Malformed input: bad shapes, non-closed complexes, parse failures."""


class NumericalError(PersLapError, ArithmeticError):
    """A numerical routine could not produce a trustworthy answer."""


class NotPositiveDefiniteError(NumericalError):
    pass


class NotSymmetricError(NumericalError):
    pass


class InvariantError(PersLapError, AssertionError):
    """A structural identity that must hold by construction failed."""
