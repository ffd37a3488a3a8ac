"""Exception types raised across the package.

Input problems derive from ``ValueError``; numerical breakdowns derive from
:class:`NumericalError` so callers (the CLI in particular) can tell them apart.
"""

from __future__ import annotations


class NumericalError(ArithmeticError):
    """Base class for failures of a numerical procedure on valid input."""


class DimensionMismatchError(ValueError):
    pass


class ZeroRowError(ValueError):
    """A row of the system matrix has (numerically) zero norm."""

    def __init__(self, index: int):
        super().__init__(f"row {index} has zero norm")
        self.index = index


class ZeroVectorError(ValueError):
    pass


class InvalidDistributionError(ValueError):
    pass


class ZeroDesignError(ValueError):
    pass


class NonPositiveTError(ValueError):
    pass


class NotPositiveDefiniteError(NumericalError):
    pass


class RankDeficientError(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    """An iterative method hit its iteration cap.

    ``result`` carries the best iterate found so far when one exists.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result
