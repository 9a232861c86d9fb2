"""Exception hierarchy shared by every module.

Errors that stem from bad input subclass ``ValueError`` so callers that only
care about "the arguments were wrong" can catch that; the CLI maps them to exit
code 2. Numerical-integrity failures subclass ``ArithmeticError`` and map to
exit code 3.
"""


class OutlierRankError(Exception):
    """Base class for all package errors."""


class DomainError(OutlierRankError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class InfiniteQuantileError(DomainError):
    """A quantile was requested at probability 0 or 1."""


class BoundaryError(DomainError):
    """A density or quantile was requested on the boundary of (0, 1)."""


class QueryError(OutlierRankError, ValueError):
    """A rank query is malformed (duplicate ranks, bad indices, odd n for a median)."""


class DimensionError(OutlierRankError, ValueError):
    """Two objects that must share a dimension do not."""


class PatternError(OutlierRankError, ValueError):
    """A parameter vector does not follow the single-outlier pattern."""


class ComplexityError(OutlierRankError, RuntimeError):
    """A computation would exceed its work guard."""


class NumericalIntegrityError(OutlierRankError, ArithmeticError):
    """A computed quantity violates a bound it must satisfy."""
