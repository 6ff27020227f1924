"""Exception types shared across qclab."""

from __future__ import annotations


class QCLabError(Exception):
    """Base class for all qclab errors."""


class DimensionError(QCLabError, ValueError):
    pass


class BranchCut(QCLabError, ValueError):
    """An eigenphase sits on the principal-branch cut at -1."""


class InvalidAngle(QCLabError, ValueError):
    """cos(pi*alpha) is a rational value for which alpha is rational (Niven)."""


class DimensionCap(QCLabError, ValueError):
    """Dense realization requested above the 3-qubit cap."""


class BudgetExceeded(QCLabError, MemoryError):
    """Enumeration would exceed the element budget; partial results are unusable."""


class NotFound(QCLabError, LookupError):
    """No word or power resolves the target within the search range."""


class FitDegenerate(QCLabError, ValueError):
    pass


class InsufficientData(QCLabError, ValueError):
    pass


class NotGenerating(QCLabError, ValueError):
    """The distribution's commutator closure does not span the algebra."""


class HorizontalityViolation(QCLabError, ValueError):
    """Control has weight on a hard direction while q is infinite."""


class NoConvergence(QCLabError, RuntimeError):
    """No multistart met the endpoint tolerance.

    The best attempt is attached as ``estimate``.
    """

    def __init__(self, message: str, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class BracketError(QCLabError, ValueError):
    pass


class ConfigError(QCLabError, ValueError):
    pass
