"""Exception types shared across the package."""


class QtoaError(Exception):
    """Base class for all package errors."""


class DomainError(QtoaError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ConvergenceError(QtoaError, RuntimeError):
    """An iterative routine hit its work limit before reaching tolerance.

    Carries the best estimate so callers can decide whether to use it.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class UnsupportedRegimeError(QtoaError):
    """No closed form exists in the requested parameter regime."""


class ConsistencyError(QtoaError, RuntimeError):
    """An internal invariant failed; indicates a numerics bug, not bad input."""
