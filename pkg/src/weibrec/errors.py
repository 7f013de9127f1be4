"""Exception types raised by weibrec."""

from __future__ import annotations


class WeibullRecordsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDataError(WeibullRecordsError):
    """Input data violates a structural requirement.

    Raised for non-positive values, non-increasing record sequences,
    malformed input files, and out-of-range parameters.
    """


class DegenerateDataError(InvalidDataError):
    """Data is structurally valid but leaves a quantity undefined.

    The canonical case is a record series with a single value, for which
    the shape estimate has a zero-valued denominator.
    """


class SingularInformationError(WeibullRecordsError):
    """The observed information matrix is not positive definite.

    Standard errors cannot be extracted by inverting the curvature at
    the reported optimum.
    """


class BracketError(WeibullRecordsError):
    """A root of the pivotal equation could not be bracketed.

    Carries enough context to identify the offending Monte Carlo
    replicate and the sign of the equation at both bracket endpoints.
    """

    def __init__(self, message: str, *, replicate: int | None = None,
                 lo: float | None = None, hi: float | None = None,
                 g_lo: float | None = None, g_hi: float | None = None):
        super().__init__(message)
        self.replicate = replicate
        self.lo = lo
        self.hi = hi
        self.g_lo = g_lo
        self.g_hi = g_hi


class InsufficientDrawsError(InvalidDataError):
    """Too few Monte Carlo draws for the requested percentile bounds."""
