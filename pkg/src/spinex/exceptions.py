"""Exception types raised across the package.

All of them derive from :class:`ValueError` so callers that only care about
"bad input" can catch that alone.
"""


class SpinexError(ValueError):
    """Base class for domain errors."""


class ShapeError(SpinexError):
    """Input is not a rectangular 2-D table of the expected size."""


class ValidationError(SpinexError):
    """A value failed validation (non-finite entry, bad label, ...)."""

    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class DegenerateInputError(SpinexError):
    """Input is well-formed but too small to carry the requested structure."""


class UndefinedMetricError(SpinexError):
    """A metric is undefined for the given labels (e.g. AUC on one class)."""


class AggregationError(SpinexError):
    """Benchmark results cannot be aggregated into a ranking."""
