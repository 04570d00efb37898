"""Score-to-threshold rules.

Every rule returns a single float; rows whose score is strictly greater
than it are flagged.
"""

import math

import numpy as np

THRESHOLD_METHODS = ("fixed", "statistical", "adaptive_quantile")


def percentile(values, q):
    """Linear-interpolation percentile of ``values`` at ``q`` in [0, 100].

    Sorts ascending into ``s[0..m-1]``, sets ``p = q/100 * (m-1)`` and
    returns ``s[floor(p)] + (p - floor(p)) * (s[ceil(p)] - s[floor(p)])``.
    """
    s = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if s.size == 0:
        raise ValueError("cannot take a percentile of an empty array")
    if not 0 <= q <= 100:
        raise ValueError(f"percentile must be in [0, 100], got {q}")
    p = (q / 100.0) * (s.size - 1)
    lo = math.floor(p)
    hi = math.ceil(p)
    return float(s[lo] + (p - lo) * (s[hi] - s[lo]))


def fixed_threshold(scores, tau=98.0):
    """Percentile ``tau`` of the scores, ignoring NaN entries."""
    if not 0 <= tau <= 100:
        raise ValueError("Anomaly threshold must be between 0 and 100")
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if scores.size == 0:
        raise ValueError("Scores array is empty.")
    scores = scores[~np.isnan(scores)]
    if scores.size == 0:
        raise ValueError("Scores array contains only NaN values.")
    return percentile(scores, tau)


def statistical_threshold(scores, multiplier=2.0):
    """Mean plus ``multiplier`` sample standard deviations (divisor m-1).

    A single score has standard deviation 0 by definition.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if scores.size == 0:
        raise ValueError("Scores array is empty.")
    mean = float(scores.mean())
    std = float(scores.std(ddof=1)) if scores.size > 1 else 0.0
    return mean + multiplier * std


def adaptive_quantile_threshold(scores, window_size=50, quantile=0.95):
    """Percentile ``quantile * 100`` of the trailing ``window_size`` scores.

    When there are no more than ``window_size`` scores, all of them are used.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if scores.size == 0:
        raise ValueError("Scores array is empty.")
    if window_size < 1:
        raise ValueError(f"window_size must be >= 1, got {window_size}")
    if not 0 < quantile < 1:
        raise ValueError(f"quantile must be in (0, 1), got {quantile}")
    if scores.size > window_size:
        scores = scores[-window_size:]
    return percentile(scores, quantile * 100)


def compute_threshold(scores, method="fixed", *, tau=98.0, multiplier=2.0,
                      window_size=50, quantile=0.95):
    if method == "fixed":
        return fixed_threshold(scores, tau)
    if method == "statistical":
        return statistical_threshold(scores, multiplier)
    if method == "adaptive_quantile":
        return adaptive_quantile_threshold(scores, window_size, quantile)
    raise ValueError(
        f"Unknown threshold method: {method!r}; expected one of {', '.join(THRESHOLD_METHODS)}"
    )
