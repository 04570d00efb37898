"""Weighted pairwise distances and distance-profile anomaly scores.

A row's score is how far its distance profile (distances to every row of
the reference set) deviates, in L1, from the mean profile.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import DegenerateInputError
from .validation import FeatureMatrix

DISTANCE_METRICS = ("euclidean", "manhattan", "minkowski")
WEIGHT_FLOOR = 1e-8

# Rows per distance block. Fixed so the block layout, and with it every
# floating-point reduction, does not depend on the worker count.
CHUNK_ROWS = 256
# Above this many pairwise entries the distance blocks are recomputed in
# the second pass instead of being kept in memory.
_CACHE_LIMIT = 4_000_000


def compute_weights(work) -> np.ndarray:
    """Population variance of each column plus a ``1e-8`` floor."""
    values = work.values if isinstance(work, FeatureMatrix) else np.asarray(work, dtype=np.float64)
    return values.var(axis=0) + WEIGHT_FLOOR


def _cdist_args(metric: str, p: float):
    if metric == "euclidean":
        return {"metric": "euclidean"}
    if metric == "manhattan":
        return {"metric": "cityblock"}
    if metric == "minkowski":
        if not p > 0:
            raise ValueError(f"minkowski exponent must be > 0, got {p}")
        return {"metric": "minkowski", "p": p}
    raise ValueError(
        f"unknown distance metric {metric!r}; expected one of {', '.join(DISTANCE_METRICS)}"
    )


def weighted_values(work, weights=None) -> np.ndarray:
    """Rows premultiplied by ``sqrt(weights)``, the space distances are taken in."""
    values = work.values if isinstance(work, FeatureMatrix) else np.asarray(work, dtype=np.float64)
    if weights is None:
        return values
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (values.shape[1],):
        raise ValueError(
            f"weight vector has length {weights.size}, matrix has {values.shape[1]} columns"
        )
    return values * np.sqrt(weights)


def row_distances(work, row_index: int, weights=None, metric: str = "euclidean",
                  p: float = 2.0) -> np.ndarray:
    """Distances from row ``row_index`` of ``work`` to every row of ``work``.

    With weights, ``d(r, x) = metric(sqrt(w) * r, sqrt(w) * x)``; for the
    euclidean metric that is ``sqrt(sum_i w_i (r_i - x_i)**2)``.
    """
    w = weighted_values(work, weights)
    if not 0 <= row_index < w.shape[0]:
        raise ValueError(f"row index {row_index} out of range for {w.shape[0]} rows")
    return cdist(w[row_index:row_index + 1], w, **_cdist_args(metric, p))[0]


def _blocks(n: int):
    return [(start, min(start + CHUNK_ROWS, n)) for start in range(0, n, CHUNK_ROWS)]


def _map_blocks(fn, blocks, workers: int):
    if workers <= 1 or len(blocks) == 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def _canonical_sum(a: np.ndarray) -> np.ndarray:
    """Row sums taken in ascending-value order.

    The result depends only on each row's multiset of values, which makes
    scores exactly equivariant under row permutations.
    """
    return np.sort(a, axis=1).sum(axis=1)


def distance_baseline(reference, metric="euclidean", p=2.0, workers=1) -> np.ndarray:
    """Mean distance profile: ``b[k]`` is the mean of column ``k`` of the
    reference self-distance table.

    The table is exactly symmetric (each pair is evaluated from the same
    operands), so column ``k`` is read as row ``k``.
    """
    args = _cdist_args(metric, p)
    n = reference.shape[0]
    parts = _map_blocks(
        lambda b: _canonical_sum(cdist(reference[b[0]:b[1]], reference, **args)) / n,
        _blocks(n), workers,
    )
    return np.concatenate(parts)


def profile_scores(queries, reference, baseline, metric="euclidean", p=2.0,
                   workers=1) -> np.ndarray:
    """``sum_k |d(query, reference_k) - baseline_k|`` for every query row."""
    args = _cdist_args(metric, p)

    def block(bounds):
        lo, hi = bounds
        return _canonical_sum(np.abs(cdist(queries[lo:hi], reference, **args) - baseline))

    parts = _map_blocks(block, _blocks(queries.shape[0]), workers)
    return np.concatenate(parts) if parts else np.empty(0)


def compute_scores(work, weights=None, metric: str = "euclidean", p: float = 2.0,
                   workers: int = 1, return_baseline: bool = False):
    """Anomaly score of every row of the working matrix.

    Let ``D[i, k]`` be the (optionally weighted) distance between rows ``i``
    and ``k`` and ``b[k]`` the mean of column ``k`` of ``D``. The score of
    row ``i`` is ``sum_k |D[i, k] - b[k]|``.

    Rows are processed in fixed-size blocks spread over ``workers`` threads
    and reassembled in row order; all sums run in sorted-value order. The
    output is therefore bit-identical for any worker count and exactly
    permutation-equivariant.

    Parameters
    ----------
    work : FeatureMatrix or array of shape (n, d)
        Working matrix (already scaled / augmented).
    weights : array of shape (d,), optional
        Per-column weights; rows are multiplied by ``sqrt(weights)``.
    metric : {"euclidean", "manhattan", "minkowski"}
    p : float
        Minkowski exponent, ignored by the other metrics.
    workers : int
        Number of threads.
    return_baseline : bool
        Also return the mean distance profile ``b``.

    Returns
    -------
    scores : ndarray of shape (n,)
    baseline : ndarray of shape (n,), only if ``return_baseline``
    """
    w = weighted_values(work, weights)
    n = w.shape[0]
    if n < 2:
        raise DegenerateInputError("need at least two rows to compare distances")
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    args = _cdist_args(metric, p)
    blocks = _blocks(n)

    if n * n <= _CACHE_LIMIT:
        dists = _map_blocks(lambda b: cdist(w[b[0]:b[1]], w, **args), blocks, workers)
        baseline = np.concatenate([_canonical_sum(d) / n for d in dists])
        scores = np.concatenate(
            _map_blocks(lambda d: _canonical_sum(np.abs(d - baseline)), dists, workers)
        )
    else:
        baseline = distance_baseline(w, metric, p, workers)
        scores = profile_scores(w, w, baseline, metric, p, workers)

    if return_baseline:
        return scores, baseline
    return scores
