"""Reference detectors used for comparison: k-NN distance and HBOS."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, OutlierMixin
from sklearn.utils.validation import check_is_fitted

from .detector import DetectionResult
from .thresholds import fixed_threshold
from .validation import FeatureMatrix, validate_matrix

HEIGHT_FLOOR = 1e-12
_BLOCK = 256


def _values(m):
    if isinstance(m, FeatureMatrix):
        return m.values
    return validate_matrix(m).values


@dataclass(frozen=True)
class BaselineSpec:
    kind: str
    k: int = 5
    bin_count: Union[int, str] = "auto"

    def __post_init__(self):
        if self.kind not in ("knn", "hbos"):
            raise ValueError(f"unknown baseline {self.kind!r}; expected 'knn' or 'hbos'")
        if self.kind == "knn" and self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.kind == "hbos" and self.bin_count != "auto" and self.bin_count < 1:
            raise ValueError(f"bin_count must be >= 1 or 'auto', got {self.bin_count}")


def _mean_k_smallest(d: np.ndarray, k: int) -> np.ndarray:
    # stable sort: equal distances keep row order, i.e. lower index first
    return np.sort(d, axis=1, kind="stable")[:, :k].mean(axis=1)


def knn_scores(m, k: int = 5) -> np.ndarray:
    """Mean euclidean distance from each row to its ``k`` nearest other rows."""
    x = _values(m)
    n = x.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, {n - 1}] for {n} rows, got {k}")
    out = np.empty(n)
    for lo in range(0, n, _BLOCK):
        hi = min(lo + _BLOCK, n)
        d = cdist(x[lo:hi], x)
        d[np.arange(hi - lo), np.arange(lo, hi)] = np.inf
        out[lo:hi] = _mean_k_smallest(d, k)
    return out


def auto_bins(n_rows: int) -> int:
    return max(1, int(round(np.sqrt(n_rows))))


class _Histograms:
    """Equal-width per-feature histograms with max-normalised heights."""

    def __init__(self, x: np.ndarray, bins: int):
        self.bins = bins
        self.lo = x.min(axis=0)
        self.hi = x.max(axis=0)
        self.width = self.hi - self.lo
        self.heights = []
        for j in range(x.shape[1]):
            idx = self._bin(x[:, j], j)
            counts = np.bincount(idx, minlength=self.n_bins(j))
            self.heights.append(counts / counts.max())

    def n_bins(self, j):
        return 1 if self.width[j] == 0 else self.bins

    def _bin(self, col, j):
        if self.width[j] == 0:
            return np.zeros(col.size, dtype=int)
        idx = np.floor((col - self.lo[j]) / self.width[j] * self.bins).astype(int)
        # the column maximum belongs to the last bin
        return np.clip(idx, 0, self.bins - 1)

    def height(self, col, j):
        h = self.heights[j][self._bin(col, j)]
        if self.width[j] == 0:
            h = np.where(col == self.lo[j], h, 0.0)
        else:
            outside = (col < self.lo[j]) | (col > self.hi[j])
            h = np.where(outside, 0.0, h)
        return h

    def score(self, x):
        total = np.zeros(x.shape[0])
        for j in range(x.shape[1]):
            total += np.log(1.0 / (self.height(x[:, j], j) + HEIGHT_FLOOR))
        return total


def hbos_scores(m, bin_count: Union[int, str] = "auto") -> np.ndarray:
    """Histogram-based outlier score: ``sum_j log(1 / (height_j(x_j) + 1e-12))``.

    Heights are bin counts divided by the tallest bin of that feature. A
    constant feature is one bin of height 1.
    """
    x = _values(m)
    bins = auto_bins(x.shape[0]) if bin_count == "auto" else int(bin_count)
    if bins < 1:
        raise ValueError(f"bin_count must be >= 1, got {bin_count}")
    return _Histograms(x, bins).score(x)


def run_baseline(m, spec: BaselineSpec, tau: float = 98.0) -> DetectionResult:
    """Score with ``spec`` and flag rows strictly above the ``tau`` percentile."""
    if spec.kind == "knn":
        scores = knn_scores(m, spec.k)
    else:
        scores = hbos_scores(m, spec.bin_count)
    return DetectionResult.from_scores(scores, fixed_threshold(scores, tau))


class _PercentileDetector(OutlierMixin, BaseEstimator):
    def _finish_fit(self, scores):
        self.result_ = DetectionResult.from_scores(scores, fixed_threshold(scores, self.anomaly_threshold))
        self.decision_scores_ = self.result_.scores
        self.threshold_ = self.result_.threshold
        self.labels_ = self.result_.predictions
        return self

    def predict(self, X):
        return np.where(self.decision_function(X) > self.threshold_, -1, 1)

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


class KNNDetector(_PercentileDetector):
    """Average distance to the ``k`` nearest training rows.

    Training rows exclude themselves; new rows are compared with every
    training row.
    """

    def __init__(self, k=5, anomaly_threshold=98):
        self.k = k
        self.anomaly_threshold = anomaly_threshold

    def fit(self, X, y=None):
        self.train_ = _values(X)
        return self._finish_fit(knn_scores(self.train_, self.k))

    def decision_function(self, X):
        check_is_fitted(self, "train_")
        x = _values(X)
        k = min(self.k, self.train_.shape[0])
        return _mean_k_smallest(cdist(x, self.train_), k)


class HBOSDetector(_PercentileDetector):
    """Histogram-based outlier score with equal-width bins.

    Values outside the training range fall in an empty bin (height 0).
    """

    def __init__(self, n_bins="auto", anomaly_threshold=98):
        self.n_bins = n_bins
        self.anomaly_threshold = anomaly_threshold

    def fit(self, X, y=None):
        x = _values(X)
        bins = auto_bins(x.shape[0]) if self.n_bins == "auto" else int(self.n_bins)
        if bins < 1:
            raise ValueError(f"n_bins must be >= 1, got {self.n_bins}")
        self.histograms_ = _Histograms(x, bins)
        return self._finish_fit(self.histograms_.score(x))

    def decision_function(self, X):
        check_is_fitted(self, "histograms_")
        return self.histograms_.score(_values(X))
