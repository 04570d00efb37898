"""SPINEX: similarity-based anomaly detection with feature explanations.

Pipeline: validate -> optional scaling -> optional interaction columns ->
optional variance weights -> distance-profile scores -> threshold.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, OutlierMixin
from sklearn.utils.validation import check_is_fitted

from .preprocessing import SCALING_METHODS, ColumnScaler, precompute_interactions
from .scoring import (
    DISTANCE_METRICS,
    compute_scores,
    compute_weights,
    profile_scores,
    weighted_values,
)
from .thresholds import THRESHOLD_METHODS, compute_threshold
from .validation import FeatureMatrix, validate_matrix

EXPLAINABILITY_LEVELS = ("basic", "advanced")


@dataclass(frozen=True)
class DetectorConfig:
    """Every detector knob, with the reference defaults."""

    use_weights: bool = False
    include_interactions: bool = False
    use_nonlinear: bool = False
    distance_metric: str = "euclidean"
    minkowski_p: float = 2.0
    scaling_method: Optional[str] = None
    anomaly_threshold: float = 98.0
    threshold_method: str = "fixed"
    multiplier: float = 2.0
    window_size: int = 50
    quantile: float = 0.95
    worker_count: int = 1
    explainability_level: str = "basic"

    def __post_init__(self):
        if self.distance_metric not in DISTANCE_METRICS:
            raise ValueError(
                f"unknown distance metric {self.distance_metric!r}; "
                f"expected one of {', '.join(DISTANCE_METRICS)}"
            )
        if not self.minkowski_p > 0:
            raise ValueError(f"minkowski exponent must be > 0, got {self.minkowski_p}")
        if self.scaling_method is not None and self.scaling_method not in SCALING_METHODS:
            raise ValueError(
                f"Invalid scaling method: {self.scaling_method}. "
                f"Valid options are: {', '.join(SCALING_METHODS)}"
            )
        if not 0 <= self.anomaly_threshold <= 100:
            raise ValueError("Anomaly threshold must be between 0 and 100")
        if self.threshold_method not in THRESHOLD_METHODS:
            raise ValueError(
                f"Unknown threshold method: {self.threshold_method!r}; "
                f"expected one of {', '.join(THRESHOLD_METHODS)}"
            )
        if self.window_size < 1:
            raise ValueError(f"window_size must be >= 1, got {self.window_size}")
        if not 0 < self.quantile < 1:
            raise ValueError(f"quantile must be in (0, 1), got {self.quantile}")
        if self.worker_count < 1:
            raise ValueError(f"worker_count must be >= 1, got {self.worker_count}")
        if self.explainability_level not in EXPLAINABILITY_LEVELS:
            raise ValueError(
                f"explainability_level must be one of {', '.join(EXPLAINABILITY_LEVELS)}"
            )

    def to_dict(self, include_execution=False):
        """Plain-dict form; ``worker_count`` only if ``include_execution``.

        The worker count never changes results, so reports leave it out to
        stay byte-identical across runs with different parallelism.
        """
        d = asdict(self)
        if not include_execution:
            d.pop("worker_count")
        return d


@dataclass(frozen=True)
class DetectionResult:
    scores: np.ndarray
    threshold: float
    flagged: tuple
    predictions: np.ndarray

    @classmethod
    def from_scores(cls, scores, threshold) -> "DetectionResult":
        scores = np.asarray(scores, dtype=np.float64)
        mask = scores > threshold
        predictions = np.where(mask, -1, 1)
        return cls(scores, float(threshold), tuple(int(i) for i in np.flatnonzero(mask)), predictions)


@dataclass(frozen=True)
class ExplanationEntry:
    feature: str
    value: float
    baseline: float
    contribution: float

    def __str__(self):
        return (f"{self.feature}: {self.value:.2f} "
                f"(baseline: {self.baseline:.2f}, contribution: {self.contribution:.2f})")


@dataclass(frozen=True)
class Explanation:
    row_index: int
    entries: List[ExplanationEntry] = field(default_factory=list)

    def format(self) -> str:
        lines = [f"Anomaly at index {self.row_index}:"]
        lines += [f"- {e}" for e in self.entries]
        return "\n".join(lines)

    def to_dict(self):
        return {"row_index": self.row_index, "entries": [asdict(e) for e in self.entries]}


def explain(m: FeatureMatrix, flagged: Sequence[int], baseline=None) -> List[Explanation]:
    """Per-feature contributions ``|value - baseline|`` for each flagged row.

    ``m`` must hold the original (unscaled, un-augmented) features. The
    baseline defaults to the column means of ``m``. Entries are sorted by
    contribution, largest first; ties keep column order.
    """
    values = m.values
    if baseline is None:
        baseline = values.mean(axis=0)
    out = []
    for idx in flagged:
        idx = int(idx)
        if not 0 <= idx < m.n_rows:
            raise ValueError(f"row index {idx} out of range for {m.n_rows} rows")
        row = values[idx]
        contrib = np.abs(row - baseline)
        order = np.argsort(-contrib, kind="stable")
        entries = [
            ExplanationEntry(m.column_names[j], float(row[j]), float(baseline[j]), float(contrib[j]))
            for j in order
        ]
        out.append(Explanation(idx, entries))
    return out


def format_explanations(explanations: Sequence[Explanation]) -> str:
    return "\n\n".join(e.format() for e in explanations)


class _Pipeline:
    """Fitted transformation from raw features to the distance space."""

    def __init__(self, config: DetectorConfig, original: FeatureMatrix):
        self.config = config
        self.scaler = (
            ColumnScaler.fit(original.values, config.scaling_method)
            if config.scaling_method is not None else None
        )
        work = self.working_matrix(original.values, original.column_names)
        self.working_names = work.column_names
        self.weights = compute_weights(work) if config.use_weights else None
        self.reference = weighted_values(work, self.weights)

    def working_matrix(self, values, names) -> FeatureMatrix:
        x = values if self.scaler is None else self.scaler.transform(values)
        work = FeatureMatrix(x, names)
        if self.config.include_interactions:
            work = work.hstack(precompute_interactions(work, self.config.use_nonlinear))
        return work

    def transform(self, values, names) -> np.ndarray:
        return weighted_values(self.working_matrix(values, names), self.weights)


def _threshold(scores, config: DetectorConfig) -> float:
    return compute_threshold(
        scores,
        config.threshold_method,
        tau=config.anomaly_threshold,
        multiplier=config.multiplier,
        window_size=config.window_size,
        quantile=config.quantile,
    )


def _run(m: FeatureMatrix, config: DetectorConfig):
    pipe = _Pipeline(config, m)
    scores, baseline = compute_scores(
        pipe.reference,
        metric=config.distance_metric,
        p=config.minkowski_p,
        workers=config.worker_count,
        return_baseline=True,
    )
    return pipe, baseline, DetectionResult.from_scores(scores, _threshold(scores, config))


def detect(m, config: Optional[DetectorConfig] = None) -> DetectionResult:
    """Score every row of ``m`` and flag those above the configured threshold.

    ``m`` may be a :class:`FeatureMatrix` or anything :func:`validate_matrix`
    accepts.
    """
    config = config or DetectorConfig()
    if not isinstance(m, FeatureMatrix):
        m = validate_matrix(m)
    return _run(m, config)[2]


def _summary(values) -> dict:
    return {
        "mean": values.mean(axis=0).tolist(),
        "std": values.std(axis=0).tolist(),
        "min": values.min(axis=0).tolist(),
        "max": values.max(axis=0).tolist(),
    }


class SPINEX(OutlierMixin, BaseEstimator):
    """Similarity-based anomaly detector with explainable neighbours.

    Scores a row by how much its distances to all training rows deviate
    from the average distance profile of the training set. ``fit`` scores
    the training rows and fixes the threshold; ``decision_function`` and
    ``predict`` score new rows against the same reference.

    Parameters
    ----------
    use_weights : bool, default=False
        Weight each working column by its variance (plus ``1e-8``).
    include_interactions : bool, default=False
        Append pairwise products of the (scaled) features before measuring
        distances.
    distance_metric : {"euclidean", "manhattan", "minkowski"}, default="euclidean"
    use_nonlinear : bool, default=False
        Also append ``sqrt(|x|)`` / ``log1p(x)`` transforms of each product.
    scaling_method : {"standard", "minmax", "robust"} or None, default=None
    explainability_level : {"basic", "advanced"}, default="basic"
        ``"advanced"`` additionally stores per-column summaries of the
        original and working matrices in ``transformations_``.
    anomaly_threshold : float, default=98
        Percentile used by the ``"fixed"`` threshold.
    threshold_method : {"fixed", "statistical", "adaptive_quantile"}, default="fixed"
    multiplier : float, default=2
        Standard-deviation multiplier of the ``"statistical"`` threshold.
    window_size : int, default=50
        Trailing window of the ``"adaptive_quantile"`` threshold.
    quantile : float, default=0.95
        Quantile of the ``"adaptive_quantile"`` threshold.
    p : float, default=2
        Minkowski exponent.
    n_jobs : int, default=1
        Threads used for the distance computation. Results do not depend on it.

    Attributes
    ----------
    decision_scores_ : ndarray of shape (n_samples,)
        Anomaly scores of the training rows; larger is more anomalous.
    threshold_ : float
    flagged_ : tuple of int
        Training rows with score strictly above ``threshold_``.
    labels_ : ndarray of shape (n_samples,)
        ``-1`` for flagged rows, ``1`` otherwise.
    result_ : DetectionResult
    column_names_ : tuple of str
    """

    def __init__(self, use_weights=False, include_interactions=False,
                 distance_metric="euclidean", use_nonlinear=False, scaling_method=None,
                 explainability_level="basic", anomaly_threshold=98,
                 threshold_method="fixed", multiplier=2.0, window_size=50,
                 quantile=0.95, p=2.0, n_jobs=1):
        self.use_weights = use_weights
        self.include_interactions = include_interactions
        self.distance_metric = distance_metric
        self.use_nonlinear = use_nonlinear
        self.scaling_method = scaling_method
        self.explainability_level = explainability_level
        self.anomaly_threshold = anomaly_threshold
        self.threshold_method = threshold_method
        self.multiplier = multiplier
        self.window_size = window_size
        self.quantile = quantile
        self.p = p
        self.n_jobs = n_jobs

    @classmethod
    def from_config(cls, config: DetectorConfig) -> "SPINEX":
        return cls(
            use_weights=config.use_weights,
            include_interactions=config.include_interactions,
            distance_metric=config.distance_metric,
            use_nonlinear=config.use_nonlinear,
            scaling_method=config.scaling_method,
            explainability_level=config.explainability_level,
            anomaly_threshold=config.anomaly_threshold,
            threshold_method=config.threshold_method,
            multiplier=config.multiplier,
            window_size=config.window_size,
            quantile=config.quantile,
            p=config.minkowski_p,
            n_jobs=config.worker_count,
        )

    def get_config(self) -> DetectorConfig:
        return DetectorConfig(
            use_weights=bool(self.use_weights),
            include_interactions=bool(self.include_interactions),
            use_nonlinear=bool(self.use_nonlinear),
            distance_metric=self.distance_metric,
            minkowski_p=float(self.p),
            scaling_method=self.scaling_method,
            anomaly_threshold=float(self.anomaly_threshold),
            threshold_method=self.threshold_method,
            multiplier=float(self.multiplier),
            window_size=int(self.window_size),
            quantile=float(self.quantile),
            worker_count=int(self.n_jobs),
            explainability_level=self.explainability_level,
        )

    def fit(self, X, y=None, column_names=None):
        """Score the training rows and fix the threshold. ``y`` is ignored."""
        config = self.get_config()
        if isinstance(X, FeatureMatrix):
            m = X if column_names is None else FeatureMatrix(X.values, tuple(column_names))
        else:
            m = validate_matrix(X, column_names)
        pipe, baseline, result = _run(m, config)

        self.config_ = config
        self._pipeline = pipe
        self.distance_baseline_ = baseline
        self.original_ = m
        self.column_names_ = m.column_names
        self.n_features_in_ = m.n_cols
        self.feature_baseline_ = m.values.mean(axis=0)
        self.working_names_ = pipe.working_names
        self.weights_ = pipe.weights
        self.result_ = result
        self.decision_scores_ = result.scores
        self.threshold_ = result.threshold
        self.flagged_ = result.flagged
        self.labels_ = result.predictions
        if config.explainability_level == "advanced":
            self.transformations_ = {
                "original": dict(columns=list(m.column_names), **_summary(m.values)),
                "working": dict(columns=list(pipe.working_names), **_summary(pipe.reference)),
            }
        return self

    def _queries(self, X):
        check_is_fitted(self, "result_")
        m = X if isinstance(X, FeatureMatrix) else validate_matrix(X, self.column_names_)
        if m.n_cols != self.n_features_in_:
            raise ValueError(f"X has {m.n_cols} features, detector was fitted with {self.n_features_in_}")
        return self._pipeline.transform(m.values, self.column_names_)

    def decision_function(self, X):
        """Anomaly scores of ``X`` against the training reference (larger = more anomalous)."""
        cfg = self.config_
        return profile_scores(
            self._queries(X), self._pipeline.reference, self.distance_baseline_,
            cfg.distance_metric, cfg.minkowski_p, cfg.worker_count,
        )

    def score_samples(self, X):
        """Opposite of :meth:`decision_function`, following the scikit-learn sign convention."""
        return -self.decision_function(X)

    def predict(self, X):
        """``-1`` for rows scoring strictly above ``threshold_``, ``1`` otherwise."""
        return np.where(self.decision_function(X) > self.threshold_, -1, 1)

    def fit_predict(self, X, y=None, **kwargs):
        return self.fit(X, y, **kwargs).labels_

    def explain(self, indices=None) -> List[Explanation]:
        """Feature contributions for training rows (default: the flagged ones)."""
        check_is_fitted(self, "result_")
        if indices is None:
            indices = self.flagged_
        return explain(self.original_, indices, self.feature_baseline_)
