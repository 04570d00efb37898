"""Detection metrics.

Labels use 0 (normal) / 1 (anomaly); predictions use 1 (normal) / -1
(anomaly). The anomaly is the positive class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import UndefinedMetricError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricRecord:
    """Precision/recall/F1/AUC for one run. ``None`` marks a failed metric."""

    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    auc: Optional[float]
    notes: tuple = field(default=())

    @property
    def status(self) -> str:
        return "ok" if not self.notes else "; ".join(self.notes)

    def get(self, metric: str) -> Optional[float]:
        return getattr(self, metric)


def _as_labels(labels) -> np.ndarray:
    labels = np.asarray(labels).ravel()
    if labels.size and not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be 0 (normal) or 1 (anomaly)")
    return labels.astype(int)


def confusion(labels, predictions) -> ConfusionCounts:
    labels = _as_labels(labels)
    predictions = np.asarray(predictions).ravel()
    if labels.size == 0 or labels.size != predictions.size:
        raise ValueError(
            f"labels and predictions must be non-empty and equal length "
            f"({labels.size} vs {predictions.size})"
        )
    if not np.isin(predictions, (1, -1)).all():
        raise ValueError("predictions must be 1 (normal) or -1 (anomaly)")
    pos = labels == 1
    flagged = predictions == -1
    return ConfusionCounts(
        tp=int(np.sum(pos & flagged)),
        fp=int(np.sum(~pos & flagged)),
        tn=int(np.sum(~pos & ~flagged)),
        fn=int(np.sum(pos & ~flagged)),
    )


def precision_recall_f1(c: ConfusionCounts):
    """``TP/(TP+FP)``, ``TP/(TP+FN)`` and ``2TP/(2TP+FP+FN)``; 0/0 is 0."""
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f1 = 2 * c.tp / (2 * c.tp + c.fp + c.fn) if c.tp + c.fp + c.fn else 0.0
    return precision, recall, f1


def undefined_notes(c: ConfusionCounts) -> tuple:
    """Diagnostics for metrics that fell back to the 0/0 rule."""
    notes = []
    if c.tp + c.fp == 0:
        notes.append("precision undefined (no predicted anomalies)")
    if c.tp + c.fn == 0:
        notes.append("recall undefined (no actual anomalies)")
    return tuple(notes)


def roc_curve(labels, scores):
    """ROC points (FPR, TPR), one step per distinct score, from (0,0) to (1,1)."""
    labels = _as_labels(labels)
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if labels.size != scores.size:
        raise ValueError(f"{labels.size} labels but {scores.size} scores")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC is undefined when only one class is present")

    order = np.argsort(-scores, kind="mergesort")
    s, y = scores[order], labels[order]
    # last index of each run of equal scores
    ends = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]
    tp = np.cumsum(y)[ends]
    fp = (ends + 1) - tp
    fpr = np.r_[0.0, fp / n_neg]
    tpr = np.r_[0.0, tp / n_pos]
    return fpr, tpr


def auc_roc(labels, scores) -> float:
    """Trapezoidal area under the ROC curve; larger scores mean more anomalous."""
    fpr, tpr = roc_curve(labels, scores)
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def evaluate(labels, predictions, scores) -> MetricRecord:
    """All four metrics; AUC failure is recorded rather than raised."""
    c = confusion(labels, predictions)
    precision, recall, f1 = precision_recall_f1(c)
    notes = list(undefined_notes(c))
    try:
        auc = auc_roc(labels, scores)
    except UndefinedMetricError as exc:
        auc = None
        notes.append(f"auc failed: {exc}")
    return MetricRecord(precision, recall, f1, auc, tuple(notes))
