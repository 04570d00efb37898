"""Column scaling and pairwise feature interactions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .thresholds import percentile
from .validation import FeatureMatrix

SCALING_METHODS = ("standard", "minmax", "robust")


@dataclass(frozen=True)
class ColumnScaler:
    """Per-column affine map ``x' = (x - center) / scale``.

    Columns that were constant at fit time get ``center`` equal to their
    value and ``scale`` 1, so they map to exactly zero.
    """

    method: str
    center: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, values, method: str) -> "ColumnScaler":
        if method not in SCALING_METHODS:
            raise ValueError(
                f"Invalid scaling method: {method}. Valid options are: {', '.join(SCALING_METHODS)}"
            )
        x = np.asarray(values, dtype=np.float64)
        if method == "standard":
            center = x.mean(axis=0)
            scale = x.std(axis=0)
        elif method == "minmax":
            center = x.min(axis=0)
            scale = x.max(axis=0) - center
        else:
            q1 = np.array([percentile(col, 25) for col in x.T])
            q3 = np.array([percentile(col, 75) for col in x.T])
            center, scale = q1, q3 - q1

        constant = x.max(axis=0) == x.min(axis=0)
        center = np.where(constant, x[0], center)
        # a zero spread on a non-constant column (robust IQR) leaves it unscaled
        scale = np.where(constant | (scale == 0), 1.0, scale)
        return cls(method, center, scale)

    def transform(self, values) -> np.ndarray:
        return (np.asarray(values, dtype=np.float64) - self.center) / self.scale


def apply_scaling(m: FeatureMatrix, method: str) -> FeatureMatrix:
    """Scale every column of ``m`` with ``method`` (standard, minmax or robust).

    Standard scaling uses the population standard deviation; robust scaling
    uses the interquartile range. Constant columns become all zero.
    """
    scaler = ColumnScaler.fit(m.values, method)
    return FeatureMatrix(scaler.transform(m.values), m.column_names)


def select_transformation(col) -> np.ndarray:
    """``sqrt(|x|)`` if any entry is <= 0, else ``log1p(x)``.

    The branch is picked once for the whole column.
    """
    col = np.asarray(col, dtype=np.float64)
    if np.any(col <= 0):
        return np.sqrt(np.abs(col))
    return np.log1p(col)


def interaction_count(n_features: int, use_nonlinear: bool) -> int:
    count = n_features * (n_features - 1) // 2
    return 2 * count if use_nonlinear else count


def precompute_interactions(m: FeatureMatrix, use_nonlinear: bool = False) -> FeatureMatrix:
    """Pairwise product columns for every ``i < j``.

    Columns come in pair order; with ``use_nonlinear`` each linear product is
    followed by its transformed counterpart.
    """
    x = m.values
    n = m.n_cols
    cols, names = [], []
    for i in range(n):
        for j in range(i + 1, n):
            prod = x[:, i] * x[:, j]
            cols.append(prod)
            names.append(f"Interaction_{i + 1}_{j + 1}_linear")
            if use_nonlinear:
                cols.append(select_transformation(prod))
                names.append(f"Interaction_{i + 1}_{j + 1}_nonlinear")
    values = np.column_stack(cols) if cols else np.empty((m.n_rows, 0))
    assert values.shape[1] == interaction_count(n, use_nonlinear)
    return FeatureMatrix(values, tuple(names))
