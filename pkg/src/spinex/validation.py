"""Input validation and the :class:`FeatureMatrix` carrier."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exceptions import ShapeError, ValidationError


@dataclass(frozen=True)
class FeatureMatrix:
    """Dense ``n_rows x n_cols`` table of finite floats with named columns.

    ``values`` is a read-only float64 array owned by the matrix; build new
    matrices instead of mutating it.
    """

    values: np.ndarray
    column_names: tuple = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ShapeError(f"expected a 2-D table, got {values.ndim}-D")
        names = tuple(self.column_names) or default_names(values.shape[1])
        if len(names) != values.shape[1]:
            raise ValueError(
                f"{len(names)} column names given for {values.shape[1]} columns"
            )
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", names)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def hstack(self, other: "FeatureMatrix") -> "FeatureMatrix":
        """Concatenate the columns of ``other`` onto this matrix."""
        if other.n_cols == 0:
            return self
        return FeatureMatrix(
            np.hstack([self.values, other.values]),
            self.column_names + other.column_names,
        )

    def take_rows(self, index) -> "FeatureMatrix":
        return FeatureMatrix(self.values[np.asarray(index)], self.column_names)


def default_names(n_cols: int) -> tuple:
    return tuple(f"Feature{i + 1}" for i in range(n_cols))


def validate_matrix(raw, names: Optional[Sequence[str]] = None) -> FeatureMatrix:
    """Check ``raw`` and wrap it into a :class:`FeatureMatrix`.

    Accepts nested sequences, numpy arrays and pandas DataFrames (whose
    column labels are used when ``names`` is not given). Missing names are
    generated as ``Feature1 .. FeatureN``. The returned matrix holds its own
    copy of the data.

    Raises
    ------
    ShapeError
        Ragged rows, wrong dimensionality, or an empty table.
    ValidationError
        A NaN or infinite entry; ``row`` and ``col`` locate the first one.
    ValueError
        ``names`` has the wrong length or contains duplicates.
    """
    if names is None and hasattr(raw, "columns") and hasattr(raw, "to_numpy"):
        names = [str(c) for c in raw.columns]
        raw = raw.to_numpy()

    if isinstance(raw, np.ndarray):
        arr = raw
    else:
        rows = list(raw)
        widths = {len(r) if hasattr(r, "__len__") else -1 for r in rows}
        if len(widths) > 1 or -1 in widths:
            raise ShapeError("input rows have differing lengths")
        arr = np.array(rows)

    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D table, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"table must have at least one row and column, got {arr.shape}")
    try:
        arr = arr.astype(np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"non-numeric entry: {exc}") from None

    bad = ~np.isfinite(arr)
    if bad.any():
        row, col = map(int, np.argwhere(bad)[0])
        raise ValidationError(
            f"non-finite value {arr[row, col]!r} at row {row}, column {col}",
            row=row,
            col=col,
        )

    if names is not None:
        names = [str(n) for n in names]
        if len(names) != arr.shape[1]:
            raise ValueError(
                f"got {len(names)} column names for {arr.shape[1]} columns"
            )
    return FeatureMatrix(arr, tuple(names) if names is not None else ())
