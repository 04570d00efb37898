"""Seeded synthetic datasets with planted gaussian outliers.

Normal rows are drawn from ``N(0, cov_scale * I)`` and outliers from
``N(mean_shift * 1, cov_scale * I)``; optional complexity columns are
appended and rows shuffled together with their labels.

Random numbers come from :class:`SeededRNG`, which reads raw 64-bit words
from numpy's PCG64 bit generator (whose stream is fixed by numpy's
compatibility policy) and derives everything else itself:

* uniforms: the top 53 bits of a word, ``(w >> 11) * 2**-53`` in ``[0, 1)``;
* normals: Box-Muller on pairs of uniforms;
* shuffles: Fisher-Yates, ``j = floor(u * (i + 1))`` for ``i = n-1 .. 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import FeatureMatrix

_TWO_POW_53 = float(2 ** 53)


class SeededRNG:
    """Portable generator built on raw PCG64 output."""

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {seed}")
        self._bits = np.random.PCG64(seed)

    def uniform(self, size) -> np.ndarray:
        """Uniform doubles in ``[0, 1)``."""
        n = int(np.prod(size))
        raw = self._bits.random_raw(n) if n else np.empty(0, dtype=np.uint64)
        return ((raw >> np.uint64(11)).astype(np.float64) / _TWO_POW_53).reshape(size)

    def normal(self, size) -> np.ndarray:
        """Standard normal variates via Box-Muller."""
        n = int(np.prod(size))
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs)
        u1 = 1.0 - u[:pairs]  # (0, 1], keeps the log finite
        u2 = u[pairs:]
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(2.0 * np.pi * u2)
        z[1::2] = r * np.sin(2.0 * np.pi * u2)
        return z[:n].reshape(size)

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of ``range(n)``."""
        perm = np.arange(n)
        if n < 2:
            return perm
        u = self.uniform(n - 1)
        for k, i in enumerate(range(n - 1, 0, -1)):
            j = int(u[k] * (i + 1))
            perm[i], perm[j] = perm[j], perm[i]
        return perm


@dataclass(frozen=True)
class ScenarioSpec:
    mean_shift: float
    cov_scale: float
    outlier_fraction: float
    num_features: int
    complexity_level: int
    size: int
    seed: int = 0

    def __post_init__(self):
        if not self.cov_scale > 0:
            raise ValueError(f"cov_scale must be > 0, got {self.cov_scale}")
        if not 0 <= self.outlier_fraction <= 1:
            raise ValueError(f"outlier_fraction must be in [0, 1], got {self.outlier_fraction}")
        if self.num_features < 1:
            raise ValueError(f"num_features must be >= 1, got {self.num_features}")
        if self.complexity_level not in (0, 1, 2):
            raise ValueError(f"complexity_level must be 0, 1 or 2, got {self.complexity_level}")
        if self.complexity_level >= 1 and self.num_features < 2:
            raise ValueError("complexity_level >= 1 needs at least two features")
        if self.size < 2:
            raise ValueError(f"size must be >= 2, got {self.size}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.n_outliers >= self.size:
            raise ValueError("outlier_fraction leaves no normal rows")

    @property
    def n_outliers(self) -> int:
        return math.ceil(self.outlier_fraction * self.size)

    @property
    def n_columns(self) -> int:
        d = self.num_features
        return {0: d, 1: d + 1, 2: 3 * d + 1}[self.complexity_level]

    def with_seed(self, seed: int) -> "ScenarioSpec":
        return ScenarioSpec(self.mean_shift, self.cov_scale, self.outlier_fraction,
                            self.num_features, self.complexity_level, self.size, seed)


@dataclass(frozen=True)
class LabeledDataset:
    matrix: FeatureMatrix
    labels: np.ndarray


def augment_complexity(m, level: int):
    """Append complexity columns.

    Level 1 appends ``f1 * f2``; level 2 further appends ``f_i**2`` then
    ``sin(f_i)`` for every base feature. Accepts a FeatureMatrix (new
    columns continue the ``FeatureN`` naming) or a plain array.
    """
    values = m.values if isinstance(m, FeatureMatrix) else np.asarray(m, dtype=np.float64)
    if level not in (0, 1, 2):
        raise ValueError(f"complexity level must be 0, 1 or 2, got {level}")
    d = values.shape[1]
    if level >= 1 and d < 2:
        raise ValueError("complexity level >= 1 needs at least two features")
    cols = [values]
    if level >= 1:
        cols.append(values[:, :1] * values[:, 1:2])
    if level >= 2:
        cols.append(values ** 2)
        cols.append(np.sin(values))
    out = np.hstack(cols)
    if not isinstance(m, FeatureMatrix):
        return out
    extra = tuple(f"Feature{j + 1}" for j in range(d, out.shape[1]))
    return FeatureMatrix(out, m.column_names + extra)


def generate_scenario(spec: ScenarioSpec) -> LabeledDataset:
    """Draw one labelled dataset; equal specs give bit-identical output."""
    rng = SeededRNG(spec.seed)
    d = spec.num_features
    n_out = spec.n_outliers
    n_norm = spec.size - n_out
    sd = math.sqrt(spec.cov_scale)

    normals = sd * rng.normal((n_norm, d))
    outliers = spec.mean_shift + sd * rng.normal((n_out, d))
    data = augment_complexity(np.vstack([normals, outliers]), spec.complexity_level)
    labels = np.concatenate([np.zeros(n_norm, dtype=int), np.ones(n_out, dtype=int)])

    perm = rng.permutation(spec.size)
    return LabeledDataset(FeatureMatrix(data[perm]), labels[perm])


# mean_shift, cov_scale, outlier_fraction, num_features, complexity_level, size
_CATALOG = [
    (4, 1.2, 0.03, 3, 0, 100),
    (-1, 0.7, 0.04, 9, 1, 350),
    (5, 1.1, 0.12, 5, 2, 8000),
    (-4, 0.6, 0.08, 3, 0, 550),
    (2, 2.5, 0.07, 11, 0, 120),
    (-3, 0.3, 0.18, 19, 1, 300),
    (1.5, 0.9, 0.11, 16, 1, 400),
    (-2, 1.3, 0.16, 10, 2, 100),
    (-1, 0.4, 0.19, 4, 2, 320),
    (4.5, 0.9, 0.06, 25, 1, 4200),
    (-4.5, 0.7, 0.09, 11, 0, 520),
    (2.5, 1.6, 0.13, 14, 0, 130),
    (-3.5, 0.5, 0.11, 10, 2, 590),
    (1.2, 1.7, 0.17, 18, 1, 1400),
    (3.5, 1.2, 0.15, 13, 1, 440),
    (-1.5, 0.8, 0.22, 150, 0, 5040),
    (2, 1, 0.03, 3, 0, 200),
    (-2, 0.5, 0.04, 13, 1, 3000),
    (-1, 0.7, 0.05, 9, 2, 150),
    (3, 0.6, 0.02, 7, 1, 250),
    (-3, 1.1, 0.06, 30, 0, 1000),
]


def scenario_catalog():
    """The 21 benchmark scenarios; entry ``k`` (1-based) is seeded with ``k``."""
    return [
        ScenarioSpec(float(s), float(c), f, d, lvl, n, seed=k)
        for k, (s, c, f, d, lvl, n) in enumerate(_CATALOG, start=1)
    ]
