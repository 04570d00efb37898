"""Sum-of-ranks aggregation of benchmark results."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List

import numpy as np
from scipy.stats import rankdata

from ..exceptions import AggregationError
from .runner import MetricTable

METRICS = ("precision", "recall", "f1", "auc")
MODES = ("avg-then-rank", "rank-then-avg")


@dataclass(frozen=True)
class RankRow:
    algorithm: str
    averages: Dict[str, float]
    ranks: Dict[str, float]
    rank_sum: float
    overall: int


@dataclass(frozen=True)
class RankTable:
    rows: List[RankRow]
    mode: str

    def __getitem__(self, algorithm) -> RankRow:
        for row in self.rows:
            if row.algorithm == algorithm:
                return row
        raise KeyError(algorithm)

    @property
    def order(self):
        return [r.algorithm for r in self.rows]


def _rank_desc(values) -> np.ndarray:
    """Rank 1 for the largest value; ties share the mean of their positions."""
    return rankdata(-np.asarray(values, dtype=np.float64), method="average")


def _values_by_algorithm(table: MetricTable, metric: str):
    out: Dict[str, Dict[str, float]] = {}
    for (alg, ds), rec in table.items():
        v = rec.get(metric)
        if v is not None:
            out.setdefault(alg, {})[ds] = v
    return out


def rank_algorithms(table: MetricTable, mode: str = "avg-then-rank") -> RankTable:
    """Order algorithms by the sum of their four per-metric ranks.

    ``avg-then-rank`` averages each metric over an algorithm's successful
    datasets and ranks the averages. ``rank-then-avg`` ranks algorithms on
    every dataset where all of them have the metric and averages those
    ranks. Larger metric values rank better; ties get the mean rank. The
    overall order is ascending rank sum, then precision rank, then name.
    """
    if mode not in MODES:
        raise ValueError(f"unknown ranking mode {mode!r}; expected one of {', '.join(MODES)}")
    algorithms = table.algorithms
    if len(algorithms) < 2:
        raise AggregationError(f"need at least two algorithms to rank, got {len(algorithms)}")

    per_metric = {m: _values_by_algorithm(table, m) for m in METRICS}
    datasets_of = {
        a: {ds for m in METRICS for ds in per_metric[m].get(a, {})} for a in algorithms
    }
    shared = set.intersection(*datasets_of.values())
    if not shared:
        raise AggregationError("algorithms share no successfully evaluated dataset")

    averages = {a: {} for a in algorithms}
    for m in METRICS:
        for a in algorithms:
            vals = per_metric[m].get(a, {})
            averages[a][m] = float(np.mean(list(vals.values()))) if vals else float("nan")

    ranks = {a: {} for a in algorithms}
    for m in METRICS:
        if mode == "avg-then-rank":
            col = [averages[a][m] for a in algorithms]
            if any(np.isnan(col)):
                missing = [a for a, v in zip(algorithms, col) if np.isnan(v)]
                raise AggregationError(f"no successful {m} values for: {', '.join(missing)}")
            r = _rank_desc(col)
        else:
            common = sorted(set.intersection(*(set(per_metric[m].get(a, {})) for a in algorithms)))
            if not common:
                raise AggregationError(f"no dataset where every algorithm has a {m} value")
            per_ds = np.array([
                _rank_desc([per_metric[m][a][ds] for a in algorithms]) for ds in common
            ])
            r = per_ds.mean(axis=0)
        for a, rank in zip(algorithms, r):
            ranks[a][m] = float(rank)

    sums = {a: float(sum(ranks[a][m] for m in METRICS)) for a in algorithms}
    ordered = sorted(algorithms, key=lambda a: (sums[a], ranks[a]["precision"], a))
    rows = [
        RankRow(a, averages[a], ranks[a], sums[a], pos)
        for pos, a in enumerate(ordered, start=1)
    ]
    return RankTable(rows, mode)
