"""Empirical run-time scaling of the scoring path."""

from __future__ import annotations

import csv
import json
import logging
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..baselines import hbos_scores, knn_scores
from ..scoring import compute_scores
from ..synthgen import SeededRNG
from .io import format_float

log = logging.getLogger(__name__)

SCORERS = {
    "spinex": lambda x: compute_scores(x),
    "knn": lambda x: knn_scores(x, 5),
    "hbos": lambda x: hbos_scores(x),
}


@dataclass
class TimingGrid:
    """Median wall-clock seconds per ``(n, d)`` cell plus a log-log fit.

    The fit is ``log t = alpha * log n + beta * log d + c``. An exponent is
    ``None`` when its grid axis has a single value or the fit has no
    degrees of freedom.
    """

    algorithm: str
    cells: Dict[Tuple[int, int], Optional[float]] = field(default_factory=dict)
    status: Dict[Tuple[int, int], str] = field(default_factory=dict)
    alpha: Optional[float] = None
    beta: Optional[float] = None
    intercept: Optional[float] = None
    residuals: Dict[Tuple[int, int], float] = field(default_factory=dict)

    @property
    def rms_residual(self) -> Optional[float]:
        if not self.residuals:
            return None
        r = np.array(list(self.residuals.values()))
        return float(np.sqrt(np.mean(r ** 2)))

    def summary(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "alpha": self.alpha,
            "beta": self.beta,
            "intercept": self.intercept,
            "rms_residual": self.rms_residual,
            "cells": [
                {"n": n, "d": d, "seconds": self.cells[(n, d)], "status": self.status[(n, d)],
                 "log_residual": self.residuals.get((n, d))}
                for n, d in sorted(self.cells)
            ],
        }


def _fit(grid: TimingGrid):
    ok = [(n, d, t) for (n, d), t in sorted(grid.cells.items()) if t is not None and t > 0]
    if not ok:
        return
    ns = {n for n, _, _ in ok}
    ds = {d for _, d, _ in ok}
    cols, names = [], []
    if len(ns) > 1:
        cols.append([np.log(n) for n, _, _ in ok])
        names.append("alpha")
    if len(ds) > 1:
        cols.append([np.log(d) for _, d, _ in ok])
        names.append("beta")
    if not names or len(ok) <= len(names):
        return
    A = np.column_stack(cols + [np.ones(len(ok))])
    y = np.log([t for _, _, t in ok])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    for name, c in zip(names, coef):
        setattr(grid, name, float(c))
    grid.intercept = float(coef[-1])
    resid = y - A @ coef
    grid.residuals = {(n, d): float(r) for (n, d, _), r in zip(ok, resid)}


def measure_complexity(grid_n: Sequence[int], grid_d: Sequence[int], algorithm: str = "spinex",
                       repeats: int = 3, seed: int = 0) -> TimingGrid:
    """Time the scorer on seeded gaussian data for every ``(n, d)`` cell.

    Each cell reports the median of ``repeats`` runs. Cells that run out of
    memory are marked skipped. Timings are reported only; nothing here
    asserts a complexity class.
    """
    if not grid_n or not grid_d:
        raise ValueError("grids must be non-empty")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    try:
        scorer = SCORERS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; available: {', '.join(SCORERS)}") from None

    grid = TimingGrid(algorithm)
    for n in grid_n:
        for d in grid_d:
            if n < 2 or d < 1:
                raise ValueError(f"invalid grid cell n={n}, d={d}")
            try:
                x = SeededRNG(seed).normal((n, d))
                times = []
                for _ in range(repeats):
                    t0 = time.perf_counter()
                    scorer(x)
                    times.append(time.perf_counter() - t0)
            except MemoryError:
                log.warning("cell n=%d d=%d skipped: out of memory", n, d)
                grid.cells[(n, d)] = None
                grid.status[(n, d)] = "skipped: out of memory"
                continue
            grid.cells[(n, d)] = statistics.median(times)
            grid.status[(n, d)] = "ok"
            log.info("n=%d d=%d: %.4fs", n, d, grid.cells[(n, d)])
    _fit(grid)
    return grid


def write_timing_csv(path, grid: TimingGrid):
    """Cells to ``path``; the fitted exponents to ``<path stem>.fit.json``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "d", "seconds", "status", "log_residual"])
        for n, d in sorted(grid.cells):
            writer.writerow([n, d, format_float(grid.cells[(n, d)]), grid.status[(n, d)],
                             format_float(grid.residuals.get((n, d)))])
    fit_path = path.with_name(path.stem + ".fit.json")
    summary = grid.summary()
    fit_path.write_text(json.dumps({k: summary[k] for k in
                                    ("algorithm", "alpha", "beta", "intercept", "rms_residual")},
                                   indent=2) + "\n")
    return fit_path
