"""Run detectors over labelled datasets and collect metrics."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np

from ..baselines import BaselineSpec, run_baseline
from ..detector import DetectorConfig, detect
from ..metrics import MetricRecord, evaluate
from ..validation import FeatureMatrix

log = logging.getLogger(__name__)

# A detector maps a matrix to (scores, predictions).
Detector = Callable[[FeatureMatrix], Tuple[np.ndarray, np.ndarray]]


def _spinex(**kwargs) -> Detector:
    config = DetectorConfig(**kwargs)

    def run(m):
        r = detect(m, config)
        return r.scores, r.predictions

    return run


def _baseline(spec: BaselineSpec) -> Detector:
    def run(m):
        r = run_baseline(m, spec)
        return r.scores, r.predictions

    return run


ALGORITHMS: Dict[str, Callable[[], Detector]] = {
    "spinex": lambda: _spinex(),
    "spinex-statistical": lambda: _spinex(threshold_method="statistical"),
    "spinex-adaptive": lambda: _spinex(threshold_method="adaptive_quantile"),
    "spinex-weights": lambda: _spinex(use_weights=True),
    "spinex-interactions": lambda: _spinex(include_interactions=True),
    "spinex-weights-interactions": lambda: _spinex(use_weights=True, include_interactions=True),
    "knn": lambda: _baseline(BaselineSpec("knn")),
    "hbos": lambda: _baseline(BaselineSpec("hbos")),
}


def resolve_algorithm(name: str) -> Detector:
    try:
        return ALGORITHMS[name]()
    except KeyError:
        raise ValueError(
            f"unknown algorithm {name!r}; available: {', '.join(ALGORITHMS)}"
        ) from None


@dataclass(frozen=True)
class Dataset:
    name: str
    matrix: FeatureMatrix
    labels: Optional[np.ndarray]


class MetricTable:
    """Metric records keyed by ``(algorithm, dataset)``."""

    def __init__(self, entries=None):
        self.entries: Dict[Tuple[str, str], MetricRecord] = {}
        for key, rec in (entries or {}).items():
            self.add(*key, rec)

    def add(self, algorithm: str, dataset: str, record: MetricRecord):
        key = (algorithm, dataset)
        if key in self.entries:
            raise ValueError(f"duplicate entry for {key}")
        self.entries[key] = record

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, key):
        return self.entries[key]

    def items(self):
        return sorted(self.entries.items())

    @property
    def algorithms(self):
        return sorted({a for a, _ in self.entries})

    @property
    def datasets(self):
        return sorted({d for _, d in self.entries})


def _failed(reason: str) -> MetricRecord:
    return MetricRecord(None, None, None, None, (reason,))


def _cell(algorithm: str, detector: Detector, ds: Dataset) -> MetricRecord:
    if ds.labels is None:
        log.warning("dataset %s has no labels; skipped", ds.name)
        return _failed("skipped: dataset has no labels")
    try:
        scores, predictions = detector(ds.matrix)
    except Exception as exc:  # one failing cell must not sink the run
        log.warning("%s on %s failed: %s", algorithm, ds.name, exc)
        return _failed(f"failed: {type(exc).__name__}: {exc}")
    return evaluate(ds.labels, predictions, scores)


def run_benchmark(datasets: Iterable[Dataset], algorithms: Iterable, workers: int = 1) -> MetricTable:
    """Evaluate every algorithm on every dataset.

    ``algorithms`` holds registry names or ``(name, detector)`` pairs.
    AUC comes from raw scores, precision/recall/F1 from the predictions.
    Failures are recorded in the table instead of raised.
    """
    algos = []
    for a in algorithms:
        if isinstance(a, str):
            algos.append((a, resolve_algorithm(a)))
        else:
            algos.append(tuple(a))
    datasets = list(datasets)
    cells = [(name, fn, ds) for name, fn in algos for ds in datasets]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda c: _cell(*c), cells))
    else:
        records = [_cell(*c) for c in cells]

    table = MetricTable()
    for (name, _, ds), rec in sorted(zip(cells, records), key=lambda t: (t[0][0], t[0][2].name)):
        table.add(name, ds.name, rec)
    return table
