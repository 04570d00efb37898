"""Benchmark harness: dataset I/O, metric tables, rank aggregation,
complexity timing and PCA projection."""

from .complexity import TimingGrid, measure_complexity, write_timing_csv
from .io import (
    detection_report,
    load_csv_dataset,
    read_metric_csv,
    write_csv_dataset,
    write_metric_csv,
    write_pca_csv,
    write_rank_csv,
)
from .pca import Projection, pca_project_2d
from .ranking import RankRow, RankTable, rank_algorithms
from .runner import ALGORITHMS, Dataset, MetricTable, run_benchmark

__all__ = [
    "ALGORITHMS",
    "Dataset",
    "MetricTable",
    "Projection",
    "RankRow",
    "RankTable",
    "TimingGrid",
    "detection_report",
    "load_csv_dataset",
    "measure_complexity",
    "pca_project_2d",
    "rank_algorithms",
    "read_metric_csv",
    "run_benchmark",
    "write_csv_dataset",
    "write_metric_csv",
    "write_pca_csv",
    "write_rank_csv",
    "write_timing_csv",
]
