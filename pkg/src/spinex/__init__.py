"""Similarity-based anomaly detection with explainable feature contributions."""

from .baselines import BaselineSpec, HBOSDetector, KNNDetector, hbos_scores, knn_scores, run_baseline
from .detector import (
    SPINEX,
    DetectionResult,
    DetectorConfig,
    Explanation,
    ExplanationEntry,
    detect,
    explain,
    format_explanations,
)
from .exceptions import (
    AggregationError,
    DegenerateInputError,
    ShapeError,
    SpinexError,
    UndefinedMetricError,
    ValidationError,
)
from .metrics import ConfusionCounts, MetricRecord, auc_roc, confusion, precision_recall_f1
from .preprocessing import apply_scaling, precompute_interactions, select_transformation
from .scoring import compute_scores, compute_weights, row_distances
from .synthgen import ScenarioSpec, augment_complexity, generate_scenario, scenario_catalog
from .thresholds import (
    adaptive_quantile_threshold,
    fixed_threshold,
    percentile,
    statistical_threshold,
)
from .validation import FeatureMatrix, validate_matrix

__version__ = "0.1.0"

__all__ = [
    "SPINEX",
    "AggregationError",
    "BaselineSpec",
    "ConfusionCounts",
    "DegenerateInputError",
    "DetectionResult",
    "DetectorConfig",
    "Explanation",
    "ExplanationEntry",
    "FeatureMatrix",
    "HBOSDetector",
    "KNNDetector",
    "MetricRecord",
    "ScenarioSpec",
    "ShapeError",
    "SpinexError",
    "UndefinedMetricError",
    "ValidationError",
    "adaptive_quantile_threshold",
    "apply_scaling",
    "auc_roc",
    "augment_complexity",
    "compute_scores",
    "compute_weights",
    "confusion",
    "detect",
    "explain",
    "fixed_threshold",
    "format_explanations",
    "generate_scenario",
    "hbos_scores",
    "knn_scores",
    "percentile",
    "precision_recall_f1",
    "precompute_interactions",
    "row_distances",
    "run_baseline",
    "scenario_catalog",
    "select_transformation",
    "statistical_threshold",
    "validate_matrix",
]
