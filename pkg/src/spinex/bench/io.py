"""CSV and JSON readers/writers for datasets and reports."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Optional

import numpy as np

from ..exceptions import ValidationError
from ..metrics import MetricRecord
from ..validation import FeatureMatrix, validate_matrix
from .runner import MetricTable

LABEL_COLUMN = "label"
METRIC_FIELDS = ("algorithm", "dataset", "precision", "recall", "f1", "auc", "status")
RANK_FIELDS = ("algorithm", "avg_precision", "avg_recall", "avg_f1", "avg_auc",
               "rank_p", "rank_r", "rank_f1", "rank_auc", "rank_sum", "overall")


def format_float(x) -> str:
    """Shortest decimal string that round-trips to the same double."""
    if x is None:
        return ""
    return repr(float(x))


def load_csv_dataset(path, label_column: Optional[str] = None):
    """Read a CSV with a header row into ``(FeatureMatrix, labels or None)``.

    The label column (``label_column``, or ``"label"`` when present) is
    removed from the features and must hold 0/1 values.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValidationError(f"{path}: empty file, header row required") from None
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(
                    f"{path}: line {line_no} has {len(row)} fields, header has {len(header)}",
                    row=line_no,
                )
            rows.append((line_no, row))

    if label_column is None:
        label_idx = header.index(LABEL_COLUMN) if LABEL_COLUMN in header else None
    elif label_column in header:
        label_idx = header.index(label_column)
    else:
        raise ValidationError(f"{path}: label column {label_column!r} not in header")

    feature_idx = [j for j in range(len(header)) if j != label_idx]
    if not feature_idx:
        raise ValidationError(f"{path}: no feature columns")
    if not rows:
        raise ValidationError(f"{path}: no data rows")

    values = np.empty((len(rows), len(feature_idx)))
    labels = np.empty(len(rows), dtype=int) if label_idx is not None else None
    for i, (line_no, row) in enumerate(rows):
        for out_j, j in enumerate(feature_idx):
            try:
                values[i, out_j] = float(row[j])
            except ValueError:
                raise ValidationError(
                    f"{path}: line {line_no}, column {header[j]!r}: non-numeric value {row[j]!r}",
                    row=line_no, col=j,
                ) from None
        if label_idx is not None:
            raw = row[label_idx].strip()
            try:
                lab = float(raw)
            except ValueError:
                lab = math.nan
            if lab not in (0.0, 1.0):
                raise ValidationError(
                    f"{path}: line {line_no}: label {raw!r} is not 0 or 1", row=line_no, col=label_idx
                )
            labels[i] = int(lab)

    matrix = validate_matrix(values, [header[j] for j in feature_idx])
    return matrix, labels


def write_csv_dataset(path, matrix: FeatureMatrix, labels=None):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = list(matrix.column_names)
        if labels is not None:
            header.append(LABEL_COLUMN)
        writer.writerow(header)
        for i, row in enumerate(matrix.values):
            out = [format_float(v) for v in row]
            if labels is not None:
                out.append(str(int(labels[i])))
            writer.writerow(out)


def write_json(path, obj):
    text = json.dumps(obj, indent=2, sort_keys=False, allow_nan=False)
    Path(path).write_text(text + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def detection_report(config, result, explanations, labels=None, column_names=None) -> dict:
    """JSON-ready detection report."""
    report = {
        "config": config.to_dict(),
        "threshold": float(result.threshold),
        "scores": [float(s) for s in result.scores],
        "flagged": [int(i) for i in result.flagged],
        "explanations": [e.to_dict() for e in explanations],
    }
    if column_names is not None:
        report["columns"] = list(column_names)
    if labels is not None:
        report["labels"] = [int(v) for v in labels]
    return report


def write_pca_csv(path, coords, labels=None, flagged=()):
    """Two principal coordinates per row plus label and flag columns."""
    flagged = set(int(i) for i in flagged)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["pc1", "pc2", "label", "flagged"])
        for i, (a, b) in enumerate(np.asarray(coords)):
            lab = "" if labels is None else str(int(labels[i]))
            writer.writerow([format_float(a), format_float(b), lab, int(i in flagged)])


def write_metric_csv(path, table):
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRIC_FIELDS)
        for (alg, ds), rec in table.items():
            writer.writerow([alg, ds, format_float(rec.precision), format_float(rec.recall),
                             format_float(rec.f1), format_float(rec.auc), rec.status])


def read_metric_csv(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"metric report not found: {path}")
    table = MetricTable()
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return table
        missing = set(METRIC_FIELDS) - set(reader.fieldnames)
        if missing:
            raise ValidationError(f"{path}: missing columns {', '.join(sorted(missing))}")
        for row in reader:
            vals = {}
            for k in ("precision", "recall", "f1", "auc"):
                vals[k] = float(row[k]) if row[k].strip() else None
            status = row["status"].strip()
            notes = () if status in ("", "ok") else tuple(status.split("; "))
            table.add(row["algorithm"], row["dataset"], MetricRecord(notes=notes, **vals))
    return table


def write_rank_csv(path_or_file, ranks):
    """Write the rank report to a path or an open text file."""
    if hasattr(path_or_file, "write"):
        _write_rank_rows(path_or_file, ranks)
        return
    with Path(path_or_file).open("w", newline="") as fh:
        _write_rank_rows(fh, ranks)


def _write_rank_rows(fh, ranks):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(RANK_FIELDS)
    for r in ranks.rows:
        writer.writerow([
            r.algorithm,
            *(format_float(r.averages[m]) for m in ("precision", "recall", "f1", "auc")),
            *(format_float(r.ranks[m]) for m in ("precision", "recall", "f1", "auc")),
            format_float(r.rank_sum),
            r.overall,
        ])
