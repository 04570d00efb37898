"""Command-line interface.

Exit codes: 0 success, 1 domain error (bad data, failed aggregation, ...),
2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import (
    Dataset,
    detection_report,
    load_csv_dataset,
    measure_complexity,
    rank_algorithms,
    read_metric_csv,
    run_benchmark,
    write_csv_dataset,
    write_metric_csv,
    write_rank_csv,
    write_timing_csv,
)
from .bench.io import read_json, write_json
from .bench.ranking import MODES
from .detector import SPINEX, DetectorConfig, explain, format_explanations
from .preprocessing import SCALING_METHODS
from .synthgen import ScenarioSpec, generate_scenario, scenario_catalog
from .thresholds import THRESHOLD_METHODS

log = logging.getLogger("spinex")


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _metric(text):
    name, _, p = text.partition(":")
    if name not in ("euclidean", "manhattan", "minkowski") or (p and name != "minkowski"):
        raise argparse.ArgumentTypeError(
            f"expected euclidean, manhattan, minkowski or minkowski:P, got {text!r}"
        )
    try:
        return name, float(p) if p else 2.0
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad minkowski exponent in {text!r}") from None


def _spec(text):
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError(
            "expected mean_shift,cov_scale,outlier_fraction,num_features,complexity_level,size"
        )
    try:
        shift, cov, frac = (float(p) for p in parts[:3])
        d, level, size = (int(p) for p in parts[3:])
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse scenario parameters {text!r}") from None
    return shift, cov, frac, d, level, size


def build_parser() -> argparse.ArgumentParser:
    defaults = DetectorConfig()
    parser = argparse.ArgumentParser(prog="spinex", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic labelled dataset")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", type=int, choices=range(1, 22), metavar="1..21",
                     help="catalog scenario number")
    src.add_argument("--spec", type=_spec,
                     help="mean_shift,cov_scale,outlier_fraction,num_features,complexity_level,size")
    g.add_argument("--seed", type=int, default=None,
                   help="random seed (default: scenario number, or 0 with --spec)")
    g.add_argument("--out", required=True)

    d = sub.add_parser("detect", help="score a dataset and write a JSON report")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--scale", choices=SCALING_METHODS, default=None)
    d.add_argument("--weights", action="store_true")
    d.add_argument("--interactions", action="store_true")
    d.add_argument("--nonlinear", action="store_true")
    d.add_argument("--metric", type=_metric, default=("euclidean", 2.0),
                   help="euclidean (default), manhattan, minkowski or minkowski:P")
    d.add_argument("--threshold-method", choices=THRESHOLD_METHODS, default=defaults.threshold_method)
    d.add_argument("--tau", type=float, default=defaults.anomaly_threshold)
    d.add_argument("--multiplier", type=float, default=defaults.multiplier)
    d.add_argument("--window", type=int, default=defaults.window_size)
    d.add_argument("--quantile", type=float, default=defaults.quantile)
    d.add_argument("--workers", type=int, default=defaults.worker_count)
    d.add_argument("--out", required=True)

    e = sub.add_parser("explain", help="print feature contributions of flagged rows")
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--report", required=True)

    b = sub.add_parser("bench", help="evaluate algorithms on a directory of labelled CSVs")
    b.add_argument("--datasets", required=True)
    b.add_argument("--algorithms", required=True, help="comma-separated algorithm names")
    b.add_argument("--out", required=True)

    r = sub.add_parser("rank", help="aggregate a metric report into a ranking")
    r.add_argument("--metrics", required=True)
    r.add_argument("--out", help="rank report path (default: print to stdout)")
    r.add_argument("--mode", choices=MODES, default="avg-then-rank")

    c = sub.add_parser("complexity", help="time the scoring path over an (n, d) grid")
    c.add_argument("--ns", type=_int_list, required=True)
    c.add_argument("--ds", type=_int_list, required=True)
    c.add_argument("--repeats", type=int, default=3)
    c.add_argument("--out", required=True)
    return parser


def _generate(args):
    if args.scenario is not None:
        spec = scenario_catalog()[args.scenario - 1]
        if args.seed is not None:
            spec = spec.with_seed(args.seed)
    else:
        spec = ScenarioSpec(*args.spec, seed=args.seed or 0)
    data = generate_scenario(spec)
    write_csv_dataset(args.out, data.matrix, data.labels)
    log.info("wrote %d rows to %s", data.matrix.n_rows, args.out)


def _detect(args):
    matrix, labels = load_csv_dataset(args.input)
    metric, p = args.metric
    config = DetectorConfig(
        use_weights=args.weights,
        include_interactions=args.interactions,
        use_nonlinear=args.nonlinear,
        distance_metric=metric,
        minkowski_p=p,
        scaling_method=args.scale,
        anomaly_threshold=args.tau,
        threshold_method=args.threshold_method,
        multiplier=args.multiplier,
        window_size=args.window,
        quantile=args.quantile,
        worker_count=args.workers,
    )
    model = SPINEX.from_config(config).fit(matrix)
    report = detection_report(config, model.result_, model.explain(), labels, matrix.column_names)
    write_json(args.out, report)
    log.info("%d of %d rows flagged", len(model.flagged_), matrix.n_rows)


def _explain(args):
    matrix, _ = load_csv_dataset(args.input)
    report = read_json(args.report)
    if len(report.get("scores", [])) != matrix.n_rows:
        raise ValueError(
            f"report covers {len(report.get('scores', []))} rows, dataset has {matrix.n_rows}"
        )
    explanations = explain(matrix, report.get("flagged", []))
    print(format_explanations(explanations) if explanations else "No anomalies flagged.")


def _bench(args):
    folder = Path(args.datasets)
    if not folder.is_dir():
        raise FileNotFoundError(f"dataset directory not found: {folder}")
    datasets = []
    for path in sorted(folder.glob("*.csv")):
        matrix, labels = load_csv_dataset(path)
        datasets.append(Dataset(path.stem, matrix, labels))
    if not datasets:
        raise ValueError(f"no CSV datasets in {folder}")
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    table = run_benchmark(datasets, algorithms)
    write_metric_csv(args.out, table)


def _rank(args):
    ranks = rank_algorithms(read_metric_csv(args.metrics), args.mode)
    write_rank_csv(args.out or sys.stdout, ranks)


def _complexity(args):
    grid = measure_complexity(args.ns, args.ds, repeats=args.repeats)
    fit_path = write_timing_csv(args.out, grid)
    fmt = lambda v: "undefined" if v is None else f"{v:.3f}"
    print(f"alpha (n exponent) = {fmt(grid.alpha)}, beta (d exponent) = {fmt(grid.beta)}, "
          f"rms log residual = {fmt(grid.rms_residual)}; fit written to {fit_path}")


COMMANDS = {
    "generate": _generate,
    "detect": _detect,
    "explain": _explain,
    "bench": _bench,
    "rank": _rank,
    "complexity": _complexity,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
