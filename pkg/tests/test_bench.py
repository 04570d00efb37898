import io
import json

import numpy as np
import pytest

from spinex import AggregationError, MetricRecord, ValidationError, generate_scenario, scenario_catalog
from spinex import validate_matrix
from spinex.bench import (
    Dataset,
    MetricTable,
    load_csv_dataset,
    measure_complexity,
    pca_project_2d,
    rank_algorithms,
    read_metric_csv,
    run_benchmark,
    write_csv_dataset,
    write_metric_csv,
    write_pca_csv,
    write_rank_csv,
    write_timing_csv,
)


def record(p, r, f, a):
    return MetricRecord(p, r, f, a)


class TestCsv:
    def test_with_labels(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b,label\n1,2,0\n3,4,1\n5,6,0\n")
        m, y = load_csv_dataset(path)
        assert m.shape == (3, 2) and m.column_names == ("a", "b")
        assert y.tolist() == [0, 1, 0]

    def test_without_labels(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b,c\n1,2,0\n3,4,1\n5,6,0\n")
        m, y = load_csv_dataset(path)
        assert m.shape == (3, 3) and y is None

    def test_named_label_column(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,y\n1,1\n2,0\n")
        m, y = load_csv_dataset(path, label_column="y")
        assert m.shape == (2, 1) and y.tolist() == [1, 0]

    def test_ragged_row_names_line(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b\n1,2\n3\n")
        with pytest.raises(ValidationError, match="line 3"):
            load_csv_dataset(path)

    @pytest.mark.parametrize("body,match", [
        ("a,b\n1,x\n", "non-numeric"),
        ("a,label\n1,2\n", "not 0 or 1"),
        ("", "empty"),
        ("a,b\n", "no data rows"),
        ("a,b\n1,nan\n", "non-finite|not finite|NaN|nan"),
    ])
    def test_bad_content(self, tmp_path, body, match):
        path = tmp_path / "d.csv"
        path.write_text(body)
        with pytest.raises(ValueError, match=match):
            load_csv_dataset(path)

    def test_round_trip(self, tmp_path, rng):
        x = rng.normal(size=(20, 3)) * 1e3
        y = rng.integers(0, 2, size=20)
        path = tmp_path / "r.csv"
        write_csv_dataset(path, validate_matrix(x), y)
        m, y2 = load_csv_dataset(path)
        assert np.max(np.abs(m.values - x)) <= 1e-12
        assert y2.tolist() == y.tolist()


def _ds(name, spec):
    data = generate_scenario(spec)
    return Dataset(name, data.matrix, data.labels)


class TestRunBenchmark:
    def test_cartesian_product(self):
        specs = scenario_catalog()
        table = run_benchmark([_ds("s1", specs[0]), _ds("s17", specs[16])], ["spinex", "knn"])
        assert len(table) == 4
        assert table.algorithms == ["knn", "spinex"]
        assert all(rec.status == "ok" for _, rec in table.items())

    def test_single_class_dataset(self, rng):
        ds = Dataset("flat", validate_matrix(rng.normal(size=(30, 2))), np.zeros(30, dtype=int))
        rec = run_benchmark([ds], ["hbos"])[("hbos", "flat")]
        assert rec.auc is None and "auc failed" in rec.status
        assert rec.precision is not None and rec.recall is not None and rec.f1 is not None

    def test_unlabeled_dataset_skipped(self, rng):
        ds = Dataset("u", validate_matrix(rng.normal(size=(10, 2))), None)
        assert "skipped" in run_benchmark([ds], ["knn"])[("knn", "u")].status

    def test_failure_recorded(self):
        ds = Dataset("tiny", validate_matrix([[0.0], [1.0], [2.0]]), np.array([0, 0, 1]))
        rec = run_benchmark([ds], ["knn"])[("knn", "tiny")]  # k=5 > n-1
        assert rec.status.startswith("failed")

    def test_unknown_algorithm(self):
        with pytest.raises(ValueError):
            run_benchmark([], ["isolation-forest"])

    def test_duplicate_entry_rejected(self):
        t = MetricTable()
        t.add("a", "d", record(1, 1, 1, 1))
        with pytest.raises(ValueError):
            t.add("a", "d", record(1, 1, 1, 1))

    @pytest.mark.slow
    def test_full_catalog(self):
        datasets = [_ds(f"s{s.seed}", s) for s in scenario_catalog()]
        table = run_benchmark(datasets, ["spinex"])
        assert len(table) == 21
        assert all(None not in (r.precision, r.recall, r.f1, r.auc) for _, r in table.items())


class TestRanking:
    def test_dominance(self):
        t = MetricTable({("A", "d"): record(0.9, 0.9, 0.9, 0.9), ("B", "d"): record(0.1, 0.1, 0.1, 0.1)})
        ranks = rank_algorithms(t)
        a = ranks["A"]
        assert list(a.ranks.values()) == [1.0] * 4 and a.rank_sum == 4 and a.overall == 1

    def test_tie_gets_mean_rank(self):
        t = MetricTable({("A", "d"): record(0.5, 0.9, 0.9, 0.9), ("B", "d"): record(0.5, 0.1, 0.1, 0.1)})
        ranks = rank_algorithms(t)
        assert ranks["A"].ranks["precision"] == ranks["B"].ranks["precision"] == 1.5

    def test_hand_table(self):
        t = MetricTable({
            ("A", "d"): record(0.9, 0.8, 0.85, 0.95),
            ("B", "d"): record(0.7, 0.8, 0.75, 0.90),
            ("C", "d"): record(0.5, 0.6, 0.55, 0.97),
        })
        ranks = rank_algorithms(t)
        expected = {
            "A": ({"precision": 1, "recall": 1.5, "f1": 1, "auc": 2}, 5.5, 1),
            "B": ({"precision": 2, "recall": 1.5, "f1": 2, "auc": 3}, 8.5, 2),
            "C": ({"precision": 3, "recall": 3, "f1": 3, "auc": 1}, 10.0, 3),
        }
        for alg, (r, total, overall) in expected.items():
            assert ranks[alg].ranks == r
            assert ranks[alg].rank_sum == total and ranks[alg].overall == overall

    def test_rank_sums_per_metric(self, rng):
        entries = {(a, f"d{k}"): record(*rng.uniform(size=4)) for a in "PQRS" for k in range(3)}
        ranks = rank_algorithms(MetricTable(entries))
        for m in ("precision", "recall", "f1", "auc"):
            assert sum(r.ranks[m] for r in ranks.rows) == 10  # 1+2+3+4

    def test_names_do_not_matter(self, rng):
        vals = [rng.uniform(size=4) for _ in range(3)]
        a = rank_algorithms(MetricTable({(n, "d"): record(*v) for n, v in zip("xyz", vals)}))
        b = rank_algorithms(MetricTable({(n, "d"): record(*v) for n, v in zip("zyx", vals)}))
        assert [r.rank_sum for r in a.rows] == [r.rank_sum for r in b.rows]

    def test_rank_then_avg(self):
        t = MetricTable({
            ("A", "d1"): record(1.0, 1, 1, 1), ("B", "d1"): record(0.0, 0, 0, 0),
            ("A", "d2"): record(0.0, 0, 0, 0), ("B", "d2"): record(0.4, 1, 1, 1),
        })
        # averages favour A on precision (0.5 vs 0.2); per-dataset ranks tie
        assert rank_algorithms(t)["A"].ranks["precision"] == 1.0
        assert rank_algorithms(t, "rank-then-avg")["A"].ranks["precision"] == 1.5

    def test_failed_metric_excluded_from_average(self):
        t = MetricTable({
            ("A", "d1"): record(1.0, 1, 1, 0.9), ("A", "d2"): MetricRecord(0.5, 1, 1, None, ("auc failed",)),
            ("B", "d1"): record(0.0, 0, 0, 0.8), ("B", "d2"): record(0.0, 0, 0, 0.5),
        })
        assert rank_algorithms(t)["A"].averages["auc"] == 0.9

    @pytest.mark.parametrize("entries", [
        {},
        {("A", "d"): record(1, 1, 1, 1)},
        {("A", "d1"): record(1, 1, 1, 1), ("B", "d2"): record(1, 1, 1, 1)},
        {("A", "d"): record(1, 1, 1, None), ("B", "d"): record(1, 1, 1, 1)},
    ])
    def test_aggregation_errors(self, entries):
        with pytest.raises(AggregationError):
            rank_algorithms(MetricTable(entries))

    def test_bad_mode(self):
        t = MetricTable({("A", "d"): record(1, 1, 1, 1), ("B", "d"): record(0, 0, 0, 0)})
        with pytest.raises(ValueError):
            rank_algorithms(t, "median")


class TestReports:
    def test_metric_round_trip(self, tmp_path):
        t = MetricTable({("A", "d"): record(0.1, 0.2, 0.3, 0.4),
                         ("B", "d"): MetricRecord(0.0, 0.0, 0.0, None, ("auc failed: x",))})
        path = tmp_path / "m.csv"
        write_metric_csv(path, t)
        back = read_metric_csv(path)
        assert back.items() == t.items()

    def test_header_only_metric_file_is_empty(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("")
        assert len(read_metric_csv(path)) == 0

    def test_rank_csv(self):
        t = MetricTable({("A", "d"): record(0.9, 0.9, 0.9, 0.9), ("B", "d"): record(0.1, 0.1, 0.1, 0.1)})
        buf = io.StringIO()
        write_rank_csv(buf, rank_algorithms(t))
        lines = buf.getvalue().splitlines()
        assert lines[0].startswith("algorithm,avg_precision")
        assert lines[1].split(",")[0] == "A" and lines[1].endswith(",4.0,1")

    def test_pca_csv(self, tmp_path):
        path = tmp_path / "p.csv"
        write_pca_csv(path, [[1.0, 2.0], [3.0, 4.0]], labels=[0, 1], flagged=[1])
        assert path.read_text().splitlines() == ["pc1,pc2,label,flagged", "1.0,2.0,0,0", "3.0,4.0,1,1"]


class TestComplexity:
    def test_grid_shape(self, tmp_path):
        grid = measure_complexity([100, 300], [5, 10], repeats=3)
        assert len(grid.cells) == 4 and all(t > 0 for t in grid.cells.values())
        assert grid.alpha is not None and grid.beta is not None
        assert len(grid.residuals) == 4
        fit = write_timing_csv(tmp_path / "t.csv", grid)
        assert len((tmp_path / "t.csv").read_text().splitlines()) == 5
        assert set(json.loads(fit.read_text())) == {"algorithm", "alpha", "beta", "intercept", "rms_residual"}

    def test_single_cell_undefined(self):
        grid = measure_complexity([50], [3], repeats=1)
        assert grid.alpha is None and grid.beta is None

    def test_single_axis(self):
        grid = measure_complexity([50, 100, 200], [3], repeats=1, algorithm="knn")
        assert grid.alpha is not None and grid.beta is None

    @pytest.mark.parametrize("kwargs", [{"grid_n": [], "grid_d": [1]}, {"grid_n": [1], "grid_d": [1]},
                                        {"grid_n": [10], "grid_d": [1], "repeats": 0},
                                        {"grid_n": [10], "grid_d": [1], "algorithm": "lof"}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            measure_complexity(**kwargs)


class TestPCA:
    def test_line(self):
        t = np.linspace(-3, 3, 20)
        p = pca_project_2d(np.column_stack([t, t]))
        assert np.all(np.abs(p.coords[:, 1]) < 1e-8)
        np.testing.assert_allclose(p.coords[:, 0], t * np.sqrt(2), atol=1e-9)
        assert p.second_degenerate

    def test_two_dimensional_is_lossless(self, rng):
        x = rng.normal(size=(200, 2))
        p = pca_project_2d(x)
        assert abs(p.coords.var(axis=0).sum() - x.var(axis=0).sum()) < 1e-6
        i, j = 3, 77
        assert abs(np.linalg.norm(p.coords[i] - p.coords[j]) - np.linalg.norm(x[i] - x[j])) < 1e-9

    def test_matches_dense_eigensolver(self, rng):
        x = rng.normal(size=(100, 5)) * [5, 3, 1, 0.5, 0.2]
        p = pca_project_2d(x)
        xc = x - x.mean(axis=0)
        evals = np.linalg.eigh(xc.T @ xc / len(x))[0]
        assert abs(p.coords.var(axis=0).sum() - evals[-2:].sum()) < 1e-6
        np.testing.assert_allclose(p.components @ p.components.T, np.eye(2), atol=1e-9)

    def test_orientation(self, rng):
        p = pca_project_2d(rng.normal(size=(30, 3)))
        for v in p.components:
            assert v[np.flatnonzero(np.abs(v) > 1e-12)[0]] > 0

    def test_needs_two_columns(self):
        with pytest.raises(ValueError):
            pca_project_2d(np.zeros((5, 1)))

    @pytest.mark.parametrize("direction", [[1.0, 2.0, -2.0], [0.0, 0.0, 1.0], [3.0, 0.0, 4.0]])
    def test_rank_one_in_3d(self, rng, direction):
        t = rng.normal(size=40)
        p = pca_project_2d(np.outer(t, direction))
        assert p.second_degenerate
        np.testing.assert_allclose(np.abs(p.coords[:, 0]), np.abs(t - t.mean()) * np.linalg.norm(direction),
                                   atol=1e-9)
        assert abs(p.components[0] @ p.components[1]) < 1e-9
