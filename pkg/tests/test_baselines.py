import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spinex import BaselineSpec, HBOSDetector, KNNDetector, hbos_scores, knn_scores, run_baseline
from spinex import generate_scenario, scenario_catalog
from spinex.metrics import auc_roc


def knn_oracle(x, k):
    n = len(x)
    out = []
    for i in range(n):
        d = sorted(math.dist(x[i], x[j]) for j in range(n) if j != i)
        out.append(sum(d[:k]) / k)
    return np.array(out)


def hbos_oracle(x, bins):
    n, dims = x.shape
    total = np.zeros(n)
    for j in range(dims):
        col = x[:, j]
        lo, hi = col.min(), col.max()
        if lo == hi:
            heights = [1.0] * n
        else:
            idx = [min(int((v - lo) / (hi - lo) * bins), bins - 1) for v in col]
            counts = [idx.count(b) for b in range(bins)]
            heights = [counts[b] / max(counts) for b in idx]
        total += [math.log(1 / (h + 1e-12)) for h in heights]
    return total


class TestKNN:
    def test_evenly_spaced(self):
        assert knn_scores([[0.0], [1.0], [2.0]], k=1).tolist() == [1.0, 1.0, 1.0]

    def test_far_point(self):
        assert knn_scores([[0.0], [1.0], [2.0], [10.0]], k=2)[3] == 8.5

    def test_matches_oracle(self, rng):
        x = rng.normal(size=(30, 3))
        np.testing.assert_allclose(knn_scores(x, 3), knn_oracle(x, 3), atol=1e-12)

    @pytest.mark.parametrize("k", [0, 3])
    def test_k_out_of_range(self, k):
        with pytest.raises(ValueError):
            knn_scores([[0.0], [1.0], [2.0]], k)

    @settings(max_examples=30, deadline=None)
    @given(arrays(np.float64, (12, 2), elements=st.floats(-10, 10)), st.floats(-100, 100))
    def test_translation_invariant(self, x, shift):
        np.testing.assert_allclose(knn_scores(x + shift, 2), knn_scores(x, 2), atol=1e-9)

    def test_planted_flags_subset(self):
        # tau = 98 on 100 rows flags two rows, so full coverage of three
        # planted outliers is impossible; flagged rows must be planted ones
        spec = scenario_catalog()[0]
        hits = 0
        for seed in range(100):
            ds = generate_scenario(spec.with_seed(seed))
            r = run_baseline(ds.matrix, BaselineSpec("knn", k=5))
            hits += set(r.flagged) <= set(np.flatnonzero(ds.labels))
        assert hits >= 90


class TestHBOS:
    def test_constant_feature(self):
        s = hbos_scores([[3.0]] * 5)
        assert len(set(s.tolist())) == 1
        assert abs(s[0]) < 1e-11

    def test_rare_bin(self):
        s = hbos_scores([[0.0], [0.0], [0.0], [9.0]], bin_count=2)
        assert s[3] > s[0]

    def test_matches_oracle(self, rng):
        x = rng.uniform(size=(50, 2))
        np.testing.assert_allclose(hbos_scores(x, 5), hbos_oracle(x, 5), atol=1e-12)

    def test_auto_bins(self, rng):
        x = rng.uniform(size=(50, 2))
        np.testing.assert_allclose(hbos_scores(x), hbos_oracle(x, 7), atol=1e-12)

    def test_affine_invariant(self, rng):
        x = rng.normal(size=(40, 3))
        np.testing.assert_allclose(hbos_scores(x * 4 + 3, 6), hbos_scores(x, 6), atol=1e-9)

    def test_auc_on_planted_scenario(self):
        spec = scenario_catalog()[0]
        good = 0
        for seed in range(100):
            ds = generate_scenario(spec.with_seed(seed))
            good += auc_roc(ds.labels, hbos_scores(ds.matrix)) > 0.9
        assert good >= 90


def test_constant_matrix_flags_nothing():
    r = run_baseline(np.ones((10, 2)), BaselineSpec("knn", k=1))
    assert len(set(r.scores.tolist())) == 1 and r.flagged == ()


@pytest.mark.parametrize("kwargs", [{"kind": "lof"}, {"kind": "knn", "k": 0}, {"kind": "hbos", "bin_count": 0}])
def test_invalid_spec(kwargs):
    with pytest.raises(ValueError):
        BaselineSpec(**kwargs)


class TestEstimators:
    def test_knn_fit_predict(self, rng):
        x = np.vstack([rng.normal(size=(99, 2)), [[30.0, 30.0]]])
        est = KNNDetector(k=3)
        assert est.fit_predict(x)[-1] == -1
        assert est.predict([[0.0, 0.0], [50.0, 50.0]]).tolist() == [1, -1]

    def test_hbos_out_of_range_is_anomalous(self, rng):
        est = HBOSDetector(n_bins=5).fit(rng.uniform(size=(100, 2)))
        assert est.predict([[5.0, 0.5]]).tolist() == [-1]
        assert est.get_params() == {"n_bins": 5, "anomaly_threshold": 98}

    def test_hbos_training_scores(self, rng):
        x = rng.uniform(size=(60, 3))
        est = HBOSDetector(n_bins=4).fit(x)
        np.testing.assert_array_equal(est.decision_function(x), hbos_scores(x, 4))


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (10, 2), elements=st.floats(-10, 10)), st.randoms(use_true_random=False))
def test_knn_permutation_equivariant(x, random):
    perm = list(range(10))
    random.shuffle(perm)
    np.testing.assert_allclose(knn_scores(x[perm], 3), knn_scores(x, 3)[perm], atol=1e-12)
