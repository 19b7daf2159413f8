import numpy as np
import pytest

from sentinel.errors import DimensionMismatch
from sentinel.models import FeatureMatrix, IsolationForestParams, iforest_fit
from sentinel.models.iforest import average_path_adjustment


def gaussian_with_outlier(seed=0, n=100, d=3, sigma=10.0):
    rng = np.random.default_rng(seed)
    rows = rng.normal(0.0, 1.0, size=(n, d))
    rows[-1] = sigma  # one point at +10 sigma in every coordinate
    return FeatureMatrix(rows, tuple(f"f{i}" for i in range(d)))


class TestPathAdjustment:
    def test_c_of_two(self):
        # 2*H(1) - 2*(1/2) = 2 - 1
        assert average_path_adjustment(2) == pytest.approx(1.0)

    def test_degenerate_sizes(self):
        assert average_path_adjustment(0) == 0.0
        assert average_path_adjustment(1) == 0.0

    def test_exact_harmonic_below_cutoff(self):
        # c(3) = 2*(1 + 1/2) - 2*(2/3)
        assert average_path_adjustment(3) == pytest.approx(3.0 - 4.0 / 3.0)

    def test_asymptotic_form_continuity(self):
        lo = average_path_adjustment(21)
        hi = average_path_adjustment(22)
        assert hi > lo
        assert hi - lo < 0.2


class TestScoring:
    def test_score_half_when_path_equals_adjustment(self):
        # score = 2^(-E/c); E = c gives exactly 0.5
        assert 2.0 ** (-1.0) == 0.5

    def test_outlier_has_strictly_maximal_score(self):
        X = gaussian_with_outlier()
        forest = iforest_fit(X, IsolationForestParams(n_estimators=100, max_samples=64, rng_seed=1))
        scores = forest.score(X)
        assert scores.argmax() == X.n - 1
        assert scores[-1] > np.delete(scores, -1).max()

    def test_scores_within_open_unit_interval(self):
        X = gaussian_with_outlier(seed=5)
        forest = iforest_fit(X, IsolationForestParams(n_estimators=50, rng_seed=2))
        scores = forest.score(X)
        assert np.all(scores > 0.0) and np.all(scores < 1.0)

    def test_identical_rows_score_equal(self):
        rows = np.ones((40, 3))
        X = FeatureMatrix(rows, ("a", "b", "c"))
        forest = iforest_fit(X, IsolationForestParams(n_estimators=20, rng_seed=0))
        assert forest.degenerate
        scores = forest.score(X)
        assert np.allclose(scores, scores[0])

    def test_duplicated_row_scores_identically(self):
        rng = np.random.default_rng(3)
        rows = rng.normal(size=(30, 2))
        rows[7] = rows[21]
        X = FeatureMatrix(rows, ("a", "b"))
        forest = iforest_fit(X, IsolationForestParams(n_estimators=40, rng_seed=4))
        scores = forest.score(X)
        assert scores[7] == scores[21]

    def test_single_tree_psi_two_has_one_split(self):
        rng = np.random.default_rng(0)
        X = FeatureMatrix(rng.normal(size=(2, 2)), ("a", "b"))
        forest = iforest_fit(X, IsolationForestParams(n_estimators=1, max_samples=2, rng_seed=0))
        assert forest.trees[0].n_splits == 1

    def test_dimension_mismatch(self):
        X = gaussian_with_outlier()
        forest = iforest_fit(X, IsolationForestParams(n_estimators=10, rng_seed=0))
        with pytest.raises(DimensionMismatch):
            forest.score(FeatureMatrix(np.zeros((3, 5)), tuple("abcde")))

    def test_score_decreases_with_path_length(self):
        c = average_path_adjustment(128)
        paths = np.linspace(1.0, 14.0, 50)
        scores = 2.0 ** (-paths / c)
        assert np.all(np.diff(scores) < 0)

    def test_row_permutation_permutes_scores(self):
        X = gaussian_with_outlier(seed=9)
        forest = iforest_fit(X, IsolationForestParams(n_estimators=30, rng_seed=5))
        perm = np.random.default_rng(0).permutation(X.n)
        direct = forest.score(X)[perm]
        permuted = forest.score(FeatureMatrix(X.rows[perm], X.feature_names))
        assert np.array_equal(direct, permuted)


class TestLabeling:
    def test_contamination_bounds_anomaly_count(self):
        rng = np.random.default_rng(1)
        X = FeatureMatrix(rng.normal(size=(200, 3)), ("a", "b", "c"))
        forest = iforest_fit(X, IsolationForestParams(n_estimators=50, rng_seed=1))
        labeling = forest.label(X, contamination=0.01)
        assert labeling.n_anomalies <= 2

    def test_half_contamination_flags_about_half(self):
        rng = np.random.default_rng(2)
        X = FeatureMatrix(rng.normal(size=(400, 2)), ("a", "b"))
        forest = iforest_fit(X, IsolationForestParams(n_estimators=60, rng_seed=2))
        labeling = forest.label(X, contamination=0.5)
        assert abs(labeling.n_anomalies - 200) <= 2

    def test_single_extreme_outlier_flagged(self):
        X = gaussian_with_outlier(seed=4)
        forest = iforest_fit(X, IsolationForestParams(n_estimators=100, rng_seed=3))
        labeling = forest.label(X, contamination=0.01)
        assert labeling.labels[-1]

    def test_determinism_given_seed(self):
        X = gaussian_with_outlier(seed=6)
        params = IsolationForestParams(n_estimators=25, rng_seed=42)
        a = iforest_fit(X, params).score(X)
        b = iforest_fit(X, params).score(X)
        assert np.array_equal(a, b)

    def test_ties_at_threshold_stay_normal(self):
        rows = np.ones((50, 2))
        X = FeatureMatrix(rows, ("a", "b"))
        forest = iforest_fit(X, IsolationForestParams(n_estimators=10, rng_seed=0))
        labeling = forest.label(X, contamination=0.1)
        # all scores tie at the threshold, so nothing is strictly above it
        assert labeling.n_anomalies == 0
        assert labeling.degenerate
