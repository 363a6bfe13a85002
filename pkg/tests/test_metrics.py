import numpy as np
import pytest

from simproj.errors import SingleClass, TooFewPoints
from simproj.metrics import (evaluate, exact_knn, nearest_centroid_precision,
                             neighbor_error, silhouette_scaled)


def precision_oracle(Y, labels):
    """Scalar recomputation: per-class precision, support weighted."""
    Y = np.asarray(Y, dtype=float)
    classes = sorted(set(labels))
    centroids = {c: Y[labels == c].mean(axis=0) for c in classes}
    predicted = []
    for point in Y:
        best = min(classes, key=lambda c: ((point - centroids[c]) ** 2).sum())
        predicted.append(best)
    predicted = np.array(predicted)
    total = 0.0
    for c in classes:
        hits = predicted == c
        p = (labels[hits] == c).mean() if hits.any() else 0.0
        total += (labels == c).mean() * p
    return 100.0 * total


def silhouette_oracle(Y, labels):
    Y = np.asarray(Y, dtype=float)
    n = len(labels)
    scores = []
    for i in range(n):
        same = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not same:
            scores.append(0.0)
            continue
        a = np.mean([np.linalg.norm(Y[i] - Y[j]) for j in same])
        b = min(np.mean([np.linalg.norm(Y[i] - Y[j])
                         for j in range(n) if labels[j] == c])
                for c in set(labels) if c != labels[i])
        denom = max(a, b)
        scores.append(0.0 if denom == 0 else (b - a) / denom)
    return 100.0 * float(np.mean(scores))


def neighbor_error_oracle(Y, X, k):
    Y, X = np.asarray(Y, dtype=float), np.asarray(X, dtype=float)
    n = len(Y)
    raw = []
    for i in range(n):
        d_low = [np.linalg.norm(Y[i] - Y[j]) for j in range(n)]
        order = sorted((d, j) for j, d in enumerate(d_low) if j != i)
        raw.append(sum(np.linalg.norm(X[i] - X[j]) for _, j in order[:k]))
    raw = np.array(raw)
    spread = raw.max() - raw.min()
    if spread == 0:
        return np.zeros(n)
    return (raw - raw.min()) / spread


class TestNearestCentroidPrecision:
    def test_matches_oracle(self, rng):
        Y = rng.normal(size=(50, 2))
        labels = rng.integers(0, 3, size=50)
        got = nearest_centroid_precision(Y, labels)
        assert abs(got - precision_oracle(Y, labels)) <= 1e-10

    def test_perfect_separation(self, two_blob_data):
        X, labels = two_blob_data
        assert nearest_centroid_precision(X[:, :2], labels) == 100.0

    def test_null_layout_near_chance(self):
        # random layouts against balanced binary labels hover around 50
        values = []
        for seed in range(20):
            gen = np.random.default_rng(seed)
            Y = gen.normal(size=(100, 2))
            labels = np.array([0, 1] * 50)
            values.append(nearest_centroid_precision(Y, labels))
        assert abs(np.mean(values) - 50.0) <= 10.0

    def test_rigid_motion_invariance(self, rng):
        Y = rng.normal(size=(40, 2))
        labels = rng.integers(0, 2, size=40)
        theta = 1.1
        R = np.array([[np.cos(theta), -np.sin(theta)],
                      [np.sin(theta), np.cos(theta)]])
        moved = Y @ R + [3.0, -7.0]
        assert np.isclose(nearest_centroid_precision(Y, labels),
                          nearest_centroid_precision(moved, labels), atol=1e-9)

    def test_single_class_rejected(self, rng):
        with pytest.raises(SingleClass):
            nearest_centroid_precision(rng.normal(size=(5, 2)), np.zeros(5))


class TestSilhouette:
    def test_matches_oracle(self, rng):
        Y = rng.normal(size=(40, 2))
        labels = rng.integers(0, 3, size=40)
        got = silhouette_scaled(Y, labels)
        assert abs(got - silhouette_oracle(Y, labels)) <= 1e-10

    def test_well_separated_near_100(self, two_blob_data):
        X, labels = two_blob_data
        assert silhouette_scaled(X[:, :2], labels) > 90.0

    def test_singleton_cluster_contributes_zero(self):
        Y = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0]])
        labels = np.array([0, 0, 1])
        # point 2 is a singleton and scores 0; the other two score ~1
        expected = 100.0 * (2 * ((np.hypot(4.95, 5.0) - 0.1) /
                                 np.hypot(4.95, 5.0) +
                                 0.0) / 3)
        got = silhouette_scaled(Y, labels)
        oracle = silhouette_oracle(Y, labels)
        assert abs(got - oracle) <= 1e-10
        assert got < expected + 1e-6

    def test_coincident_points_score_zero(self):
        Y = np.zeros((4, 2))
        labels = np.array([0, 0, 1, 1])
        assert silhouette_scaled(Y, labels) == 0.0


class TestExactKnn:
    def test_matches_brute_force(self, rng):
        Y = rng.normal(size=(30, 2))
        D = np.linalg.norm(Y[:, None] - Y[None, :], axis=2)
        got = exact_knn(D, 5)
        for i in range(30):
            order = sorted((D[i, j], j) for j in range(30) if j != i)
            assert list(got[i]) == [j for _, j in order[:5]]

    def test_tie_breaks_to_lower_index(self):
        D = np.array([[0.0, 1.0, 1.0, 2.0],
                      [1.0, 0.0, 1.0, 1.0],
                      [1.0, 1.0, 0.0, 1.0],
                      [2.0, 1.0, 1.0, 0.0]])
        got = exact_knn(D, 2)
        assert list(got[0]) == [1, 2]
        assert list(got[3]) == [1, 2]


class TestNeighborError:
    def test_matches_oracle(self, rng):
        X = rng.normal(size=(40, 6))
        Y = rng.normal(size=(40, 2))
        per_point, mean = neighbor_error(Y, X, k=10)
        oracle = neighbor_error_oracle(Y, X, 10)
        assert np.abs(per_point - oracle).max() <= 1e-10
        assert np.isclose(mean, oracle.mean())

    def test_range_and_extremes(self, rng):
        X = rng.normal(size=(25, 4))
        Y = rng.normal(size=(25, 2))
        per_point, _ = neighbor_error(Y, X, k=10)
        assert per_point.min() == 0.0
        assert per_point.max() == 1.0

    def test_all_equal_raw_scores_give_zeros(self, rng):
        # coincident high-D points make every raw score exactly zero
        Y = rng.normal(size=(12, 2))
        per_point, mean = neighbor_error(Y, np.zeros((12, 3)), k=11)
        assert np.all(per_point == 0.0)
        assert mean == 0.0

    def test_too_few_points(self, rng):
        with pytest.raises(TooFewPoints):
            neighbor_error(rng.normal(size=(5, 2)), rng.normal(size=(5, 3)), k=10)


class TestEvaluate:
    def test_with_labels(self, two_blob_data):
        X, labels = two_blob_data
        report = evaluate(X[:, :2], X, labels)
        assert report.nearest_centroid_precision == 100.0
        d = report.as_dict()
        assert "nearest_centroid_precision" in d
        assert len(d["neighbor_error_per_point"]) == len(X)

    def test_without_labels_omits_label_metrics(self, two_blob_data):
        X, _ = two_blob_data
        report = evaluate(X[:, :2], X)
        assert np.isnan(report.nearest_centroid_precision)
        d = report.as_dict()
        assert "nearest_centroid_precision" not in d
        assert "silhouette_scaled" not in d
        assert "neighbor_error_mean" in d
