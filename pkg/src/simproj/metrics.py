"""Layout quality measures: weighted nearest-centroid precision,
silhouette scaled to [-100, 100], and normalized 10-NN neighbor error."""

from dataclasses import dataclass

import numpy as np

from .errors import SingleClass, TooFewPoints
from .similarity import squared_distances


@dataclass
class MetricReport:
    nearest_centroid_precision: float       # [0, 100]
    silhouette_scaled: float                 # [-100, 100]
    neighbor_error_mean: float               # [0, 1]
    neighbor_error_per_point: np.ndarray     # (N,), each in [0, 1]

    def as_dict(self) -> dict:
        """JSON-ready dict; label metrics are omitted when unavailable (NaN)."""
        out = {
            "neighbor_error_mean": self.neighbor_error_mean,
            "neighbor_error_per_point": [float(v) for v in self.neighbor_error_per_point],
        }
        if not np.isnan(self.nearest_centroid_precision):
            out["nearest_centroid_precision"] = self.nearest_centroid_precision
        if not np.isnan(self.silhouette_scaled):
            out["silhouette_scaled"] = self.silhouette_scaled
        return out


def _coords(layout) -> np.ndarray:
    return np.asarray(getattr(layout, "coords", layout), dtype=float)


def _check_classes(labels) -> np.ndarray:
    labels = np.asarray(labels)
    if np.unique(labels).size < 2:
        raise SingleClass("need at least two classes")
    return labels


def nearest_centroid_precision(layout, labels) -> float:
    """Fit one centroid per class, predict every point, and return the
    support-weighted average of per-class precision, times 100."""
    Y = _coords(layout)
    labels = _check_classes(labels)
    classes = np.unique(labels)
    centroids = np.array([Y[labels == c].mean(axis=0) for c in classes])
    predicted = classes[np.argmin(squared_distances(Y, centroids), axis=1)]

    total = 0.0
    n = len(labels)
    for c in classes:
        hits = predicted == c
        precision = float((labels[hits] == c).sum() / hits.sum()) if hits.any() else 0.0
        total += (labels == c).sum() / n * precision
    return 100.0 * total


def silhouette_scaled(layout, labels) -> float:
    """Mean silhouette with Euclidean distance, scaled by 100. Points in
    singleton clusters, and points where a = b = 0, contribute 0."""
    Y = _coords(layout)
    labels = _check_classes(labels)
    classes = np.unique(labels)
    D = np.sqrt(squared_distances(Y))
    n = len(labels)
    members = {c: labels == c for c in classes}
    scores = np.zeros(n)
    for i in range(n):
        own = members[labels[i]].copy()
        own[i] = False
        if not own.any():
            continue  # singleton cluster
        a = D[i, own].mean()
        b = min(D[i, members[c]].mean() for c in classes if c != labels[i])
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return 100.0 * float(scores.mean())


def exact_knn(distances: np.ndarray, k: int) -> np.ndarray:
    """Row-wise indices of the k nearest points, self excluded. Ties break
    toward the lower index (stable sort on the distance row)."""
    n = distances.shape[0]
    out = np.empty((n, k), dtype=int)
    for i in range(n):
        order = np.argsort(distances[i], kind="stable")
        out[i] = order[order != i][:k]
    return out


def neighbor_error(layout, X_highdim, k: int = 10):
    """Per point: sum of high-dimensional distances to its k visual-space
    neighbors, min-max normalized across points. All-equal raw scores
    normalize to zeros. Returns (per_point, mean)."""
    Y = _coords(layout)
    X = np.asarray(X_highdim, dtype=float)
    n = Y.shape[0]
    if n <= k:
        raise TooFewPoints(f"need more than k={k} points, got {n}")
    if X.shape[0] != n:
        raise TooFewPoints("layout and feature matrix must be row-aligned")
    d_low = np.sqrt(squared_distances(Y))
    d_high = np.sqrt(squared_distances(X))
    neighbors = exact_knn(d_low, k)
    raw = np.array([d_high[i, neighbors[i]].sum() for i in range(n)])
    spread = raw.max() - raw.min()
    per_point = np.zeros(n) if spread == 0 else (raw - raw.min()) / spread
    return per_point, float(per_point.mean())


def evaluate(layout, X_highdim, labels=None, k: int = 10) -> MetricReport:
    per_point, mean = neighbor_error(layout, X_highdim, k=k)
    if labels is None:
        precision = float("nan")
        silhouette = float("nan")
    else:
        precision = nearest_centroid_precision(layout, labels)
        silhouette = silhouette_scaled(layout, labels)
    return MetricReport(
        nearest_centroid_precision=precision,
        silhouette_scaled=silhouette,
        neighbor_error_mean=mean,
        neighbor_error_per_point=per_point,
    )
