"""Initial 2D layouts: PCA-2D, Force Scheme, and external layout files."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVariance, EmptyData, ParseError
from .preprocess import _svd_components
from .similarity import squared_distances


@dataclass
class Layout2D:
    coords: np.ndarray  # (N, 2)
    source: str         # pca | force | external | learned

    def __len__(self) -> int:
        return self.coords.shape[0]


def pca_2d(X) -> Layout2D:
    data = np.asarray(X, dtype=float)
    if data.ndim != 2 or data.shape[0] < 3:
        raise EmptyData(f"need >= 3 rows, got shape {data.shape}")
    centered = data - data.mean(axis=0)
    components, variances = _svd_components(centered)
    if not variances.sum() > 0:
        raise DegenerateVariance("zero total variance")
    coords = centered @ components[:2].T
    if coords.shape[1] < 2:  # rank-1 feature space: pad the second axis
        coords = np.hstack([coords, np.zeros((coords.shape[0], 1))])
    return Layout2D(coords=coords, source="pca")


def force_scheme(X, iterations: int = 50, seed: int = 0) -> Layout2D:
    """Iterative force-based placement: each sweep moves every point
    toward/away from every other by a (d_high - d_low)/d_low fraction of
    their 2D offset, damped by 1/8. High-D distances are normalized by
    their maximum; sweep order is reshuffled from the seed."""
    data = np.asarray(X, dtype=float)
    if data.ndim != 2 or data.shape[0] < 3:
        raise EmptyData(f"need >= 3 rows, got shape {data.shape}")
    n = data.shape[0]
    rng = np.random.default_rng(seed)
    Y = rng.random((n, 2))

    d_high = np.sqrt(squared_distances(data))
    peak = d_high.max()
    if peak > 0:
        d_high = d_high / peak
    damping = 1.0 / 8.0
    eps = 1e-9

    for _ in range(iterations):
        order = rng.permutation(n)
        for i in order:
            diff = Y - Y[i]
            d_low = np.sqrt((diff * diff).sum(axis=1))
            d_low[i] = 1.0
            delta = (d_high[i] - d_low) / np.maximum(d_low, eps)
            delta[i] = 0.0
            Y = Y + damping * delta[:, None] * diff
    return Layout2D(coords=Y, source="force")


def layout_stress(X, layout: Layout2D) -> float:
    """Sum of (d_high - d_low)^2 with d_high max-normalized as in force_scheme."""
    d_high = np.sqrt(squared_distances(np.asarray(X, dtype=float)))
    peak = d_high.max()
    if peak > 0:
        d_high = d_high / peak
    d_low = np.sqrt(squared_distances(layout.coords))
    iu = np.triu_indices(d_high.shape[0], 1)
    return float(((d_high - d_low)[iu] ** 2).sum())


def load_external_layout(path) -> Layout2D:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split(",")
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected two comma-separated numbers")
            try:
                x, y = float(parts[0]), float(parts[1])
            except ValueError:
                raise ParseError(f"line {lineno}: non-numeric token") from None
            if not (np.isfinite(x) and np.isfinite(y)):
                raise ParseError(f"line {lineno}: non-finite coordinate")
            rows.append((x, y))
    if not rows:
        raise ParseError("file contains no coordinate rows")
    return Layout2D(coords=np.array(rows, dtype=float), source="external")


def save_layout(path, layout: Layout2D) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# source={layout.source}\n")
        for x, y in layout.coords:
            fh.write(f"{float(x)!r},{float(y)!r}\n")
