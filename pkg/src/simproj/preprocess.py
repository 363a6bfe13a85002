"""PCA preprocessing: mean-centering plus projection onto the smallest
set of principal components that retains a requested fraction of the
variance. Optional unit-variance scaling and whitening."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateVariance, DimensionMismatch, EmptyData, NonFiniteInput


@dataclass
class PcaReduction:
    mean: np.ndarray                    # (n,)
    components: np.ndarray              # (k, n), orthonormal rows
    explained_variance_ratio: np.ndarray  # (k,), non-increasing
    retained_fraction: float
    scale: np.ndarray | None = None     # per-feature std when scaling is on
    whiten: bool = False
    component_std: np.ndarray = field(default=None)  # sqrt of component variances

    @property
    def n_components(self) -> int:
        return self.components.shape[0]


def _fix_signs(components: np.ndarray) -> np.ndarray:
    """Flip each component so its largest-magnitude entry is positive."""
    out = components.copy()
    for row in out:
        j = np.argmax(np.abs(row))
        if row[j] < 0:
            row *= -1
    return out


def _svd_components(centered: np.ndarray):
    """Principal directions and per-component variances (1/(N-1))."""
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    variances = svals ** 2 / (centered.shape[0] - 1)
    return _fix_signs(vt), variances


def fit_pca(data, retained_fraction: float = 0.9, scale: bool = False,
            whiten: bool = False) -> PcaReduction:
    X = np.asarray(data, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 1:
        raise EmptyData(f"need a 2-D matrix with >=2 rows, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise NonFiniteInput("input contains NaN or Inf")
    if not 0 < retained_fraction <= 1:
        raise ValueError("retained_fraction must lie in (0, 1]")

    mean = X.mean(axis=0)
    std = None
    Xc = X - mean
    if scale:
        std = X.std(axis=0, ddof=1)
        std[std == 0] = 1.0
        Xc = Xc / std

    components, variances = _svd_components(Xc)
    total = variances.sum()
    if not total > 0:
        raise DegenerateVariance("all rows are identical (zero total variance)")
    ratio = variances / total
    cumulative = np.cumsum(ratio)
    k = int(np.searchsorted(cumulative, retained_fraction - 1e-12) + 1)
    k = min(k, len(ratio))

    return PcaReduction(
        mean=mean,
        components=components[:k],
        explained_variance_ratio=ratio[:k],
        retained_fraction=retained_fraction,
        scale=std,
        whiten=whiten,
        component_std=np.sqrt(variances[:k]),
    )


def transform(reduction: PcaReduction, data) -> np.ndarray:
    X = np.atleast_2d(np.asarray(data, dtype=float))
    if X.shape[1] != reduction.mean.shape[0]:
        raise DimensionMismatch(
            f"expected {reduction.mean.shape[0]} columns, got {X.shape[1]}")
    Xc = X - reduction.mean
    if reduction.scale is not None:
        Xc = Xc / reduction.scale
    Z = Xc @ reduction.components.T
    if reduction.whiten:
        safe = np.where(reduction.component_std > 0, reduction.component_std, 1.0)
        Z = Z / safe
    return Z


def inverse_transform(reduction: PcaReduction, reduced) -> np.ndarray:
    Z = np.atleast_2d(np.asarray(reduced, dtype=float))
    if reduction.whiten:
        Z = Z * reduction.component_std
    X = Z @ reduction.components
    if reduction.scale is not None:
        X = X * reduction.scale
    return X + reduction.mean
