"""Similarity, kernel and mask matrix builders.

All similarities are Gaussian: exp(-squared distance / scale). Squared
distances are computed via expanded dot products and clamped at zero to
absorb negative round-off.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (DimensionMismatch, NonPositiveGamma, NonPositiveSigma,
                     OutOfRange, SinglePoint)

AUTO = "auto"


@dataclass
class SimilarityMatrix:
    values: np.ndarray  # (N, N), symmetric, unit diagonal, entries in [0, 1]
    sigma: float


@dataclass
class MaskMatrix:
    values: np.ndarray  # (N, N), symmetric, entries in [0, 1]

    @property
    def l1_norm(self) -> float:
        return float(np.abs(self.values).sum())


@dataclass
class KernelMatrix:
    values: np.ndarray  # (N, N_train)
    gamma: float


def squared_distances(rows, cols=None) -> np.ndarray:
    A = np.asarray(rows, dtype=float)
    B = A if cols is None else np.asarray(cols, dtype=float)
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * A @ B.T
    np.maximum(sq, 0.0, out=sq)
    if cols is None:
        np.fill_diagonal(sq, 0.0)
        sq = 0.5 * (sq + sq.T)
    return sq


def mean_squared_pairwise_distance(coords) -> float:
    """Mean of ||y_i - y_j||^2 over all i != j."""
    Y = np.asarray(coords, dtype=float)
    n = Y.shape[0]
    if n < 2:
        raise SinglePoint("need at least two points")
    sq = squared_distances(Y)
    return float(sq.sum() / (n * (n - 1)))


def mean_pairwise_distance(points) -> float:
    """Mean of ||x_i - x_j|| over all i != j."""
    X = np.asarray(points, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise SinglePoint("need at least two points")
    d = np.sqrt(squared_distances(X))
    return float(d.sum() / (n * (n - 1)))


def projected_similarity(layout, sigma_p: float = 1.0) -> SimilarityMatrix:
    if not sigma_p > 0:
        raise NonPositiveSigma(f"sigma_p must be positive, got {sigma_p}")
    Y = np.asarray(layout, dtype=float)
    values = np.exp(-squared_distances(Y) / sigma_p)
    return SimilarityMatrix(values=values, sigma=float(sigma_p))


def clone_target(coords, sigma_copy=AUTO) -> SimilarityMatrix:
    Y = np.asarray(coords, dtype=float)
    if Y.shape[0] < 2:
        raise SinglePoint("cannot build a clone target from a single point")
    if sigma_copy == AUTO:
        sigma_copy = mean_squared_pairwise_distance(Y)
    if not sigma_copy > 0:
        raise NonPositiveSigma(f"sigma_copy must be positive, got {sigma_copy}")
    values = np.exp(-squared_distances(Y) / sigma_copy)
    return SimilarityMatrix(values=values, sigma=float(sigma_copy))


def rbf_kernel(rows, cols=None, gamma=AUTO) -> KernelMatrix:
    A = np.asarray(rows, dtype=float)
    B = A if cols is None else np.asarray(cols, dtype=float)
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(
            f"feature dimensions differ: {A.shape[1]} vs {B.shape[1]}")
    if gamma == AUTO:
        if cols is not None and B is not A:
            raise NonPositiveGamma("AUTO gamma requires rows == cols (training set)")
        gamma = mean_pairwise_distance(A)
    if not gamma > 0:
        raise NonPositiveGamma(f"gamma must be positive, got {gamma}")
    values = np.exp(-squared_distances(A, None if B is A else B) / gamma ** 2)
    return KernelMatrix(values=values, gamma=float(gamma))


def uniform_mask(n: int, value: float = 1.0) -> MaskMatrix:
    if n < 2:
        raise OutOfRange(f"mask needs n >= 2, got {n}")
    if not 0 <= value <= 1:
        raise OutOfRange(f"mask value must lie in [0, 1], got {value}")
    return MaskMatrix(values=np.full((n, n), float(value)))
