"""Similarity embedding learning core.

The masked objective J = 1/(2 ||M||_1) * sum_{i != j} M_ij (P_ij - T_ij)^2
is minimized with Adam over the parameters of a projection Y = D @ Theta,
where D is either the data matrix X (linear model, Theta = W) or the
training kernel matrix K (kernel model, Theta = A). Both gradients share
the same closed form

    dJ/dTheta = -(4 / (sigma_p * ||M||_1)) * D^T L Y

with L the graph Laplacian of C = M * (P - T) * P (diagonal excluded),
which is the exact derivative of J.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteLoss, ShapeMismatch, ZeroMask
from .similarity import (AUTO, KernelMatrix, MaskMatrix, SimilarityMatrix,
                         projected_similarity, rbf_kernel)


@dataclass
class OptimizerConfig:
    learning_rate: float = 1e-3
    iterations: int = 500
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0
    sigma_p: float = 1.0
    early_stopping: bool = False
    patience: int = 50

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("Adam betas must lie in (0, 1)")


@dataclass
class LinearModel:
    weights: np.ndarray  # (n, m)

    def project(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.weights


@dataclass
class KernelModel:
    coefficients: np.ndarray   # (N_train, m)
    training_data: np.ndarray  # (N_train, n)
    gamma: float

    def project(self, X) -> np.ndarray:
        K = rbf_kernel(np.asarray(X, dtype=float), self.training_data,
                       gamma=self.gamma)
        return K.values @ self.coefficients


def _values(matrix) -> np.ndarray:
    return np.asarray(getattr(matrix, "values", matrix), dtype=float)


def objective(P, T, M) -> float:
    Pv, Tv, Mv = _values(P), _values(T), _values(M)
    if not (Pv.shape == Tv.shape == Mv.shape):
        raise ShapeMismatch(f"shapes differ: {Pv.shape}, {Tv.shape}, {Mv.shape}")
    norm = np.abs(Mv).sum()
    if norm <= 0:
        raise ZeroMask("mask l1 norm is zero")
    weights = Mv.copy()
    np.fill_diagonal(weights, 0.0)
    residual = Pv - Tv
    return float((weights * residual * residual).sum() / (2.0 * norm))


def _gradient(D: np.ndarray, theta: np.ndarray, Tv: np.ndarray, Mv: np.ndarray,
              sigma_p: float) -> np.ndarray:
    Y = D @ theta
    Pv = projected_similarity(Y, sigma_p).values
    C = Mv * (Pv - Tv) * Pv
    np.fill_diagonal(C, 0.0)
    C = 0.5 * (C + C.T)
    LY = C.sum(axis=1)[:, None] * Y - C @ Y
    return -(4.0 / (sigma_p * np.abs(Mv).sum())) * (D.T @ LY)


def linear_gradient(model: LinearModel, X, T, M, sigma_p: float = 1.0) -> np.ndarray:
    D = np.asarray(X, dtype=float)
    Tv, Mv = _values(T), _values(M)
    if D.shape[0] != Tv.shape[0] or Tv.shape != Mv.shape:
        raise ShapeMismatch(f"inconsistent shapes: X {D.shape}, T {Tv.shape}, M {Mv.shape}")
    if D.shape[1] != model.weights.shape[0]:
        raise ShapeMismatch(f"X has {D.shape[1]} columns, W has {model.weights.shape[0]} rows")
    return _gradient(D, model.weights, Tv, Mv, sigma_p)


def kernel_gradient(model: KernelModel, K, T, M, sigma_p: float = 1.0) -> np.ndarray:
    D = _values(K)
    Tv, Mv = _values(T), _values(M)
    if D.shape[0] != D.shape[1] or D.shape[0] != Tv.shape[0] or Tv.shape != Mv.shape:
        raise ShapeMismatch(f"inconsistent shapes: K {D.shape}, T {Tv.shape}, M {Mv.shape}")
    if D.shape[1] != model.coefficients.shape[0]:
        raise ShapeMismatch("K columns must match coefficient rows")
    return _gradient(D, model.coefficients, Tv, Mv, sigma_p)


def fit(design, T, M, config: OptimizerConfig, init=None, n_dims: int = 2):
    """Run Adam on Theta with Y = design @ Theta.

    Returns (theta, loss_trace). ``init`` may be an (n, n_dims) array; when
    absent Theta starts from seeded Gaussian noise with sd 1/sqrt(n).
    """
    D = np.asarray(design, dtype=float)
    Tv, Mv = _values(T), _values(M)
    if Tv.shape != (D.shape[0], D.shape[0]) or Mv.shape != Tv.shape:
        raise ShapeMismatch(f"design {D.shape} incompatible with T {Tv.shape} / M {Mv.shape}")
    norm = np.abs(Mv).sum()
    if norm <= 0:
        raise ZeroMask("mask l1 norm is zero")

    n = D.shape[1]
    if init is not None:
        theta = np.array(init, dtype=float)
        if theta.shape != (n, n_dims):
            raise ShapeMismatch(f"init shape {theta.shape} != {(n, n_dims)}")
    else:
        rng = np.random.default_rng(config.seed)
        theta = rng.normal(0.0, 1.0 / np.sqrt(n), size=(n, n_dims))

    b1, b2, eps = config.adam_beta1, config.adam_beta2, config.adam_epsilon
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    losses: list[float] = []
    best = np.inf
    stale = 0
    for t in range(1, config.iterations + 1):
        g = _gradient(D, theta, Tv, Mv, config.sigma_p)
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        m_hat = m / (1 - b1 ** t)
        v_hat = v / (1 - b2 ** t)
        theta = theta - config.learning_rate * m_hat / (np.sqrt(v_hat) + eps)
        loss = objective(projected_similarity(D @ theta, config.sigma_p), Tv, Mv)
        losses.append(loss)
        if not np.isfinite(loss):
            raise NonFiniteLoss("objective diverged", detail={"loss_trace": losses})
        if config.early_stopping:
            if loss < best - 1e-12:
                best, stale = loss, 0
            else:
                stale += 1
                if stale >= config.patience:
                    break
    return theta, losses


def fit_linear(X, T, M, config: OptimizerConfig, init_model: LinearModel | None = None):
    init = init_model.weights if init_model is not None else None
    theta, losses = fit(X, T, M, config, init=init)
    return LinearModel(weights=theta), losses


def fit_kernel(X_train, T, M, config: OptimizerConfig, gamma=AUTO,
               init_model: KernelModel | None = None):
    X = np.asarray(X_train, dtype=float)
    if init_model is not None:
        gamma = init_model.gamma
    K = rbf_kernel(X, gamma=gamma)
    init = init_model.coefficients if init_model is not None else None
    theta, losses = fit(K.values, T, M, config, init=init)
    return KernelModel(coefficients=theta, training_data=X, gamma=K.gamma), losses


def write_loss_trace(path, losses) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "J"])
        for i, loss in enumerate(losses):
            writer.writerow([i + 1, repr(float(loss))])
