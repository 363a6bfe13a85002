import numpy as np
import pytest

from simproj.errors import NonFiniteLoss, ShapeMismatch, ZeroMask
from simproj.optimizer import (KernelModel, LinearModel, OptimizerConfig,
                               fit, fit_kernel, fit_linear, kernel_gradient,
                               linear_gradient, objective, write_loss_trace)
from simproj.similarity import (projected_similarity, rbf_kernel,
                                uniform_mask)


def finite_difference(design, theta, T, M, sigma_p, h=1e-5):
    """Central-difference oracle for dJ/dtheta on Y = design @ theta."""
    grad = np.zeros_like(theta)
    for k in range(theta.shape[0]):
        for t in range(theta.shape[1]):
            plus, minus = theta.copy(), theta.copy()
            plus[k, t] += h
            minus[k, t] -= h
            j_plus = objective(projected_similarity(design @ plus, sigma_p), T, M)
            j_minus = objective(projected_similarity(design @ minus, sigma_p), T, M)
            grad[k, t] = (j_plus - j_minus) / (2 * h)
    return grad


def random_problem(rng, n_points, n_features):
    X = rng.normal(size=(n_points, n_features))
    T = projected_similarity(rng.normal(size=(n_points, 2)), 1.0)
    M = rng.random((n_points, n_points))
    M = 0.5 * (M + M.T)
    return X, T, M


class TestObjective:
    def test_zero_residual(self, rng):
        P = projected_similarity(rng.normal(size=(6, 2)), 1.0)
        assert objective(P, P, uniform_mask(6)) == 0.0

    def test_hand_computed_two_points(self):
        # N=2, all-ones M (l1 = 4), |P12 - T12| = 0.5 -> J = (0.25+0.25)/8
        P = np.array([[1.0, 0.7], [0.7, 1.0]])
        T = np.array([[1.0, 0.2], [0.2, 1.0]])
        assert np.isclose(objective(P, T, np.ones((2, 2))), 0.0625)

    def test_mask_scaling_cancels(self, rng):
        X, T, M = random_problem(rng, 8, 3)
        P = projected_similarity(rng.normal(size=(8, 2)), 1.0)
        assert np.isclose(objective(P, T, M), objective(P, T, 0.5 * M))

    def test_permutation_invariance(self, rng):
        X, T, M = random_problem(rng, 7, 3)
        P = projected_similarity(rng.normal(size=(7, 2)), 1.0).values
        perm = rng.permutation(7)
        ix = np.ix_(perm, perm)
        assert np.isclose(objective(P, T.values, M),
                          objective(P[ix], T.values[ix], M[ix]))

    def test_zero_mask(self, rng):
        P = projected_similarity(rng.normal(size=(4, 2)), 1.0)
        with pytest.raises(ZeroMask):
            objective(P, P, np.zeros((4, 4)))

    def test_shape_mismatch(self, rng):
        P = projected_similarity(rng.normal(size=(4, 2)), 1.0)
        with pytest.raises(ShapeMismatch):
            objective(P, P, np.ones((3, 3)))


class TestLinearGradient:
    def test_zero_when_target_reached(self, rng):
        X = rng.normal(size=(10, 4))
        W = rng.normal(size=(4, 2))
        T = projected_similarity(X @ W, 1.0)
        g = linear_gradient(LinearModel(W), X, T, uniform_mask(10))
        assert np.allclose(g, 0.0, atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        X, T, M = random_problem(rng, 20, 5)
        W = rng.normal(size=(5, 2)) * 0.3
        analytic = linear_gradient(LinearModel(W), X, T, M, sigma_p=1.0)
        numeric = finite_difference(X, W, T, M, 1.0)
        rel = np.abs(analytic - numeric) / (np.abs(numeric) + 1e-10)
        assert rel.max() <= 1e-4

    def test_row_duplication_keeps_direction(self, rng):
        X, T, M = random_problem(rng, 12, 4)
        W = rng.normal(size=(4, 2)) * 0.3
        g1 = linear_gradient(LinearModel(W), X, T, M)
        X2 = np.vstack([X, X])
        tile = lambda A: np.block([[A, A], [A, A]])
        g2 = linear_gradient(LinearModel(W), X2, tile(T.values), tile(M))
        d1, d2 = g1 / np.linalg.norm(g1), g2 / np.linalg.norm(g2)
        assert np.allclose(d1, d2, atol=1e-6)

    def test_masked_entry_blocks_target(self, rng):
        X, T, M = random_problem(rng, 9, 3)
        W = rng.normal(size=(3, 2)) * 0.3
        M = M.copy()
        M[2, 5] = M[5, 2] = 0.0
        g1 = linear_gradient(LinearModel(W), X, T, M)
        T2 = T.values.copy()
        T2[2, 5] = T2[5, 2] = 0.99
        g2 = linear_gradient(LinearModel(W), X, T2, M)
        assert np.allclose(g1, g2, atol=1e-15)


class TestKernelGradient:
    @pytest.mark.parametrize("seed", range(5))
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(100 + seed)
        X = rng.normal(size=(15, 4))
        K = rbf_kernel(X)
        T = projected_similarity(rng.normal(size=(15, 2)), 1.0)
        M = rng.random((15, 15))
        M = 0.5 * (M + M.T)
        A = rng.normal(size=(15, 2)) * 0.3
        model = KernelModel(coefficients=A, training_data=X, gamma=K.gamma)
        analytic = kernel_gradient(model, K, T, M, sigma_p=1.0)
        numeric = finite_difference(K.values, A, T, M, 1.0)
        rel = np.abs(analytic - numeric) / (np.abs(numeric) + 1e-10)
        assert rel.max() <= 1e-4

    def test_zero_when_target_reached(self, rng):
        X = rng.normal(size=(8, 3))
        K = rbf_kernel(X)
        A = rng.normal(size=(8, 2))
        T = projected_similarity(K.values @ A, 1.0)
        model = KernelModel(coefficients=A, training_data=X, gamma=K.gamma)
        assert np.allclose(kernel_gradient(model, K, T, uniform_mask(8)), 0.0,
                           atol=1e-12)


class TestFit:
    def test_zero_learning_rate_keeps_model(self, rng):
        X, T, M = random_problem(rng, 10, 3)
        W0 = rng.normal(size=(3, 2))
        config = OptimizerConfig(learning_rate=0.0, iterations=20)
        theta, losses = fit(X, T, M, config, init=W0)
        assert np.array_equal(theta, W0)
        assert np.allclose(losses, losses[0])

    def test_reduces_loss(self, rng):
        X, T, M = random_problem(rng, 25, 4)
        config = OptimizerConfig(iterations=200, seed=1)
        _, losses = fit(X, T, M, config)
        assert losses[-1] < losses[0]

    def test_equal_seeds_bitwise_equal(self, rng):
        X, T, M = random_problem(rng, 12, 4)
        config = OptimizerConfig(iterations=50, seed=42)
        theta_a, _ = fit(X, T, M, config)
        theta_b, _ = fit(X, T, M, config)
        assert np.array_equal(theta_a, theta_b)

    def test_divergence_guard(self, rng):
        X, T, M = random_problem(rng, 8, 3)
        config = OptimizerConfig(learning_rate=1e300, iterations=50)
        with pytest.raises(NonFiniteLoss) as excinfo:
            fit(X, T, M, config)
        assert "loss_trace" in (excinfo.value.detail or {})

    def test_fit_linear_and_kernel_wrappers(self, rng):
        X, T, M = random_problem(rng, 10, 3)
        config = OptimizerConfig(iterations=10)
        linear, trace = fit_linear(X, T, M, config)
        assert linear.project(X).shape == (10, 2)
        assert len(trace) == 10
        kernel, trace = fit_kernel(X, T, M, OptimizerConfig(iterations=10,
                                                            learning_rate=1e-4))
        assert kernel.project(X).shape == (10, 2)

    def test_early_stopping_flag(self, rng):
        X, T, M = random_problem(rng, 10, 3)
        config = OptimizerConfig(iterations=500, early_stopping=True, patience=5,
                                 learning_rate=0.0)
        _, losses = fit(X, T, M, config)
        assert len(losses) < 500


def test_loss_trace_csv(tmp_path, rng):
    X, T, M = random_problem(rng, 8, 3)
    _, losses = fit(X, T, M, OptimizerConfig(iterations=5))
    path = tmp_path / "trace.csv"
    write_loss_trace(path, losses)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "iteration,J"
    assert len(lines) == 6
    assert float(lines[1].split(",")[1]) == losses[0]
