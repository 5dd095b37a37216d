"""Forward GP: kernel, likelihood, gradients, training, prediction."""

import numpy as np
import pytest

from invtremo.exceptions import NumericalFailure
from invtremo.gp import (
    ForwardGpModel,
    KernelParams,
    TrainConfig,
    chol_with_jitter,
    fit_gp,
    kernel_eval,
    kernel_matrix,
    lml_and_grad,
    log_marginal_likelihood,
)


def dense_predict(model, Xs):
    """Direct dense-inverse posterior, the oracle for the factorized path."""
    A = kernel_matrix(model.kernel, model.train_inputs) + model.noise_variance * np.eye(
        len(model.train_targets)
    )
    Ai = np.linalg.inv(A)
    Ks = kernel_matrix(model.kernel, Xs, model.train_inputs)
    mu = model.mean_const + Ks @ Ai @ (model.train_targets - model.mean_const)
    var = model.kernel.signal_variance - np.sum((Ks @ Ai) * Ks, axis=1)
    return mu, var


class TestKernel:
    def test_diagonal_is_signal_variance(self):
        p = KernelParams(2.5, np.array([0.3, 0.7]))
        x = np.array([0.1, 0.9])
        assert kernel_eval(p, x, x) == pytest.approx(2.5)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        p = KernelParams(1.3, rng.uniform(0.2, 2.0, size=4))
        for _ in range(20):
            a, b = rng.random(4), rng.random(4)
            assert kernel_eval(p, a, b) == pytest.approx(kernel_eval(p, b, a), rel=1e-12)

    def test_hand_value(self):
        p = KernelParams(1.0, np.ones(2))
        assert kernel_eval(p, np.zeros(2), np.ones(2)) == pytest.approx(np.exp(-1.0))

    def test_dimension_mismatch(self):
        p = KernelParams(1.0, np.ones(2))
        with pytest.raises(ValueError):
            kernel_eval(p, np.zeros(3), np.zeros(3))

    def test_positive_params_required(self):
        with pytest.raises(ValueError):
            KernelParams(0.0, np.ones(2))
        with pytest.raises(ValueError):
            KernelParams(1.0, np.array([1.0, -0.1]))


class TestLogMarginalLikelihood:
    def test_scalar_zero_target(self):
        val = log_marginal_likelihood(
            np.zeros((1, 1)), np.zeros(1), KernelParams(1.0, np.ones(1)), 0.0
        )
        assert val == pytest.approx(0.0, abs=1e-12)

    def test_scalar_nonzero_target(self):
        val = log_marginal_likelihood(
            np.zeros((1, 1)), np.array([2.0]), KernelParams(1.0, np.ones(1)), 0.0
        )
        assert val == pytest.approx(-2.0, abs=1e-12)

    def test_gradient_matches_finite_differences(self):
        """Analytic gradient vs central differences on random 10-point data."""
        rng = np.random.default_rng(3)
        X = rng.random((10, 3))
        y = rng.standard_normal(10)
        theta = np.log(np.array([0.4, 0.8, 1.2, 1.5, 0.05]))
        _, grad = lml_and_grad(X, y, theta)
        h = 1e-5
        for i in range(len(theta)):
            tp, tm = theta.copy(), theta.copy()
            tp[i] += h
            tm[i] -= h
            fd = (lml_and_grad(X, y, tp)[0] - lml_and_grad(X, y, tm)[0]) / (2 * h)
            assert grad[i] == pytest.approx(fd, rel=1e-4)

    def test_jitter_ladder_exhaustion(self):
        bad = np.array([[1.0, 2.0], [2.0, 1.0]])  # indefinite
        with pytest.raises(NumericalFailure):
            chol_with_jitter(bad)


class TestFit:
    def test_recovers_lengthscale_majority(self):
        """Data drawn from a known GP recovers the lengthscale within a
        factor of two in at least 80% of seeds."""
        hits = 0
        for s in range(20):
            rng = np.random.default_rng(100 + s)
            X = rng.random((60, 1))
            K = kernel_matrix(KernelParams(1.0, np.array([0.3])), X) + 0.01 * np.eye(60)
            y = np.linalg.cholesky(K) @ rng.standard_normal(60)
            model = fit_gp(X, y, TrainConfig(n_restarts=3, seed=s))
            hits += 0.15 <= model.kernel.lengthscales[0] <= 0.6
        assert hits >= 16

    def test_constant_targets(self):
        rng = np.random.default_rng(7)
        X = rng.random((30, 4))
        model = fit_gp(X, np.full(30, 3.7), TrainConfig(n_restarts=2, seed=0))
        mu, _ = model.predict(rng.random((5, 4)))
        np.testing.assert_allclose(mu, 3.7, atol=1e-3)

    def test_refit_is_bit_reproducible(self):
        rng = np.random.default_rng(8)
        X = rng.random((25, 3))
        y = np.sin(4 * X[:, 0]) + 0.1 * rng.standard_normal(25)
        a = fit_gp(X, y, TrainConfig(n_restarts=3, seed=5))
        b = fit_gp(X, y, TrainConfig(n_restarts=3, seed=5))
        assert np.array_equal(a.kernel.lengthscales, b.kernel.lengthscales)
        assert a.kernel.signal_variance == b.kernel.signal_variance
        assert a.noise_variance == b.noise_variance

    def test_achieved_lml_at_least_every_start(self):
        rng = np.random.default_rng(9)
        X = rng.random((40, 2))
        y = X[:, 0] ** 2 + 0.05 * rng.standard_normal(40)
        model = fit_gp(X, y, TrainConfig(n_restarts=5, seed=1))
        finite_starts = [v for v in model.fit_info["start_lmls"] if np.isfinite(v)]
        assert model.fit_info["lml"] >= max(finite_starts) - 1e-9

    def test_rejects_degenerate_input(self):
        with pytest.raises(ValueError):
            fit_gp(np.zeros((1, 2)), np.zeros(1))
        with pytest.raises(ValueError):
            fit_gp(np.full((3, 2), np.nan), np.zeros(3))


class TestPredict:
    def _model(self, seed=0, n=60, d=4, noise=0.01):
        rng = np.random.default_rng(seed)
        X = rng.random((n, d))
        y = np.sin(3 * X[:, 0]) + X[:, 1] ** 2 + np.sqrt(noise) * rng.standard_normal(n)
        return fit_gp(X, y, TrainConfig(n_restarts=2, seed=seed)), rng

    def test_matches_dense_oracle(self):
        model, rng = self._model()
        Xs = rng.random((25, 4))
        mu, var = model.predict(Xs)
        mu_d, var_d = dense_predict(model, Xs)
        np.testing.assert_allclose(mu, mu_d, atol=1e-8)
        np.testing.assert_allclose(var, np.maximum(var_d, 0), atol=1e-8)

    def test_interpolates_at_low_noise(self):
        rng = np.random.default_rng(10)
        X = rng.random((20, 2))
        y = X[:, 0] + X[:, 1]
        model = ForwardGpModel(
            kernel=KernelParams(1.0, np.array([0.5, 0.5])),
            noise_variance=1e-8,
            mean_const=0.0,
            train_inputs=X,
            train_targets=y,
        )
        mu, _ = model.predict(X)
        np.testing.assert_allclose(mu, y, atol=1e-3)

    def test_far_query_reverts_to_prior(self):
        model, _ = self._model()
        far = np.full((1, 4), 50.0)
        mu, var = model.predict(far)
        assert var[0] == pytest.approx(model.kernel.signal_variance, abs=1e-3)
        assert mu[0] == pytest.approx(model.mean_const, abs=1e-3)

    def test_variance_never_exceeds_prior(self):
        model, rng = self._model(seed=11)
        _, var = model.predict(rng.random((200, 4)))
        assert np.all(var <= model.kernel.signal_variance + 1e-9)

    def test_variance_nonnegative(self):
        model, rng = self._model(seed=12, noise=1e-8)
        _, var = model.predict(np.vstack([model.train_inputs, rng.random((50, 4))]))
        assert np.all(var >= 0.0)

    def test_new_point_never_increases_variance(self):
        """Conditioning on one more observation shrinks posterior variance
        everywhere (checked on random instances)."""
        rng = np.random.default_rng(13)
        for _ in range(10):
            X = rng.random((15, 2))
            y = rng.standard_normal(15)
            kernel = KernelParams(1.0, rng.uniform(0.3, 1.0, size=2))
            small = ForwardGpModel(kernel, 0.01, 0.0, X[:-1], y[:-1])
            big = ForwardGpModel(kernel, 0.01, 0.0, X, y)
            Xq = rng.random((30, 2))
            _, v_small = small.predict(Xq)
            _, v_big = big.predict(Xq)
            assert np.all(v_big <= v_small + 1e-9)

    def test_factorization_reconstructs(self):
        model, _ = self._model(seed=14)
        A = kernel_matrix(model.kernel, model.train_inputs) + model.noise_variance * np.eye(
            len(model.train_targets)
        )
        rebuilt = model.chol @ model.chol.T
        assert np.max(np.abs(rebuilt - A)) / np.max(np.abs(A)) < 1e-8

    def test_dimension_mismatch(self):
        model, _ = self._model()
        with pytest.raises(ValueError):
            model.predict(np.zeros((3, 7)))

    def test_serialization_round_trip(self):
        model, rng = self._model(seed=15)
        clone = ForwardGpModel.from_dict(model.to_dict())
        Xs = rng.random((10, 4))
        np.testing.assert_allclose(clone.predict(Xs)[0], model.predict(Xs)[0], atol=1e-12)
