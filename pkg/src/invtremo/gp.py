"""Exact Gaussian-process regression with squared-exponential ARD kernel.

Hyperparameters (signal variance, per-dimension lengthscales, noise
variance) are trained by maximizing the log marginal likelihood
-1/2 y'(K + s2 I)^-1 y - 1/2 log|K + s2 I| with multi-start L-BFGS-B in
log-parameter space and analytic gradients. Targets are standardized
internally for fitting; the returned model is expressed in the raw
target space with an equivalent constant mean and rescaled variances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.linalg.lapack import dpotri
from scipy.optimize import minimize

from . import fastops
from .exceptions import NumericalFailure

# jitter escalation ladder, relative to mean(diag)
_JITTERS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)

DEFAULT_BOUNDS = {
    "lengthscale": (1e-3, 1e3),
    "signal_variance": (1e-4, 1e2),
    "noise_variance": (1e-8, 1.0),
}


@dataclass(frozen=True)
class KernelParams:
    """Squared-exponential kernel parameters with ARD lengthscales."""

    signal_variance: float
    lengthscales: np.ndarray

    def __post_init__(self):
        ls = np.asarray(self.lengthscales, dtype=float)
        object.__setattr__(self, "lengthscales", ls)
        if self.signal_variance <= 0 or np.any(ls <= 0):
            raise ValueError("kernel parameters must be strictly positive")

    @property
    def inv_ls2(self) -> np.ndarray:
        return 1.0 / (self.lengthscales * self.lengthscales)

    def to_dict(self) -> dict:
        return {
            "signal_variance": float(self.signal_variance),
            "lengthscales": self.lengthscales.tolist(),
        }

    @staticmethod
    def from_dict(obj: dict) -> "KernelParams":
        return KernelParams(
            signal_variance=float(obj["signal_variance"]),
            lengthscales=np.asarray(obj["lengthscales"], dtype=float),
        )


@dataclass
class TrainConfig:
    """Options for marginal-likelihood hyperparameter training."""

    n_restarts: int = 5
    maxiter: int = 100
    seed: int = 0
    lengthscale_bounds: tuple[float, float] = DEFAULT_BOUNDS["lengthscale"]
    signal_bounds: tuple[float, float] = DEFAULT_BOUNDS["signal_variance"]
    noise_bounds: tuple[float, float] = DEFAULT_BOUNDS["noise_variance"]
    warm_start: "tuple[KernelParams, float] | None" = None


def kernel_eval(params: KernelParams, x: np.ndarray, x2: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x.shape != x2.shape or x.shape[0] != params.lengthscales.shape[0]:
        raise ValueError("input dimensions do not match the lengthscale count")
    z = (x - x2) / params.lengthscales
    return float(params.signal_variance * np.exp(-0.5 * np.dot(z, z)))


def kernel_matrix(params: KernelParams, A: np.ndarray, B: np.ndarray | None = None) -> np.ndarray:
    A = np.atleast_2d(A)
    if B is None:
        return fastops.rbf_gram(A, params.inv_ls2, params.signal_variance)
    return fastops.rbf_cross(A, np.atleast_2d(B), params.inv_ls2, params.signal_variance)


def chol_with_jitter(A: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor with escalating diagonal jitter.

    Returns (L, jitter_added). Raises NumericalFailure once the ladder is
    exhausted.
    """
    mean_diag = float(np.mean(np.diag(A)))
    for rel in _JITTERS:
        jitter = rel * mean_diag
        try:
            L = cholesky(A + jitter * np.eye(A.shape[0]), lower=True)
            return L, jitter
        except np.linalg.LinAlgError:
            continue
        except ValueError:
            continue
    raise NumericalFailure("Cholesky failed after maximum jitter escalation")


def chol_inverse(L: np.ndarray) -> np.ndarray:
    """Inverse of A from its lower Cholesky factor (LAPACK dpotri)."""
    inv, info = dpotri(L, lower=1)
    if info != 0:
        raise NumericalFailure(f"dpotri failed with info={info}")
    return inv + np.tril(inv, -1).T


def log_marginal_likelihood(
    X: np.ndarray, y: np.ndarray, kernel: KernelParams, noise_variance: float
) -> float:
    """Zero-mean log marginal likelihood, constant term omitted."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    K = kernel_matrix(kernel, X)
    A = K + noise_variance * np.eye(len(y))
    L, _ = chol_with_jitter(A)
    alpha = cho_solve((L, True), y)
    return float(-0.5 * y @ alpha - np.sum(np.log(np.diag(L))))


def lml_and_grad(
    X: np.ndarray, y: np.ndarray, log_params: np.ndarray
) -> tuple[float, np.ndarray]:
    """Likelihood and gradient in log-parameter space.

    log_params stacks [log lengthscales (d), log signal_variance,
    log noise_variance]. The gradient follows the standard trace identity
    d lml / d theta = 1/2 tr((alpha alpha' - A^-1) dA/d theta).
    """
    X = np.atleast_2d(X)
    n, d = X.shape
    ls = np.exp(log_params[:d])
    sv = float(np.exp(log_params[d]))
    noise = float(np.exp(log_params[d + 1]))

    K = fastops.rbf_gram(X, 1.0 / (ls * ls), sv)
    A = K + noise * np.eye(n)
    L, _ = chol_with_jitter(A)
    alpha = cho_solve((L, True), y)
    lml = float(-0.5 * y @ alpha - np.sum(np.log(np.diag(L))))

    W = np.outer(alpha, alpha) - chol_inverse(L)
    B = W * K
    # lengthscale gradient via sum_ik B_ik (x_ij - x_kj)^2 / ls_j^2
    r = B.sum(axis=1)
    c = B.sum(axis=0)
    Xsq = X * X
    quad = np.einsum("ij,ij->j", X, B @ X)
    sqterm = r @ Xsq + c @ Xsq - 2.0 * quad
    grad = np.empty(d + 2)
    grad[:d] = 0.5 * sqterm / (ls * ls)
    grad[d] = 0.5 * float(np.sum(B))
    grad[d + 1] = 0.5 * noise * float(np.trace(W))
    return lml, grad


def _optimize_lml(
    X: np.ndarray,
    y: np.ndarray,
    starts: list[np.ndarray],
    bounds: list[tuple[float, float]],
    maxiter: int,
) -> tuple[np.ndarray, float, list[float]]:
    """L-BFGS-B ascent from every start; returns the best end point."""

    def objective(theta):
        try:
            lml, grad = lml_and_grad(X, y, theta)
        except NumericalFailure:
            return 1e12, np.zeros_like(theta)
        return -lml, -grad

    best_theta = None
    best_lml = -np.inf
    start_lmls = []
    failures = 0
    for theta0 in starts:
        try:
            start_lmls.append(lml_and_grad(X, y, theta0)[0])
        except NumericalFailure:
            failures += 1
            start_lmls.append(-np.inf)
            continue
        res = minimize(
            objective,
            theta0,
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": maxiter},
        )
        cand_lml = -float(res.fun)
        cand_lml = max(cand_lml, start_lmls[-1])
        theta = res.x if -float(res.fun) >= start_lmls[-1] else theta0
        if cand_lml > best_lml:
            best_lml = cand_lml
            best_theta = theta
    if best_theta is None:
        raise NumericalFailure(
            f"all {failures} hyperparameter starts failed the Cholesky factorization"
        )
    return np.asarray(best_theta), best_lml, start_lmls


def optimize_zero_mean_gp(
    X: np.ndarray,
    y: np.ndarray,
    config: TrainConfig,
    noise_floor_variance: float | None = None,
) -> tuple[KernelParams, float, dict]:
    """Shared training routine: returns (kernel, noise_variance, fit_info)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    rng = np.random.default_rng(config.seed)

    noise_lo, noise_hi = config.noise_bounds
    if noise_floor_variance is not None:
        noise_lo = max(noise_lo, noise_floor_variance)
    bounds = (
        [tuple(np.log(config.lengthscale_bounds))] * d
        + [tuple(np.log(config.signal_bounds))]
        + [(np.log(noise_lo), np.log(noise_hi))]
    )

    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    span = np.maximum(X.max(axis=0) - X.min(axis=0), 1e-2)
    if config.warm_start is not None:
        # warm start replaces the default start: previous values plus restarts
        warm_kernel, warm_noise = config.warm_start
        first = np.concatenate(
            [
                np.log(warm_kernel.lengthscales),
                [np.log(warm_kernel.signal_variance)],
                [np.log(max(warm_noise, noise_lo))],
            ]
        )
    else:
        first = np.concatenate(
            [np.log(0.5 * span), [np.log(1.0)], [np.log(max(1e-2, noise_lo * 1.5))]]
        )
    starts = [np.clip(first, lo, hi)]
    nz_lo = max(1e-6, noise_lo)
    nz_hi = max(min(0.1, noise_hi), nz_lo)
    for _ in range(config.n_restarts):
        ls0 = np.log(span * np.exp(rng.uniform(np.log(0.05), np.log(5.0), size=d)))
        sv0 = rng.uniform(np.log(0.1), np.log(10.0))
        nz0 = rng.uniform(np.log(nz_lo), np.log(nz_hi)) if nz_hi > nz_lo else np.log(nz_lo)
        theta = np.concatenate([ls0, [sv0], [nz0]])
        starts.append(np.clip(theta, lo, hi))

    theta, lml, start_lmls = _optimize_lml(X, y, starts, bounds, config.maxiter)
    kernel = KernelParams(
        signal_variance=float(np.exp(theta[d])),
        lengthscales=np.exp(theta[:d]),
    )
    info = {"lml": lml, "start_lmls": start_lmls, "n_starts": len(starts)}
    return kernel, float(np.exp(theta[d + 1])), info


@dataclass
class ForwardGpModel:
    """Trained GP over (decision vector -> scalarized objective).

    Stores the raw-space equivalent of the internally standardized fit: a
    constant mean plus rescaled signal/noise variances, together with the
    cached Cholesky factor of K + noise * I.
    """

    kernel: KernelParams
    noise_variance: float
    mean_const: float
    train_inputs: np.ndarray
    train_targets: np.ndarray
    chol: np.ndarray = field(repr=False, default=None)
    alpha: np.ndarray = field(repr=False, default=None)
    fit_info: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.chol is None:
            self._factorize()

    def _factorize(self):
        K = kernel_matrix(self.kernel, self.train_inputs)
        A = K + self.noise_variance * np.eye(len(self.train_targets))
        self.chol, _ = chol_with_jitter(A)
        self.alpha = cho_solve((self.chol, True), self.train_targets - self.mean_const)

    def predict(self, Xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance at the query rows."""
        Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
        if Xs.shape[1] != self.train_inputs.shape[1]:
            raise ValueError(
                f"query dimension {Xs.shape[1]} does not match "
                f"training dimension {self.train_inputs.shape[1]}"
            )
        Ks = kernel_matrix(self.kernel, Xs, self.train_inputs)
        mu = self.mean_const + Ks @ self.alpha
        V = solve_triangular(self.chol, Ks.T, lower=True)
        var = self.kernel.signal_variance - np.sum(V * V, axis=0)
        return mu, np.maximum(var, 0.0)

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.to_dict(),
            "noise_variance": float(self.noise_variance),
            "mean_const": float(self.mean_const),
            "train_inputs": self.train_inputs.tolist(),
            "train_targets": self.train_targets.tolist(),
        }

    @staticmethod
    def from_dict(obj: dict) -> "ForwardGpModel":
        return ForwardGpModel(
            kernel=KernelParams.from_dict(obj["kernel"]),
            noise_variance=float(obj["noise_variance"]),
            mean_const=float(obj["mean_const"]),
            train_inputs=np.asarray(obj["train_inputs"], dtype=float),
            train_targets=np.asarray(obj["train_targets"], dtype=float),
        )


def fit_gp(X: np.ndarray, y: np.ndarray, config: TrainConfig | None = None) -> ForwardGpModel:
    """Maximum-marginal-likelihood fit with standardized targets.

    The achieved likelihood is at least the likelihood of every start
    point (recorded in ``fit_info``).
    """
    config = config or TrainConfig()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if len(y) < 2:
        raise ValueError("need at least two observations to fit the GP")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("training data must be finite")

    y_mean = float(np.mean(y))
    y_std = float(np.std(y))
    scale = max(y_std, 1e-12)
    ys = (y - y_mean) / scale

    internal = config
    if config.warm_start is not None:
        warm_kernel, warm_noise = config.warm_start
        internal = TrainConfig(
            n_restarts=config.n_restarts,
            maxiter=config.maxiter,
            seed=config.seed,
            lengthscale_bounds=config.lengthscale_bounds,
            signal_bounds=config.signal_bounds,
            noise_bounds=config.noise_bounds,
            warm_start=(
                KernelParams(
                    signal_variance=float(
                        np.clip(warm_kernel.signal_variance / scale**2, *config.signal_bounds)
                    ),
                    lengthscales=warm_kernel.lengthscales,
                ),
                float(np.clip(warm_noise / scale**2, *config.noise_bounds)),
            ),
        )

    kernel_int, noise_int, info = optimize_zero_mean_gp(X, ys, internal)
    kernel = KernelParams(
        signal_variance=kernel_int.signal_variance * scale**2,
        lengthscales=kernel_int.lengthscales,
    )
    info["target_mean"] = y_mean
    info["target_scale"] = scale
    return ForwardGpModel(
        kernel=kernel,
        noise_variance=noise_int * scale**2,
        mean_const=y_mean,
        train_inputs=X,
        train_targets=y,
        fit_info=info,
    )
