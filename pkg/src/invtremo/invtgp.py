"""Inverse models: preference vector -> one decision variable.

Two flavors share a zero-mean squared-exponential GP over simplex
preference vectors. The plain inverse GP is trained on target data only.
The transfer variant melds a source dataset through a transfer kernel
that scales every cross-task covariance by a learned correlation
lambda in [-1, 1]:

    K~ = [[K_SS, lambda K_ST], [lambda K_TS, K_TT]],
    Lambda = diag(noise_source * I, noise_target * I).

Training runs in two steps so a large source set cannot bias the target
fit: target-only hyperparameters first, then (lambda, source noise) on
the joint likelihood with everything else frozen. A single-pass joint
mode exists for ablation. Both flavors enforce a noise-standard-
deviation floor sigma0, which keeps early, unconverged inverse data
from producing overconfident predictions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.optimize import minimize

from . import fastops
from .exceptions import NumericalFailure, ValidationError
from .gp import (
    KernelParams,
    TrainConfig,
    chol_inverse,
    chol_with_jitter,
    kernel_matrix,
    optimize_zero_mean_gp,
)
from .simplex import on_simplex

TWO_STEP = "two_step"
JOINT = "joint"


def _check_simplex(W: np.ndarray, what: str) -> np.ndarray:
    W = np.atleast_2d(np.asarray(W, dtype=float))
    bad = ~on_simplex(W, tol=1e-6)
    if bad.any():
        raise ValidationError(f"{what} row {int(np.nonzero(bad)[0][0])} is not on the simplex")
    return W


def build_transfer_gram(
    kernel: KernelParams, lam: float, W_S: np.ndarray, W_T: np.ndarray
) -> np.ndarray:
    """Noise-free block covariance [[K_SS, lam K_ST], [lam K_TS, K_TT]]."""
    if not -1.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [-1, 1]")
    W_S = np.atleast_2d(W_S)
    W_T = np.atleast_2d(W_T)
    K_SS = kernel_matrix(kernel, W_S)
    K_TT = kernel_matrix(kernel, W_T)
    K_ST = kernel_matrix(kernel, W_S, W_T)
    return np.block([[K_SS, lam * K_ST], [lam * K_ST.T, K_TT]])


@dataclass
class InverseGpModel:
    """Target-only inverse GP for one decision variable (zero mean)."""

    var_index: int
    kernel: KernelParams
    noise_variance: float
    W: np.ndarray
    x: np.ndarray
    chol: np.ndarray = field(repr=False, default=None)
    alpha: np.ndarray = field(repr=False, default=None)
    fit_info: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.chol is None:
            A = kernel_matrix(self.kernel, self.W) + self.noise_variance * np.eye(len(self.x))
            self.chol, _ = chol_with_jitter(A)
            self.alpha = cho_solve((self.chol, True), self.x)

    def predict(self, Wq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        Wq = _check_simplex(Wq, "query preference")
        Ks = kernel_matrix(self.kernel, Wq, self.W)
        mu = Ks @ self.alpha
        V = solve_triangular(self.chol, Ks.T, lower=True)
        var = self.kernel.signal_variance - np.sum(V * V, axis=0)
        return mu, np.maximum(var, 0.0)

    def predict_mean(self, Wq: np.ndarray) -> np.ndarray:
        Wq = _check_simplex(Wq, "query preference")
        return kernel_matrix(self.kernel, Wq, self.W) @ self.alpha

    def to_dict(self) -> dict:
        return {
            "type": "inverse_gp",
            "var_index": int(self.var_index),
            "kernel": self.kernel.to_dict(),
            "noise_variance": float(self.noise_variance),
            "W": self.W.tolist(),
            "x": self.x.tolist(),
        }


@dataclass
class InvTgpModel:
    """Inverse transfer GP for one overlapping decision variable."""

    var_index: int
    kernel: KernelParams
    lam: float
    noise_source: float
    noise_target: float
    W_S: np.ndarray
    x_S: np.ndarray
    W_T: np.ndarray
    x_T: np.ndarray
    chol: np.ndarray = field(repr=False, default=None)
    alpha: np.ndarray = field(repr=False, default=None)
    fit_info: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.chol is None:
            self._factorize()

    def _factorize(self):
        gram = build_transfer_gram(self.kernel, self.lam, self.W_S, self.W_T)
        n_s, n_t = len(self.x_S), len(self.x_T)
        noise = np.concatenate(
            [np.full(n_s, self.noise_source), np.full(n_t, self.noise_target)]
        )
        self.chol, _ = chol_with_jitter(gram + np.diag(noise))
        self.alpha = cho_solve((self.chol, True), np.concatenate([self.x_S, self.x_T]))

    def predict(self, Wq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior for target-task queries; cross-task covariances carry lambda."""
        Wq = _check_simplex(Wq, "query preference")
        Ks = np.hstack(
            [
                self.lam * kernel_matrix(self.kernel, Wq, self.W_S),
                kernel_matrix(self.kernel, Wq, self.W_T),
            ]
        )
        mu = Ks @ self.alpha
        V = solve_triangular(self.chol, Ks.T, lower=True)
        var = self.kernel.signal_variance - np.sum(V * V, axis=0)
        return mu, np.maximum(var, 0.0)

    def predict_mean(self, Wq: np.ndarray) -> np.ndarray:
        Wq = _check_simplex(Wq, "query preference")
        Ks = np.hstack(
            [
                self.lam * kernel_matrix(self.kernel, Wq, self.W_S),
                kernel_matrix(self.kernel, Wq, self.W_T),
            ]
        )
        return Ks @ self.alpha

    def to_dict(self) -> dict:
        return {
            "type": "invtgp",
            "var_index": int(self.var_index),
            "kernel": self.kernel.to_dict(),
            "lambda": float(self.lam),
            "noise_source": float(self.noise_source),
            "noise_target": float(self.noise_target),
            "W_S": self.W_S.tolist(),
            "x_S": self.x_S.tolist(),
            "W_T": self.W_T.tolist(),
            "x_T": self.x_T.tolist(),
        }


def model_from_dict(obj: dict):
    kind = obj.get("type")
    if kind == "inverse_gp":
        return InverseGpModel(
            var_index=int(obj["var_index"]),
            kernel=KernelParams.from_dict(obj["kernel"]),
            noise_variance=float(obj["noise_variance"]),
            W=np.asarray(obj["W"], dtype=float),
            x=np.asarray(obj["x"], dtype=float),
        )
    if kind == "invtgp":
        return InvTgpModel(
            var_index=int(obj["var_index"]),
            kernel=KernelParams.from_dict(obj["kernel"]),
            lam=float(obj["lambda"]),
            noise_source=float(obj["noise_source"]),
            noise_target=float(obj["noise_target"]),
            W_S=np.asarray(obj["W_S"], dtype=float),
            x_S=np.asarray(obj["x_S"], dtype=float),
            W_T=np.asarray(obj["W_T"], dtype=float),
            x_T=np.asarray(obj["x_T"], dtype=float),
        )
    raise ValidationError(f"unknown inverse model type {kind!r}")


def fit_inverse_gp(
    W_T: np.ndarray,
    x_T: np.ndarray,
    sigma0: float,
    var_index: int = 0,
    config: TrainConfig | None = None,
) -> InverseGpModel:
    """Target-only inverse GP with noise standard deviation >= sigma0."""
    W_T = _check_simplex(W_T, "target preference")
    x_T = np.asarray(x_T, dtype=float)
    if len(x_T) < 1:
        raise ValidationError("empty target data")
    config = config or TrainConfig()
    kernel, noise, info = optimize_zero_mean_gp(
        W_T, x_T, config, noise_floor_variance=sigma0 * sigma0
    )
    return InverseGpModel(
        var_index=var_index,
        kernel=kernel,
        noise_variance=noise,
        W=W_T,
        x=x_T,
        fit_info=info,
    )


def _joint_lml_and_grad_step2(
    theta: np.ndarray,
    K_SS: np.ndarray,
    K_TT: np.ndarray,
    K_ST: np.ndarray,
    x: np.ndarray,
    n_s: int,
    noise_target: float,
) -> tuple[float, np.ndarray]:
    """Joint likelihood over (rho, log source-noise) with kernel frozen."""
    rho, log_ns = theta
    lam = np.tanh(rho)
    ns = float(np.exp(log_ns))
    n = len(x)
    A = np.block([[K_SS, lam * K_ST], [lam * K_ST.T, K_TT]])
    A[np.arange(n_s), np.arange(n_s)] += ns
    A[np.arange(n_s, n), np.arange(n_s, n)] += noise_target
    L, _ = chol_with_jitter(A)
    alpha = cho_solve((L, True), x)
    lml = float(-0.5 * x @ alpha - np.sum(np.log(np.diag(L))))

    W = np.outer(alpha, alpha) - chol_inverse(L)
    # dA/drho: off-diagonal blocks scaled by dlambda/drho = 1 - lambda^2
    dlam = 1.0 - lam * lam
    g_rho = dlam * float(np.sum(W[:n_s, n_s:] * K_ST))
    g_ns = 0.5 * ns * float(np.trace(W[:n_s, :n_s]))
    return lml, np.array([g_rho, g_ns])


def _joint_lml_and_grad_full(
    theta: np.ndarray,
    W_all: np.ndarray,
    x: np.ndarray,
    n_s: int,
) -> tuple[float, np.ndarray]:
    """Single-pass likelihood over all parameters (ablation mode).

    theta = [log lengthscales (m), log sv, log noise_target, log noise_source, rho].
    """
    n, m = W_all.shape
    ls = np.exp(theta[:m])
    sv = float(np.exp(theta[m]))
    nt = float(np.exp(theta[m + 1]))
    ns = float(np.exp(theta[m + 2]))
    lam = np.tanh(theta[m + 3])

    K = fastops.rbf_gram(W_all, 1.0 / (ls * ls), sv)
    mask = np.ones((n, n))
    mask[:n_s, n_s:] = lam
    mask[n_s:, :n_s] = lam
    A = K * mask
    A[np.arange(n_s), np.arange(n_s)] += ns
    A[np.arange(n_s, n), np.arange(n_s, n)] += nt
    L, _ = chol_with_jitter(A)
    alpha = cho_solve((L, True), x)
    lml = float(-0.5 * x @ alpha - np.sum(np.log(np.diag(L))))

    Wm = np.outer(alpha, alpha) - chol_inverse(L)
    B = Wm * (K * mask)
    r = B.sum(axis=1)
    c = B.sum(axis=0)
    Xsq = W_all * W_all
    quad = np.einsum("ij,ij->j", W_all, B @ W_all)
    grad = np.empty(m + 4)
    grad[:m] = 0.5 * (r @ Xsq + c @ Xsq - 2.0 * quad) / (ls * ls)
    grad[m] = 0.5 * float(np.sum(B))
    grad[m + 1] = 0.5 * nt * float(np.trace(Wm[n_s:, n_s:]))
    grad[m + 2] = 0.5 * ns * float(np.trace(Wm[:n_s, :n_s]))
    grad[m + 3] = (1.0 - lam * lam) * float(np.sum(Wm[:n_s, n_s:] * K[:n_s, n_s:]))
    return lml, grad


def fit_invtgp(
    source: tuple[np.ndarray, np.ndarray],
    target: tuple[np.ndarray, np.ndarray],
    sigma0: float,
    mode: str = TWO_STEP,
    var_index: int = 0,
    config: TrainConfig | None = None,
) -> InvTgpModel:
    """Fit the transfer model; lambda is parameterized as tanh(rho), rho0 = 0.

    Two-step mode first maximizes the target-only likelihood over the base
    kernel and target noise (floored at sigma0), then freezes those and
    maximizes the joint likelihood over lambda and the source noise. Joint
    mode optimizes everything in one pass.
    """
    W_S, x_S = source
    W_T, x_T = target
    W_S = _check_simplex(W_S, "source preference")
    W_T = _check_simplex(W_T, "target preference")
    x_S = np.asarray(x_S, dtype=float)
    x_T = np.asarray(x_T, dtype=float)
    if len(x_T) < 2:
        raise ValidationError("need at least two target rows to fit an invTGP")
    if len(x_S) < 1:
        raise ValidationError("need at least one source row")
    config = config or TrainConfig()
    rng = np.random.default_rng(config.seed)
    floor = sigma0 * sigma0

    if mode == TWO_STEP:
        kernel, noise_target, step1_info = optimize_zero_mean_gp(
            W_T, x_T, config, noise_floor_variance=floor
        )
        K_SS = kernel_matrix(kernel, W_S)
        K_TT = kernel_matrix(kernel, W_T)
        K_ST = kernel_matrix(kernel, W_S, W_T)
        x = np.concatenate([x_S, x_T])
        n_s = len(x_S)

        def objective(theta):
            try:
                lml, grad = _joint_lml_and_grad_step2(
                    theta, K_SS, K_TT, K_ST, x, n_s, noise_target
                )
            except NumericalFailure:
                return 1e12, np.zeros_like(theta)
            return -lml, -grad

        # every start has rho = 0 (lambda = 0): transfer must be earned by
        # likelihood ascent, restarts only vary the source-noise init
        nb = (np.log(1e-8), np.log(1.0))
        starts = [np.array([0.0, np.log(np.clip(noise_target, *np.exp(nb)))])]
        for _ in range(min(config.n_restarts, 3)):
            starts.append(np.array([0.0, rng.uniform(np.log(1e-6), np.log(0.5))]))
        best = None
        for theta0 in starts:
            res = minimize(
                objective,
                theta0,
                jac=True,
                method="L-BFGS-B",
                bounds=[(-8.0, 8.0), nb],
                options={"maxiter": config.maxiter},
            )
            if best is None or res.fun < best.fun:
                best = res
        lam = float(np.tanh(best.x[0]))
        noise_source = float(np.exp(best.x[1]))
        info = {
            "mode": TWO_STEP,
            "step1": step1_info,
            "step2_lml": -float(best.fun),
            "step1_kernel": kernel.to_dict(),
            "step1_noise_target": noise_target,
        }
    elif mode == JOINT:
        W_all = np.vstack([W_S, W_T])
        x = np.concatenate([x_S, x_T])
        n_s = len(x_S)
        m = W_all.shape[1]

        def objective(theta):
            try:
                lml, grad = _joint_lml_and_grad_full(theta, W_all, x, n_s)
            except NumericalFailure:
                return 1e12, np.zeros_like(theta)
            return -lml, -grad

        bounds = (
            [tuple(np.log(config.lengthscale_bounds))] * m
            + [tuple(np.log(config.signal_bounds))]
            + [(np.log(max(floor, config.noise_bounds[0])), np.log(config.noise_bounds[1]))]
            + [(np.log(1e-8), np.log(1.0))]
            + [(-8.0, 8.0)]
        )
        span = np.maximum(W_all.max(axis=0) - W_all.min(axis=0), 1e-2)
        default = np.concatenate(
            [np.log(0.5 * span), [0.0], [np.log(max(1e-2, floor))], [np.log(1e-2)], [0.0]]
        )
        starts = [np.clip(default, [b[0] for b in bounds], [b[1] for b in bounds])]
        for _ in range(config.n_restarts):
            theta = np.concatenate(
                [
                    np.log(span) + rng.uniform(np.log(0.05), np.log(5.0), size=m),
                    [rng.uniform(np.log(0.1), np.log(10.0))],
                    [rng.uniform(np.log(max(floor, 1e-6)), np.log(0.1))],
                    [rng.uniform(np.log(1e-6), np.log(0.1))],
                    [rng.uniform(-2.0, 2.0)],
                ]
            )
            starts.append(np.clip(theta, [b[0] for b in bounds], [b[1] for b in bounds]))
        best = None
        for theta0 in starts:
            res = minimize(
                objective,
                theta0,
                jac=True,
                method="L-BFGS-B",
                bounds=bounds,
                options={"maxiter": config.maxiter},
            )
            if best is None or res.fun < best.fun:
                best = res
        kernel = KernelParams(
            signal_variance=float(np.exp(best.x[m])), lengthscales=np.exp(best.x[:m])
        )
        noise_target = float(np.exp(best.x[m + 1]))
        noise_source = float(np.exp(best.x[m + 2]))
        lam = float(np.tanh(best.x[m + 3]))
        info = {"mode": JOINT, "lml": -float(best.fun)}
    else:
        raise ValueError(f"unknown training mode {mode!r}")

    return InvTgpModel(
        var_index=var_index,
        kernel=kernel,
        lam=lam,
        noise_source=noise_source,
        noise_target=noise_target,
        W_S=W_S,
        x_S=x_S,
        W_T=W_T,
        x_T=x_T,
        fit_info=info,
    )


def predict_solution_distribution(
    models: list, w: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Stack per-variable posteriors into a factorized distribution over x.

    Requires exactly one model per decision variable index 0..d-1.
    """
    by_index = {model.var_index: model for model in models}
    d = len(models)
    if sorted(by_index) != list(range(d)):
        missing = sorted(set(range(d)) - set(by_index))
        raise ValidationError(f"missing inverse model for variable index {missing}")
    w = np.asarray(w, dtype=float)
    mu = np.empty(d)
    var = np.empty(d)
    for q in range(d):
        m_q, v_q = by_index[q].predict(w[None, :])
        mu[q] = m_q[0]
        var[q] = v_q[0]
    return mu, var
