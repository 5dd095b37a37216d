"""The inverse-transfer optimization loop and its ablation variants.

Each iteration scalarizes the evaluated archive under a cycled
preference vector, fits a forward GP to the scalarized values, rebuilds
the per-variable inverse models from the nondominated archive (transfer
models on overlapping variables, plain inverse GPs elsewhere), samples
an offspring population from the factorized inverse predictive
distribution, and evaluates the offspring with the best upper
confidence bound under the forward GP.

Variants: ``invtremo`` (transfer from a source dataset), ``zerot``
(identical loop, no source, plain inverse GPs everywhere), and
``parego-ucb`` (no inverse models; offspring from space-filling samples
plus perturbations of the nondominated archive).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fastops
from .datasets import InverseDataset
from .decomposition import (
    DEFAULT_ETA,
    augmented_tchebycheff,
    generate_preference_set,
    preference_from_objectives,
)
from .exceptions import SpecError
from .gp import ForwardGpModel, TrainConfig, fit_gp
from .invtgp import TWO_STEP, fit_inverse_gp, fit_invtgp, predict_solution_distribution
from .problems import ObjectiveNormalizer, Problem

VARIANTS = ("invtremo", "zerot", "parego-ucb")

# in-loop hyperparameter training budgets; final models get a richer fit.
# warm-started refits descend from the previous iteration's optimum, with a
# full fresh-restart refit every few iterations to escape stale basins
_LOOP_RESTARTS = 1
_LOOP_MAXITER = 50
_FINAL_RESTARTS = 3
_FINAL_MAXITER = 100
_RESTART_PERIOD = 5
_PAREGO_PERTURB = 0.1


@dataclass
class OptimizerConfig:
    """Run settings; defaults follow the standard benchmark protocol."""

    n_init: int = 20
    budget: int = 100
    n_offspring: int = 10000
    beta: float = 0.5
    eta: float = DEFAULT_ETA
    sigma0: float = 0.01
    n_prefs: int = 50
    variant: str = "invtremo"
    training_mode: str = TWO_STEP
    seed: int = 0
    n_probe: int = 10000

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise SpecError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.training_mode not in ("two_step", "joint"):
            raise SpecError("training_mode must be 'two_step' or 'joint'")
        # budget == n_init is the degenerate initial-design-only run
        if self.budget < self.n_init:
            raise SpecError("budget must be at least n_init")
        for name in ("n_init", "n_offspring", "n_prefs", "n_probe"):
            if getattr(self, name) <= 0:
                raise SpecError(f"{name} must be positive")
        if self.sigma0 < 0 or self.eta < 0:
            raise SpecError("sigma0 and eta must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "n_init": self.n_init,
            "budget": self.budget,
            "n_offspring": self.n_offspring,
            "beta": self.beta,
            "eta": self.eta,
            "sigma0": self.sigma0,
            "n_prefs": self.n_prefs,
            "variant": self.variant,
            "training_mode": self.training_mode,
            "seed": self.seed,
            "n_probe": self.n_probe,
        }

    @staticmethod
    def from_dict(obj: dict) -> "OptimizerConfig":
        known = {f: obj[f] for f in OptimizerConfig().__dict__ if f in obj}
        return OptimizerConfig(**known)


@dataclass(frozen=True)
class OverlapMap:
    """Pairs of (source variable index, target variable index), 0-based."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(s), int(t)) for s, t in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if len(pairs) < 1:
            raise SpecError("overlap must contain at least one variable pair")
        src = [s for s, _ in pairs]
        tgt = [t for _, t in pairs]
        if len(set(src)) != len(src) or len(set(tgt)) != len(tgt):
            raise SpecError("overlap indices must be unique on both sides")
        if min(src) < 0 or min(tgt) < 0:
            raise SpecError("overlap indices must be nonnegative")

    @property
    def q(self) -> int:
        return len(self.pairs)

    def validate_dims(self, d_source: int, d_target: int) -> None:
        for s, t in self.pairs:
            if s >= d_source:
                raise SpecError(f"source overlap index {s} out of range for d_S={d_source}")
            if t >= d_target:
                raise SpecError(f"target overlap index {t} out of range for d_T={d_target}")

    def source_for_target(self) -> dict[int, int]:
        return {t: s for s, t in self.pairs}

    @staticmethod
    def first_k(k: int) -> "OverlapMap":
        return OverlapMap(tuple((j, j) for j in range(k)))

    def to_dict(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs]}

    @staticmethod
    def from_dict(obj: dict) -> "OverlapMap":
        return OverlapMap(tuple((int(s), int(t)) for s, t in obj["pairs"]))


@dataclass
class RunResult:
    """Everything one optimization run produced."""

    problem: Problem
    config: OptimizerConfig
    X: np.ndarray
    F: np.ndarray
    iterations: np.ndarray
    nd_indices: np.ndarray
    models: list
    trace: list[dict]
    preferences: np.ndarray
    normalizer: ObjectiveNormalizer
    overlap: OverlapMap | None = None
    source_path: str | None = None

    @property
    def nondominated(self) -> tuple[np.ndarray, np.ndarray]:
        return self.X[self.nd_indices], self.F[self.nd_indices]


def latin_hypercube(rng: np.random.Generator, n: int, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """One stratified sample per axis-aligned slice, per dimension."""
    d = len(lower)
    u = np.empty((n, d))
    for j in range(d):
        u[:, j] = (rng.permutation(n) + rng.random(n)) / n
    return lower + (upper - lower) * u


def nondominated_filter(X: np.ndarray, F: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stable-order Pareto filter; returns (X_nd, F_nd, indices)."""
    mask = fastops.nondominated_mask(np.asarray(F, dtype=float))
    idx = np.nonzero(mask)[0]
    return X[idx], F[idx], idx


def ucb_select(forward: ForwardGpModel, candidates: np.ndarray, beta: float) -> tuple[int, float]:
    """Index and score of the candidate maximizing -mu + beta * sigma.

    Ties resolve to the lowest index.
    """
    if len(candidates) == 0:
        raise ValueError("candidate set is empty")
    mu, var = forward.predict(candidates)
    scores = -mu + beta * np.sqrt(var)
    idx = int(np.argmax(scores))
    return idx, float(scores[idx])


def sample_offspring(
    models: list,
    w: np.ndarray,
    n: int,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """n i.i.d. draws from the factorized inverse predictive distribution."""
    mu, var = predict_solution_distribution(models, w)
    draws = mu + np.sqrt(var) * rng.standard_normal((n, len(mu)))
    return np.clip(draws, lower, upper)


class _PreferenceCycler:
    """Uniform sampling without replacement, reshuffled each epoch."""

    def __init__(self, W: np.ndarray, rng: np.random.Generator):
        self.W = W
        self.rng = rng
        self.order: list[int] = []

    def next(self) -> np.ndarray:
        if not self.order:
            self.order = list(self.rng.permutation(len(self.W)))
        return self.W[self.order.pop(0)]


def _fit_inverse_models(
    W_T: np.ndarray,
    X_T: np.ndarray,
    problem: Problem,
    config: OptimizerConfig,
    source: InverseDataset | None,
    overlap: OverlapMap | None,
    use_transfer: bool,
    warm: dict,
    fit_seed: int,
    restarts: int,
    maxiter: int,
    warm_only: bool = False,
) -> list:
    models = []
    src_of = overlap.source_for_target() if (use_transfer and overlap) else {}
    for j in range(problem.d):
        n_restarts = restarts
        if warm_only and warm.get(j) is not None:
            n_restarts = max(0, restarts - 1)
        tc = TrainConfig(
            n_restarts=n_restarts, maxiter=maxiter, seed=fit_seed + j, warm_start=warm.get(j)
        )
        if j in src_of:
            model = fit_invtgp(
                (source.W, source.column(src_of[j])),
                (W_T, X_T[:, j]),
                sigma0=config.sigma0,
                mode=config.training_mode,
                var_index=j,
                config=tc,
            )
            warm[j] = (model.kernel, model.noise_target)
        else:
            model = fit_inverse_gp(
                W_T, X_T[:, j], sigma0=config.sigma0, var_index=j, config=tc
            )
            warm[j] = (model.kernel, model.noise_variance)
        models.append(model)
    return models


def _parego_candidates(
    rng: np.random.Generator,
    X_nd: np.ndarray,
    n: int,
    lower: np.ndarray,
    upper: np.ndarray,
) -> np.ndarray:
    """Space-filling candidates plus Gaussian perturbations of the front."""
    n_lhs = n // 2
    lhs = latin_hypercube(rng, n_lhs, lower, upper)
    n_pert = n - n_lhs
    parents = X_nd[np.arange(n_pert) % len(X_nd)]
    pert = parents + rng.normal(0.0, _PAREGO_PERTURB * (upper - lower), size=(n_pert, len(lower)))
    return np.vstack([lhs, np.clip(pert, lower, upper)])


def run(
    problem: Problem,
    source: InverseDataset | None,
    overlap: OverlapMap | None,
    config: OptimizerConfig,
) -> RunResult:
    """Execute one full optimization run; deterministic given config.seed."""
    use_transfer = config.variant == "invtremo"
    if use_transfer:
        if source is None or overlap is None:
            raise SpecError("variant 'invtremo' requires a source dataset and an overlap map")
        overlap.validate_dims(source.d, problem.d)
        if source.m != problem.m:
            raise SpecError(
                f"source has {source.m} objectives but the target has {problem.m}"
            )
    else:
        source = None
        overlap = None

    rng = np.random.default_rng(config.seed)
    W_set = generate_preference_set(problem.m, config.n_prefs, seed=config.seed)
    cycler = _PreferenceCycler(W_set, rng)
    lower, upper = problem.lower, problem.upper

    X = latin_hypercube(rng, config.n_init, lower, upper)
    F = problem.evaluate_batch(X)
    iterations = np.zeros(config.n_init, dtype=int)
    normalizer = ObjectiveNormalizer(m=problem.m)
    normalizer.update(F)

    trace: list[dict] = []
    forward_warm: tuple | None = None
    inverse_warm: dict = {}
    t = 0
    while len(X) < config.budget:
        t += 1
        w = cycler.next()
        fit_seed = int(rng.integers(2**31))

        Fn = normalizer.normalize(F)
        y = augmented_tchebycheff(Fn, w, config.eta)
        forward = fit_gp(
            X,
            y,
            TrainConfig(
                n_restarts=_LOOP_RESTARTS,
                maxiter=_LOOP_MAXITER,
                seed=fit_seed,
                warm_start=forward_warm,
            ),
        )
        forward_warm = (forward.kernel, forward.noise_variance)

        X_nd, _, nd_idx = nondominated_filter(X, F)
        fallback = False
        lambdas: dict[int, float] = {}
        if config.variant == "parego-ucb":
            candidates = _parego_candidates(rng, X_nd, config.n_offspring, lower, upper)
        elif len(nd_idx) >= 2:
            W_T = preference_from_objectives(Fn[nd_idx])
            models = _fit_inverse_models(
                W_T,
                X_nd,
                problem,
                config,
                source,
                overlap,
                use_transfer,
                inverse_warm,
                fit_seed,
                _LOOP_RESTARTS,
                _LOOP_MAXITER,
                warm_only=(t % _RESTART_PERIOD != 1),
            )
            lambdas = {m.var_index: m.lam for m in models if hasattr(m, "lam")}
            candidates = sample_offspring(models, w, config.n_offspring, lower, upper, rng)
        else:
            fallback = True
            candidates = latin_hypercube(rng, config.n_offspring, lower, upper)

        # score offspring and the full-space probe in one forward-GP pass
        probe = latin_hypercube(rng, config.n_probe, lower, upper)
        mu_all, var_all = forward.predict(np.vstack([candidates, probe]))
        scores = -mu_all + config.beta * np.sqrt(var_all)
        idx = int(np.argmax(scores[: len(candidates)]))
        score = float(scores[idx])
        probe_max = float(np.max(scores[len(candidates) :]))

        x_new = candidates[idx]
        f_new = problem.evaluate(x_new)
        X = np.vstack([X, x_new[None, :]])
        F = np.vstack([F, f_new[None, :]])
        iterations = np.append(iterations, t)
        normalizer.update(f_new[None, :])

        trace.append(
            {
                "iteration": t,
                "w": w.tolist(),
                "x": x_new.tolist(),
                "f": f_new.tolist(),
                "ucb_selected": score,
                "ucb_max_probe": probe_max,
                "fallback": fallback,
                "n_nondominated": int(len(nd_idx)),
                "lambdas": {str(k): v for k, v in sorted(lambdas.items())},
            }
        )

    _, _, nd_idx = nondominated_filter(X, F)

    # final inverse models over the completed archive; these are the run's
    # queryable product (the no-transfer variants get plain inverse GPs,
    # which doubles as the offline post-hoc baseline)
    models: list = []
    if config.budget > config.n_init and len(nd_idx) >= 2:
        Fn = normalizer.normalize(F)
        W_T = preference_from_objectives(Fn[nd_idx])
        models = _fit_inverse_models(
            W_T,
            X[nd_idx],
            problem,
            config,
            source,
            overlap,
            use_transfer,
            dict(inverse_warm),
            int(rng.integers(2**31)),
            _FINAL_RESTARTS,
            _FINAL_MAXITER,
        )

    return RunResult(
        problem=problem,
        config=config,
        X=X,
        F=F,
        iterations=iterations,
        nd_indices=nd_idx,
        models=models,
        trace=trace,
        preferences=W_set,
        normalizer=normalizer,
        overlap=overlap,
    )
