"""Run-quality metrics: IGD, inverse-model RMSE, scalarized correlation.

IGD averages, over a reference set of true-front objective vectors, the
distance to the nearest point of the approximation set. Inverse-model
RMSE measures, in objective space, how far the models' predicted
solutions land from true Pareto-optimal ones when queried with the
matching preference vectors. Both operate on raw (unnormalized)
objective values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fastops
from .decomposition import preference_from_objectives
from .optimizer import OverlapMap
from .problems import MdtlzSpec, ObjectiveNormalizer, Problem, reference_front
from .simplex import uniform_simplex

DEFAULT_CHECKPOINTS = (25, 50, 75, 100)


def igd(reference_f: np.ndarray, approx_f: np.ndarray) -> float:
    """Mean distance from each reference point to its nearest approximation."""
    reference_f = np.atleast_2d(np.asarray(reference_f, dtype=float))
    approx_f = np.atleast_2d(np.asarray(approx_f, dtype=float))
    if reference_f.size == 0 or approx_f.size == 0:
        raise ValueError("igd needs non-empty reference and approximation sets")
    if reference_f.shape[1] != approx_f.shape[1]:
        raise ValueError("objective counts differ")
    return fastops.min_dist_mean(reference_f, approx_f)


def build_rmse_testset(spec: MdtlzSpec, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(W_opt, X_opt) pairs over the analytic front.

    Preference vectors come from the optimal objective vectors normalized
    over the front itself.
    """
    X_opt, F_opt = reference_front(spec, n)
    norm = ObjectiveNormalizer(m=spec.m)
    norm.update(F_opt)
    W_opt = preference_from_objectives(norm.normalize(F_opt))
    return W_opt, X_opt


def predict_solutions(models: list, W: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Stacked posterior-mean solutions for a batch of preferences, clamped."""
    by_index = sorted(models, key=lambda m: m.var_index)
    cols = []
    for model in by_index:
        if hasattr(model, "predict_mean"):
            cols.append(model.predict_mean(W))
        else:
            cols.append(model.predict(W)[0])
    X_pred = np.stack(cols, axis=1)
    return np.clip(X_pred, lower, upper)


def rmse_inverse(
    models: list, W_opt: np.ndarray, X_opt: np.ndarray, problem: Problem
) -> float:
    """Objective-space RMSE of inverse predictions over the test pairs.

    Function evaluations here are metric-only and never count against an
    optimization budget.
    """
    if not models:
        raise ValueError("no inverse models to evaluate")
    X_pred = predict_solutions(models, W_opt, problem.lower, problem.upper)
    F_opt = problem.evaluate_batch(X_opt)
    F_pred = problem.evaluate_batch(X_pred)
    sq = np.sum((F_opt - F_pred) ** 2, axis=1)
    return float(np.sqrt(np.mean(sq)))


def pearson_scalarized(
    source: Problem,
    target: Problem,
    overlap: OverlapMap,
    n_samples: int = 10000,
    seed: int = 0,
    eta: float = 0.05,
) -> float:
    """Sample correlation between the two tasks' scalarized objectives.

    Shared variables are drawn once and copied into both tasks; remaining
    variables of each task are filled uniformly; preferences are uniform on
    the simplex. Objectives are normalized per task over the sampled batch
    before scalarization.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    overlap.validate_dims(source.d, target.d)
    rng = np.random.default_rng(seed)

    X_t = target.lower + (target.upper - target.lower) * rng.random((n_samples, target.d))
    X_s = source.lower + (source.upper - source.lower) * rng.random((n_samples, source.d))
    for s_idx, t_idx in overlap.pairs:
        X_s[:, s_idx] = X_t[:, t_idx]
    W = uniform_simplex(rng, n_samples, target.m)

    def scalarize(problem: Problem, X: np.ndarray) -> np.ndarray:
        F = problem.evaluate_batch(X)
        norm = ObjectiveNormalizer(m=problem.m)
        norm.update(F)
        Fn = norm.normalize(F)
        wf = Fn * W
        return np.max(wf, axis=1) + eta * np.sum(wf, axis=1)

    ys = scalarize(source, X_s)
    yt = scalarize(target, X_t)
    if np.std(ys) == 0.0 or np.std(yt) == 0.0:
        raise ValueError("scalarized values are constant; correlation undefined")
    return float(np.corrcoef(ys, yt)[0, 1])


def checkpoint_list(n_init: int, budget: int, checkpoints=DEFAULT_CHECKPOINTS) -> list[int]:
    """Evaluation counts to report at: defaults clipped to the budget, plus
    the initial-sample count and the final budget."""
    pts = {k for k in checkpoints if n_init <= k <= budget}
    pts.add(n_init)
    pts.add(budget)
    return sorted(pts)


def igd_at_checkpoints(archive_f: np.ndarray, reference_f: np.ndarray, checkpoints: list[int]) -> dict[int, float]:
    """IGD of the dominance-filtered archive prefix at each checkpoint."""
    out = {}
    for k in checkpoints:
        F_k = archive_f[:k]
        mask = fastops.nondominated_mask(F_k)
        out[k] = igd(reference_f, F_k[mask])
    return out


@dataclass
class MetricReport:
    """Cross-seed aggregate of per-run metrics."""

    checkpoints: list[int]
    seeds: int
    igd_by_checkpoint: dict[int, dict[str, float]] = field(default_factory=dict)
    rmse_final: dict[str, float] | None = None
    per_run: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "checkpoints": list(self.checkpoints),
            "seeds": self.seeds,
            "igd_by_checkpoint": {str(k): v for k, v in self.igd_by_checkpoint.items()},
            "rmse_final": self.rmse_final,
            "per_run": self.per_run,
        }

    def to_csv(self) -> str:
        lines = ["metric,checkpoint,median,q25,q75"]
        for k in self.checkpoints:
            q = self.igd_by_checkpoint[k]
            lines.append(f"igd,{k},{q['median']!r},{q['q25']!r},{q['q75']!r}")
        if self.rmse_final is not None:
            q = self.rmse_final
            lines.append(f"rmse,final,{q['median']!r},{q['q25']!r},{q['q75']!r}")
        return "\n".join(lines) + "\n"


def _quantiles(values: list[float]) -> dict[str, float]:
    arr = np.asarray(values, dtype=float)
    return {
        "median": float(np.median(arr)),
        "q25": float(np.quantile(arr, 0.25)),
        "q75": float(np.quantile(arr, 0.75)),
    }


def aggregate(per_run_metrics: list[dict]) -> MetricReport:
    """Medians and quartiles over per-run metric dictionaries.

    Each entry holds ``igd`` (checkpoint -> value) and optionally ``rmse``.
    """
    if not per_run_metrics:
        raise ValueError("no runs to aggregate")
    checkpoints = sorted(per_run_metrics[0]["igd"])
    for entry in per_run_metrics[1:]:
        if sorted(entry["igd"]) != checkpoints:
            raise ValueError("runs have mismatched checkpoints")
    report = MetricReport(checkpoints=checkpoints, seeds=len(per_run_metrics), per_run=per_run_metrics)
    for k in checkpoints:
        report.igd_by_checkpoint[k] = _quantiles([e["igd"][k] for e in per_run_metrics])
    rmses = [e["rmse"] for e in per_run_metrics if e.get("rmse") is not None]
    if rmses:
        report.rmse_final = _quantiles(rmses)
    return report
