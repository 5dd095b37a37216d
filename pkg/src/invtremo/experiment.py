"""Experiment orchestration: seed fan-out, metrics, report tables."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .datasets import dumps_canonical, load_dataset
from .exceptions import FormatError, SpecError
from .metrics import (
    aggregate,
    build_rmse_testset,
    checkpoint_list,
    igd_at_checkpoints,
    rmse_inverse,
)
from .optimizer import OptimizerConfig, OverlapMap, run
from .problems import MdtlzSpec, make_mdtlz, reference_front
from .runio import save_run, save_run_metrics

EXPERIMENT_FORMAT = "invtremo.experiment"
EXPERIMENT_VERSION = 1

N_REFERENCE = 10000


@dataclass
class ExperimentConfig:
    """One experiment: a target task, optional source, seeds, output dir."""

    target: MdtlzSpec
    optimizer: OptimizerConfig
    n_seeds: int = 1
    source_dataset: str | None = None
    overlap: OverlapMap | None = None
    output_dir: str | None = None
    n_reference: int = N_REFERENCE
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_seeds < 1:
            raise SpecError("n_seeds must be >= 1")
        if self.optimizer.variant == "invtremo":
            if self.source_dataset is None or self.overlap is None:
                raise SpecError(
                    "variant 'invtremo' requires source_dataset and overlap in the config"
                )

    def to_dict(self) -> dict:
        return {
            "format": EXPERIMENT_FORMAT,
            "version": EXPERIMENT_VERSION,
            "target": self.target.to_dict(),
            "optimizer": self.optimizer.to_dict(),
            "n_seeds": self.n_seeds,
            "source_dataset": self.source_dataset,
            "overlap": self.overlap.to_dict() if self.overlap else None,
            "output_dir": self.output_dir,
            "n_reference": self.n_reference,
            "n_jobs": self.n_jobs,
        }

    @staticmethod
    def from_dict(obj: dict) -> "ExperimentConfig":
        if obj.get("format", EXPERIMENT_FORMAT) != EXPERIMENT_FORMAT:
            raise FormatError(f"not an experiment config (format={obj.get('format')!r})")
        if obj.get("version", EXPERIMENT_VERSION) != EXPERIMENT_VERSION:
            raise FormatError(f"unsupported experiment version {obj.get('version')!r}")
        return ExperimentConfig(
            target=MdtlzSpec.from_dict(obj["target"]),
            optimizer=OptimizerConfig.from_dict(obj["optimizer"]),
            n_seeds=int(obj.get("n_seeds", 1)),
            source_dataset=obj.get("source_dataset"),
            overlap=OverlapMap.from_dict(obj["overlap"]) if obj.get("overlap") else None,
            output_dir=obj.get("output_dir"),
            n_reference=int(obj.get("n_reference", N_REFERENCE)),
            n_jobs=int(obj.get("n_jobs", 1)),
        )

    @staticmethod
    def load(path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            obj = json.loads(path.read_text())
        except json.JSONDecodeError as err:
            raise FormatError(f"{path}: malformed JSON at line {err.lineno}: {err.msg}") from err
        cfg = ExperimentConfig.from_dict(obj)
        if cfg.source_dataset is not None:
            src = Path(cfg.source_dataset)
            if not src.is_absolute():
                src = path.parent / src
                cfg.source_dataset = str(src)
            if not src.exists():
                raise SpecError(f"source dataset {src} does not exist")
        return cfg


def run_id(target: MdtlzSpec, variant: str, seed: int) -> str:
    return f"{target.id}-{variant}-s{seed}"


def _run_one_seed(args: tuple) -> tuple[str, dict]:
    """Worker task: execute one seed and persist its run directory."""
    cfg_dict, seed, out_dir = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    problem = make_mdtlz(cfg.target)
    source = load_dataset(cfg.source_dataset) if (
        cfg.optimizer.variant == "invtremo" and cfg.source_dataset
    ) else None

    opt = OptimizerConfig.from_dict({**cfg.optimizer.to_dict(), "seed": seed})
    result = run(problem, source, cfg.overlap if source is not None else None, opt)
    result.source_path = cfg.source_dataset

    rid = run_id(cfg.target, opt.variant, seed)
    run_dir = Path(out_dir) / rid
    save_run(result, run_dir)

    checkpoints = checkpoint_list(opt.n_init, opt.budget)
    _, F_ref = reference_front(cfg.target, cfg.n_reference)
    igd_vals = igd_at_checkpoints(result.F, F_ref, checkpoints)
    rmse = None
    if result.models:
        W_opt, X_opt = build_rmse_testset(cfg.target, cfg.n_reference)
        rmse = rmse_inverse(result.models, W_opt, X_opt, problem)
    metrics = {
        "seed": seed,
        "variant": opt.variant,
        "igd": {str(k): v for k, v in igd_vals.items()},
        "rmse": rmse,
    }
    save_run_metrics(run_dir, metrics)
    return rid, {"igd": igd_vals, "rmse": rmse, "seed": seed}


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path) -> dict:
    """Run all seeds (seed_i = base_seed + i), write runs and the report."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    seeds = [cfg.optimizer.seed + i for i in range(cfg.n_seeds)]
    tasks = [(cfg.to_dict(), seed, str(out_dir)) for seed in seeds]
    if cfg.n_jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.n_jobs) as pool:
            results = list(pool.map(_run_one_seed, tasks))
    else:
        results = [_run_one_seed(task) for task in tasks]

    per_run = [metrics for _, metrics in results]
    report = aggregate(per_run)
    doc = {
        "experiment": cfg.to_dict(),
        "run_ids": [rid for rid, _ in results],
        "report": report.to_dict(),
    }
    (out_dir / "metrics.json").write_text(dumps_canonical(doc))
    (out_dir / "metrics.csv").write_text(report.to_csv())
    return doc


@dataclass
class ReportTable:
    """Side-by-side comparison of several finished experiments."""

    variants: list[str] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)

    def to_csv(self) -> str:
        header = ["metric", "checkpoint"] + [
            f"{v}_{q}" for v in self.variants for q in ("median", "q25", "q75")
        ]
        lines = [",".join(header)]
        for row in self.rows:
            cells = [row["metric"], str(row["checkpoint"])]
            for variant in self.variants:
                q = row["values"].get(variant)
                cells += (
                    [repr(q["median"]), repr(q["q25"]), repr(q["q75"])]
                    if q
                    else ["", "", ""]
                )
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"
