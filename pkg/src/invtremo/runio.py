"""Run-directory persistence.

A finished run is a directory of four deterministic files:

* ``archive.csv``   - every evaluation: iteration, x columns, f columns
* ``trace.jsonl``   - one record per optimizer iteration
* ``models.json``   - final inverse models, normalizer state, preferences
* ``meta.json``     - problem spec, optimizer config, overlap, seed

Floats are serialized with shortest-roundtrip repr, and JSON writers sort
keys, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datasets import dumps_canonical
from .exceptions import FormatError
from .invtgp import model_from_dict
from .optimizer import OptimizerConfig, OverlapMap, RunResult
from .problems import MdtlzSpec, ObjectiveNormalizer, Problem, make_mdtlz

META_FORMAT = "invtremo.run-meta"
MODELS_FORMAT = "invtremo.run-models"
RUN_VERSION = 1


def _fmt(value: float) -> str:
    return repr(float(value))


def save_run(result: RunResult, run_dir: str | Path) -> None:
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    d, m = result.X.shape[1], result.F.shape[1]

    header = (
        ["iteration"]
        + [f"x{j}" for j in range(d)]
        + [f"f{i}" for i in range(m)]
    )
    lines = [",".join(header)]
    for it, x, f in zip(result.iterations, result.X, result.F):
        lines.append(",".join([str(int(it))] + [_fmt(v) for v in x] + [_fmt(v) for v in f]))
    (run_dir / "archive.csv").write_text("\n".join(lines) + "\n")

    with open(run_dir / "trace.jsonl", "w") as fh:
        for record in result.trace:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    models_doc = {
        "format": MODELS_FORMAT,
        "version": RUN_VERSION,
        "models": [model.to_dict() for model in result.models],
        "normalizer": result.normalizer.state_dict(),
        "lower": result.problem.lower.tolist(),
        "upper": result.problem.upper.tolist(),
        "preferences": result.preferences.tolist(),
        "nd_indices": result.nd_indices.tolist(),
    }
    (run_dir / "models.json").write_text(dumps_canonical(models_doc))

    if result.problem.spec is not None:
        problem_doc = {"kind": "mdtlz", **result.problem.spec.to_dict()}
    else:
        problem_doc = {"kind": "external", "id": result.problem.id, "d": d, "m": m}
    meta_doc = {
        "format": META_FORMAT,
        "version": RUN_VERSION,
        "problem": problem_doc,
        "config": result.config.to_dict(),
        "overlap": result.overlap.to_dict() if result.overlap else None,
        "source_dataset": result.source_path,
        "preference_sampling": "cycle-without-replacement",
    }
    (run_dir / "meta.json").write_text(dumps_canonical(meta_doc))


def save_run_metrics(run_dir: str | Path, metrics: dict) -> None:
    (Path(run_dir) / "metrics.json").write_text(dumps_canonical(metrics))


@dataclass
class LoadedRun:
    """A run directory parsed back into memory, models rebuilt."""

    run_dir: Path
    meta: dict
    problem: Problem | None
    X: np.ndarray
    F: np.ndarray
    iterations: np.ndarray
    nd_indices: np.ndarray
    models: list
    normalizer: ObjectiveNormalizer
    preferences: np.ndarray
    metrics: dict | None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    @property
    def run_id(self) -> str:
        return self.run_dir.name


def _load_json(path: Path, expected_format: str) -> dict:
    try:
        obj = json.loads(path.read_text())
    except FileNotFoundError as err:
        raise FormatError(f"{path} is missing") from err
    except json.JSONDecodeError as err:
        raise FormatError(f"{path}: malformed JSON at line {err.lineno}: {err.msg}") from err
    if obj.get("format") != expected_format:
        raise FormatError(f"{path}: expected format {expected_format!r}, got {obj.get('format')!r}")
    if obj.get("version") != RUN_VERSION:
        raise FormatError(f"{path}: unsupported version {obj.get('version')!r}")
    return obj


def problem_from_meta(meta: dict) -> Problem | None:
    doc = meta["problem"]
    if doc.get("kind") == "mdtlz":
        return make_mdtlz(MdtlzSpec.from_dict(doc))
    return None


def load_run(run_dir: str | Path) -> LoadedRun:
    run_dir = Path(run_dir)
    meta = _load_json(run_dir / "meta.json", META_FORMAT)
    models_doc = _load_json(run_dir / "models.json", MODELS_FORMAT)

    csv_path = run_dir / "archive.csv"
    if not csv_path.exists():
        raise FormatError(f"{csv_path} is missing")
    raw = np.genfromtxt(csv_path, delimiter=",", skip_header=1)
    raw = np.atleast_2d(raw)
    d = len(models_doc["lower"])
    iterations = raw[:, 0].astype(int)
    X = raw[:, 1 : 1 + d]
    F = raw[:, 1 + d :]

    metrics = None
    metrics_path = run_dir / "metrics.json"
    if metrics_path.exists():
        metrics = json.loads(metrics_path.read_text())

    return LoadedRun(
        run_dir=run_dir,
        meta=meta,
        problem=problem_from_meta(meta),
        X=X,
        F=F,
        iterations=iterations,
        nd_indices=np.asarray(models_doc["nd_indices"], dtype=int),
        models=[model_from_dict(obj) for obj in models_doc["models"]],
        normalizer=ObjectiveNormalizer.from_state(models_doc["normalizer"]),
        preferences=np.asarray(models_doc["preferences"], dtype=float),
        metrics=metrics,
        lower=np.asarray(models_doc["lower"], dtype=float),
        upper=np.asarray(models_doc["upper"], dtype=float),
    )


def load_trace(run_dir: str | Path) -> list[dict]:
    path = Path(run_dir) / "trace.jsonl"
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def experiment_config_from_meta(meta: dict) -> OptimizerConfig:
    return OptimizerConfig.from_dict(meta["config"])


def overlap_from_meta(meta: dict) -> OverlapMap | None:
    if meta.get("overlap"):
        return OverlapMap.from_dict(meta["overlap"])
    return None
