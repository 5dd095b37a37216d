"""HTTP service exposing finished runs to a decision-maker.

Read-only over the run artifacts: queries and verification evaluations
are logged to a sibling ``.sessions`` directory, never into the run
directories themselves. Endpoints:

* ``GET  /runs``                 - summaries of every run under the root
* ``GET  /runs/{id}/front``      - nondominated set with preference coords
* ``POST /runs/{id}/query``      - inverse-model posterior for a preference
* ``POST /runs/{id}/evaluate``   - true objectives of a candidate solution
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .decomposition import preference_from_objectives
from .exceptions import FormatError
from .runio import LoadedRun, load_run

SESSIONS_DIR = ".sessions"


class QueryBody(BaseModel):
    w: list[float]


class EvaluateBody(BaseModel):
    x: list[float]


class _RunRegistry:
    """Lazy, cached access to run directories under one output root."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._cache: dict[str, LoadedRun] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def list_runs(self) -> list[dict]:
        if not self.root.is_dir():
            raise FormatError(f"output root {self.root} is not a directory")
        summaries = []
        for child in sorted(self.root.iterdir()):
            if not child.is_dir() or not (child / "meta.json").exists():
                continue
            try:
                meta = json.loads((child / "meta.json").read_text())
                entry = {
                    "id": child.name,
                    "status": "ok",
                    "problem": meta["problem"],
                    "variant": meta["config"]["variant"],
                    "seed": meta["config"]["seed"],
                    "budget": meta["config"]["budget"],
                }
                metrics_path = child / "metrics.json"
                if metrics_path.exists():
                    metrics = json.loads(metrics_path.read_text())
                    igd_map = metrics.get("igd") or {}
                    if igd_map:
                        final_key = max(igd_map, key=int)
                        entry["final_igd"] = igd_map[final_key]
                    entry["final_rmse"] = metrics.get("rmse")
                summaries.append(entry)
            except Exception as err:  # corrupted run must not break the listing
                summaries.append({"id": child.name, "status": "invalid", "error": str(err)})
        return summaries

    def get(self, run_id: str) -> LoadedRun:
        if run_id not in self._cache:
            run_dir = self.root / run_id
            if not run_dir.is_dir():
                raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
            try:
                self._cache[run_id] = load_run(run_dir)
            except FormatError as err:
                raise HTTPException(status_code=500, detail=str(err)) from err
        return self._cache[run_id]

    def log(self, run_id: str, record: dict) -> None:
        with self._locks_guard:
            lock = self._locks.setdefault(run_id, threading.Lock())
        sessions = self.root / SESSIONS_DIR
        sessions.mkdir(exist_ok=True)
        with lock:
            with open(sessions / f"{run_id}.jsonl", "a") as fh:
                fh.write(json.dumps({"ts": time.time(), **record}, sort_keys=True) + "\n")


def create_app(root: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    registry = _RunRegistry(Path(root))
    app = FastAPI(title="invtremo explorer")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/runs")
    def list_runs():
        try:
            return registry.list_runs()
        except FormatError as err:
            raise HTTPException(status_code=500, detail=str(err)) from err

    @app.get("/runs/{run_id}/front")
    def front(run_id: str):
        run = registry.get(run_id)
        X = run.X[run.nd_indices]
        F = run.F[run.nd_indices]
        W = preference_from_objectives(run.normalizer.normalize(F))
        return {
            "points": [
                {"x": x.tolist(), "f": f.tolist(), "w": w.tolist()}
                for x, f, w in zip(X, F, W)
            ]
        }

    @app.post("/runs/{run_id}/query")
    def query(run_id: str, body: QueryBody):
        run = registry.get(run_id)
        w = np.asarray(body.w, dtype=float)
        m = run.F.shape[1]
        if w.shape != (m,):
            raise HTTPException(status_code=422, detail=f"w must have {m} components")
        if np.any(w < 0) or abs(float(np.sum(w)) - 1.0) > 1e-3:
            raise HTTPException(
                status_code=422,
                detail="w must be nonnegative and sum to 1 within 1e-3",
            )
        w = w / np.sum(w)
        if not run.models:
            raise HTTPException(status_code=409, detail="run has no inverse models")
        lower, upper = run.lower, run.upper
        mus, stds, noise_stds = [], [], []
        for model in sorted(run.models, key=lambda mdl: mdl.var_index):
            mu, var = model.predict(w[None, :])
            mus.append(float(mu[0]))
            stds.append(float(np.sqrt(var[0])))
            noise = getattr(model, "noise_target", None)
            if noise is None:
                noise = model.noise_variance
            noise_stds.append(float(np.sqrt(noise)))
        mus = np.asarray(mus)
        clamped = np.clip(mus, lower, upper)
        flags = [bool(a != b) for a, b in zip(mus, clamped)]
        response = {
            "x_mean": clamped.tolist(),
            "x_std": stds,
            "x_noise_std": noise_stds,
            "clamped_flags": flags,
        }
        registry.log(run_id, {"type": "query", "w": w.tolist(), **response})
        return response

    @app.post("/runs/{run_id}/evaluate")
    def evaluate(run_id: str, body: EvaluateBody):
        run = registry.get(run_id)
        if run.problem is None:
            raise HTTPException(
                status_code=409, detail="run's problem is external and not evaluable here"
            )
        x = np.asarray(body.x, dtype=float)
        if x.shape != (run.problem.d,):
            raise HTTPException(status_code=422, detail=f"x must have {run.problem.d} components")
        if np.any(x < run.problem.lower - 1e-12) or np.any(x > run.problem.upper + 1e-12):
            raise HTTPException(status_code=422, detail="x violates the problem bounds")
        f = run.problem.evaluate(x)
        response = {"f": f.tolist()}
        registry.log(run_id, {"type": "evaluate", "x": x.tolist(), **response})
        return response

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
