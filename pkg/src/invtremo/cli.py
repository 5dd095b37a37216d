"""Command-line entry points: gen-source, run, report, serve."""

from __future__ import annotations

import os
from pathlib import Path

import click
import numpy as np

from .datasets import dumps_canonical, save_dataset
from .exceptions import InvtremoError
from .experiment import ExperimentConfig, ReportTable, run_experiment
from .metrics import _quantiles, build_rmse_testset, igd_at_checkpoints, rmse_inverse
from .problems import MdtlzSpec, make_mdtlz, reference_front
from .runio import load_run, load_trace
from .sources import generate_source_dataset

OUT_ROOT_ENV = "INVTREMO_OUT_ROOT"


def _default_out(name: str) -> Path:
    return Path(os.environ.get(OUT_ROOT_ENV, "runs")) / name


@click.group()
def main():
    """Inverse-transfer multiobjective optimization toolkit."""


@main.command("gen-source")
@click.option("--family", type=click.Choice(["dtlz1", "dtlz2", "dtlz3", "dtlz4"]), required=True)
@click.option("--inverted/--no-inverted", default=False)
@click.option("--delta1", type=float, required=True)
@click.option("--delta2", type=float, required=True)
@click.option("-d", "--dim", type=int, required=True, help="decision dimension")
@click.option("-m", "--objectives", type=int, required=True)
@click.option("--pop", type=int, default=100, show_default=True)
@click.option("--generations", type=int, default=500, show_default=True)
@click.option("--keep", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
def cmd_gen_source(family, inverted, delta1, delta2, dim, objectives, pop, generations, keep, seed, out):
    """Optimize a source task and save its inverse dataset."""
    try:
        spec = MdtlzSpec(family, inverted, delta1, delta2, dim, objectives)
        problem = make_mdtlz(spec)
        dataset = generate_source_dataset(problem, pop, generations, keep, seed)
        out.parent.mkdir(parents=True, exist_ok=True)
        save_dataset(dataset, out)
    except InvtremoError as err:
        raise click.ClickException(str(err)) from err
    click.echo(f"wrote {len(dataset)} rows from {spec.id} to {out}")


@main.command("run")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--seeds", type=int, default=None, help="override the number of seeds")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--variant", type=click.Choice(["invtremo", "zerot", "parego-ucb"]), default=None)
@click.option("--budget", type=int, default=None)
@click.option("--jobs", type=int, default=None, help="parallel seed workers")
def cmd_run(config_path, seeds, out, variant, budget, jobs):
    """Execute an experiment config across seeds and write a metric report."""
    try:
        cfg = ExperimentConfig.load(config_path)
        overrides = {}
        if variant is not None:
            overrides["variant"] = variant
        if budget is not None:
            overrides["budget"] = budget
        if overrides:
            cfg = ExperimentConfig.from_dict(
                {**cfg.to_dict(), "optimizer": {**cfg.optimizer.to_dict(), **overrides}}
            )
        if seeds is not None:
            cfg.n_seeds = seeds
        if jobs is not None:
            cfg.n_jobs = jobs
        out_dir = out or (Path(cfg.output_dir) if cfg.output_dir else None)
        if out_dir is None:
            out_dir = _default_out(f"{cfg.target.id}-{cfg.optimizer.variant}")
        doc = run_experiment(cfg, out_dir)
    except InvtremoError as err:
        raise click.ClickException(str(err)) from err
    click.echo(f"wrote {len(doc['run_ids'])} runs and metrics to {out_dir}")


def _collect_run_dirs(paths: tuple[Path, ...]) -> list[Path]:
    run_dirs = []
    for path in paths:
        if (path / "meta.json").exists():
            run_dirs.append(path)
            continue
        if path.is_dir():
            run_dirs.extend(
                child for child in sorted(path.iterdir()) if (child / "meta.json").exists()
            )
    return run_dirs


@main.command("report")
@click.argument("run_paths", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=Path("report"))
@click.option("--n-reference", type=int, default=10000, show_default=True)
def cmd_report(run_paths, out, n_reference):
    """Aggregate finished runs into comparison tables and trace exports."""
    run_dirs = _collect_run_dirs(run_paths)
    if not run_dirs:
        raise click.ClickException("no run directories found under the given paths")

    by_variant: dict[str, list[dict]] = {}
    trace_lines = ["run_id,iteration,ucb_selected,ucb_max_probe"]
    reference_cache: dict[str, np.ndarray] = {}
    try:
        for run_dir in run_dirs:
            run = load_run(run_dir)
            variant = run.meta["config"]["variant"]
            metrics = run.metrics
            if metrics is None:
                if run.problem is None or run.problem.spec is None:
                    raise click.ClickException(
                        f"{run_dir}: no metrics.json and the problem is not recomputable"
                    )
                spec = run.problem.spec
                if spec.id not in reference_cache:
                    reference_cache[spec.id] = reference_front(spec, n_reference)[1]
                checkpoints = sorted(
                    {run.meta["config"]["n_init"], run.meta["config"]["budget"], 25, 50, 75, 100}
                )
                checkpoints = [
                    k for k in checkpoints
                    if run.meta["config"]["n_init"] <= k <= run.meta["config"]["budget"]
                ]

                igd_vals = igd_at_checkpoints(run.F, reference_cache[spec.id], checkpoints)
                rmse = None
                if run.models:
                    W_opt, X_opt = build_rmse_testset(spec, n_reference)
                    rmse = rmse_inverse(run.models, W_opt, X_opt, run.problem)
                metrics = {"igd": {str(k): v for k, v in igd_vals.items()}, "rmse": rmse}
            by_variant.setdefault(variant, []).append(metrics)
            for record in load_trace(run_dir):
                trace_lines.append(
                    f"{run.run_id},{record['iteration']},"
                    f"{record['ucb_selected']!r},{record['ucb_max_probe']!r}"
                )
    except InvtremoError as err:
        raise click.ClickException(str(err)) from err

    checkpoint_sets = {
        tuple(sorted(int(k) for k in m["igd"])) for ms in by_variant.values() for m in ms
    }
    if len(checkpoint_sets) != 1:
        raise click.ClickException(f"runs have incompatible checkpoints: {checkpoint_sets}")
    checkpoints = list(checkpoint_sets.pop())

    variants = sorted(by_variant)
    table = ReportTable(variants=variants)
    for k in checkpoints:
        values = {
            v: _quantiles([m["igd"][str(k)] for m in by_variant[v]]) for v in variants
        }
        table.rows.append({"metric": "igd", "checkpoint": k, "values": values})
    rmse_values = {}
    for v in variants:
        rmses = [m["rmse"] for m in by_variant[v] if m.get("rmse") is not None]
        if rmses:
            rmse_values[v] = _quantiles(rmses)
    if rmse_values:
        table.rows.append({"metric": "rmse", "checkpoint": "final", "values": rmse_values})

    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.csv").write_text(table.to_csv())
    (out / "comparison.json").write_text(
        dumps_canonical({"variants": variants, "rows": table.rows})
    )
    (out / "trace_export.csv").write_text("\n".join(trace_lines) + "\n")
    click.echo(f"reported {len(run_dirs)} runs across variants {variants} to {out}")


@main.command("serve")
@click.option("--root", type=click.Path(exists=True, file_okay=False, path_type=Path), default=None)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def cmd_serve(root, port, host):
    """Serve finished runs over HTTP for the explorer frontend."""
    import uvicorn

    from .service import create_app

    if root is None:
        env_root = os.environ.get(OUT_ROOT_ENV)
        if env_root is None:
            raise click.ClickException(f"--root or ${OUT_ROOT_ENV} is required")
        root = Path(env_root)
    # serve the built browser client when it exists next to the package
    ui_dir = Path(__file__).resolve().parents[2] / "frontend"
    app = create_app(root, ui_dir=ui_dir if (ui_dir / "dist").is_dir() else None)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
