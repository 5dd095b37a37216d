"""CLI surface: gen-source, run, report."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from invtremo.cli import main
from invtremo.datasets import load_dataset
from invtremo.metrics import pearson_scalarized
from invtremo.optimizer import OverlapMap
from invtremo.problems import MdtlzSpec, make_mdtlz


@pytest.fixture
def runner():
    return CliRunner()


def gen_source_args(out, seed=0, generations=60, pop=40, keep=30, d=4):
    return [
        "gen-source", "--family", "dtlz2", "--delta1", "0.9", "--delta2", "0.05",
        "-d", str(d), "-m", "3", "--pop", str(pop), "--generations", str(generations),
        "--keep", str(keep), "--seed", str(seed), "--out", str(out),
    ]


def experiment_doc(source_path, budget=14, variant="invtremo", d=5, n_seeds=1):
    return {
        "format": "invtremo.experiment",
        "version": 1,
        "target": {"family": "dtlz2", "inverted": False, "delta1": 1.0,
                    "delta2": 0.0, "d": d, "m": 3},
        "optimizer": {
            "variant": variant, "n_init": 8, "budget": budget, "seed": 0,
            "n_offspring": 300, "n_probe": 300, "n_prefs": 10,
        },
        "overlap": {"pairs": [[0, 0], [1, 1], [2, 2], [3, 3]]},
        "source_dataset": str(source_path) if source_path else None,
        "n_seeds": n_seeds,
    }


class TestGenSource:
    def test_writes_exact_rows(self, runner, tmp_path):
        out = tmp_path / "src.json"
        result = runner.invoke(main, gen_source_args(out))
        assert result.exit_code == 0, result.output
        assert len(load_dataset(out)) == 30

    def test_same_seed_identical_files(self, runner, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert runner.invoke(main, gen_source_args(a, seed=7)).exit_code == 0
        assert runner.invoke(main, gen_source_args(b, seed=7)).exit_code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_hs_source_correlates_with_target(self, runner, tmp_path):
        """A generated high-similarity dataset comes from a problem whose
        scalarized objectives correlate strongly with the target's."""
        out = tmp_path / "hs.json"
        result = runner.invoke(
            main,
            ["gen-source", "--family", "dtlz2", "--delta1", "0.9", "--delta2", "0.05",
             "-d", "6", "-m", "3", "--pop", "60", "--generations", "100",
             "--keep", "50", "--seed", "1", "--out", str(out)],
        )
        assert result.exit_code == 0
        ds = load_dataset(out)
        source = make_mdtlz(MdtlzSpec("dtlz2", False, 0.9, 0.05, 6, 3))
        target = make_mdtlz(MdtlzSpec("dtlz2", False, 1.0, 0.0, 8, 3))
        r = pearson_scalarized(source, target, OverlapMap.first_k(ds.d), 2000, 0)
        assert r > 0.9


class TestRunCommand:
    def test_run_writes_runs_and_metrics(self, runner, tmp_path):
        src = tmp_path / "src.json"
        assert runner.invoke(main, gen_source_args(src)).exit_code == 0
        cfg_path = tmp_path / "exp.json"
        cfg_path.write_text(json.dumps(experiment_doc(src)))
        out = tmp_path / "out"
        result = runner.invoke(main, ["run", "--config", str(cfg_path), "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert (out / "metrics.json").exists() and (out / "metrics.csv").exists()
        run_dirs = [p for p in out.iterdir() if p.is_dir()]
        assert len(run_dirs) == 1
        for name in ("archive.csv", "trace.jsonl", "models.json", "meta.json", "metrics.json"):
            assert (run_dirs[0] / name).exists()

    def test_determinism_of_outputs(self, runner, tmp_path):
        """Identical config and seed give byte-identical archive and metric
        files."""
        src = tmp_path / "src.json"
        assert runner.invoke(main, gen_source_args(src)).exit_code == 0
        cfg_path = tmp_path / "exp.json"
        cfg_path.write_text(json.dumps(experiment_doc(src)))
        outs = []
        for sub in ("o1", "o2"):
            out = tmp_path / sub
            assert runner.invoke(main, ["run", "--config", str(cfg_path), "--out", str(out)]).exit_code == 0
            outs.append(out)
        run_name = next(p.name for p in outs[0].iterdir() if p.is_dir())
        assert (outs[0] / run_name / "archive.csv").read_bytes() == (
            outs[1] / run_name / "archive.csv"
        ).read_bytes()
        assert (outs[0] / "metrics.json").read_bytes() == (outs[1] / "metrics.json").read_bytes()

    def test_missing_source_rejected_before_evaluation(self, runner, tmp_path):
        cfg_path = tmp_path / "exp.json"
        cfg_path.write_text(json.dumps(experiment_doc(None)))
        result = runner.invoke(main, ["run", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
        assert result.exit_code != 0
        assert "source" in result.output.lower()

    def test_default_scale_short_budget_is_quick(self, runner, tmp_path):
        """A single seed at budget 25 with full-size offspring and probe
        populations finishes well within a minute."""
        import time

        cfg_path = tmp_path / "exp.json"
        doc = experiment_doc(None, variant="zerot", d=8)
        doc["optimizer"] = {"variant": "zerot", "budget": 25, "seed": 0}
        doc["n_reference"] = 2000
        cfg_path.write_text(json.dumps(doc))
        t0 = time.time()
        result = runner.invoke(
            main, ["run", "--config", str(cfg_path), "--out", str(tmp_path / "out")]
        )
        elapsed = time.time() - t0
        assert result.exit_code == 0, result.output
        assert elapsed < 60

    def test_variant_override(self, runner, tmp_path):
        cfg_path = tmp_path / "exp.json"
        cfg_path.write_text(json.dumps(experiment_doc(None, variant="zerot")))
        out = tmp_path / "out"
        result = runner.invoke(
            main, ["run", "--config", str(cfg_path), "--out", str(out), "--variant", "zerot"]
        )
        assert result.exit_code == 0, result.output
        meta = json.loads(next((out).glob("*/meta.json")).read_text())
        assert meta["config"]["variant"] == "zerot"


class TestReportCommand:
    def test_comparison_and_trace_export(self, runner, tmp_path):
        src = tmp_path / "src.json"
        assert runner.invoke(main, gen_source_args(src)).exit_code == 0
        outs = []
        for variant in ("invtremo", "zerot"):
            cfg_path = tmp_path / f"{variant}.json"
            cfg_path.write_text(json.dumps(experiment_doc(src, variant=variant)))
            out = tmp_path / variant
            assert runner.invoke(main, ["run", "--config", str(cfg_path), "--out", str(out)]).exit_code == 0
            outs.append(str(out))
        report_dir = tmp_path / "report"
        result = runner.invoke(main, ["report", *outs, "--out", str(report_dir)])
        assert result.exit_code == 0, result.output
        table = (report_dir / "comparison.csv").read_text().splitlines()
        assert table[0].startswith("metric,checkpoint,invtremo_median")
        trace = (report_dir / "trace_export.csv").read_text().splitlines()
        assert trace[0] == "run_id,iteration,ucb_selected,ucb_max_probe"
        assert len(trace) == 1 + 2 * 6  # two runs, six iterations each

    def test_empty_input_errors(self, runner, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        result = runner.invoke(main, ["report", str(empty), "--out", str(tmp_path / "r")])
        assert result.exit_code != 0
        assert not (tmp_path / "r").exists()

    def test_recomputes_metrics_when_missing(self, runner, tmp_path):
        """Runs saved without metrics.json still report: IGD and RMSE are
        recomputed from the archive and saved models."""
        cfg_path = tmp_path / "exp.json"
        cfg_path.write_text(json.dumps(experiment_doc(None, variant="zerot")))
        out = tmp_path / "out"
        assert runner.invoke(main, ["run", "--config", str(cfg_path), "--out", str(out)]).exit_code == 0
        for metrics in out.glob("*/metrics.json"):
            metrics.unlink()
        report_dir = tmp_path / "report"
        result = runner.invoke(
            main, ["report", str(out), "--out", str(report_dir), "--n-reference", "500"]
        )
        assert result.exit_code == 0, result.output
        table = (report_dir / "comparison.csv").read_text()
        assert "igd," in table and "rmse,final" in table


class TestEnvironment:
    def test_out_root_env_used_as_default(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("INVTREMO_OUT_ROOT", str(tmp_path / "root"))
        cfg_path = tmp_path / "exp.json"
        cfg_path.write_text(json.dumps(experiment_doc(None, variant="zerot")))
        result = runner.invoke(main, ["run", "--config", str(cfg_path)])
        assert result.exit_code == 0, result.output
        produced = list((tmp_path / "root").glob("*/metrics.json"))
        assert produced

    def test_serve_requires_root_or_env(self, runner, monkeypatch):
        monkeypatch.delenv("INVTREMO_OUT_ROOT", raising=False)
        result = runner.invoke(main, ["serve"])
        assert result.exit_code != 0
        assert "INVTREMO_OUT_ROOT" in result.output
