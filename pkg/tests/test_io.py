"""Dataset files, run directories, experiment configs."""

import json
from pathlib import Path

import numpy as np
import pytest

from invtremo.datasets import InverseDataset, load_dataset, save_dataset
from invtremo.exceptions import FormatError, SpecError, ValidationError
from invtremo.experiment import ExperimentConfig
from invtremo.optimizer import OptimizerConfig, OverlapMap, run
from invtremo.problems import MdtlzSpec, make_mdtlz
from invtremo.runio import load_run, load_trace, save_run
from invtremo.simplex import uniform_simplex


def make_dataset(n=20, m=3, d=6, seed=0):
    rng = np.random.default_rng(seed)
    return InverseDataset(
        m=m,
        d=d,
        W=uniform_simplex(rng, n, m),
        X=rng.random((n, d)),
        lower=np.zeros(d),
        upper=np.ones(d),
        provenance={"problem": "synthetic", "generator": "test", "seed": seed},
    )


class TestDatasetFormat:
    def test_round_trip_byte_identical(self, tmp_path):
        path = tmp_path / "src.json"
        dataset = make_dataset(n=100)
        save_dataset(dataset, path)
        first = path.read_bytes()
        save_dataset(load_dataset(path), path)
        assert path.read_bytes() == first

    def test_hundred_row_dataset_columns(self, tmp_path):
        path = tmp_path / "src.json"
        save_dataset(make_dataset(n=100, m=3, d=6), path)
        loaded = load_dataset(path)
        assert len(loaded) == 100
        for j in range(6):
            assert loaded.column(j).shape == (100,)

    def test_off_simplex_row_rejected_with_index(self, tmp_path):
        path = tmp_path / "bad.json"
        dataset = make_dataset(n=5)
        doc = dataset.to_dict()
        doc["rows"][3]["w"] = [0.6, 0.6, 0.0]
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError, match=r"\[3\]"):
            load_dataset(path)

    def test_out_of_bounds_row_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        doc = make_dataset(n=4).to_dict()
        doc["rows"][2]["x"][0] = 1.5
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError, match=r"\[2\]"):
            load_dataset(path)

    def test_malformed_json_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"format": "invtremo.inverse-dataset",\n  "version": ')
        with pytest.raises(FormatError, match="line"):
            load_dataset(path)

    def test_unknown_version_rejected(self, tmp_path):
        path = tmp_path / "future.json"
        doc = make_dataset().to_dict()
        doc["version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(FormatError, match="version"):
            load_dataset(path)

    def test_wrong_format_tag_rejected(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text(json.dumps({"format": "something-else", "version": 1}))
        with pytest.raises(FormatError, match="format"):
            load_dataset(path)


@pytest.fixture(scope="module")
def finished_run(tmp_path_factory):
    problem = make_mdtlz(MdtlzSpec("dtlz2", False, 1.0, 0.0, 4, 3))
    source = make_dataset(n=15, m=3, d=4, seed=1)
    cfg = OptimizerConfig(
        variant="invtremo", n_init=8, budget=14, seed=0,
        n_offspring=300, n_probe=300, n_prefs=10,
    )
    result = run(problem, source, OverlapMap.first_k(3), cfg)
    run_dir = tmp_path_factory.mktemp("runs") / "r0"
    save_run(result, run_dir)
    return result, run_dir


class TestRunDirectory:
    def test_archive_round_trip(self, finished_run):
        result, run_dir = finished_run
        loaded = load_run(run_dir)
        np.testing.assert_array_equal(loaded.X, result.X)
        np.testing.assert_array_equal(loaded.F, result.F)
        np.testing.assert_array_equal(loaded.iterations, result.iterations)
        np.testing.assert_array_equal(loaded.nd_indices, result.nd_indices)

    def test_models_rebuilt_and_agree(self, finished_run):
        result, run_dir = finished_run
        loaded = load_run(run_dir)
        rng = np.random.default_rng(2)
        Wq = uniform_simplex(rng, 5, 3)
        for a, b in zip(
            sorted(result.models, key=lambda m: m.var_index),
            sorted(loaded.models, key=lambda m: m.var_index),
        ):
            np.testing.assert_allclose(a.predict(Wq)[0], b.predict(Wq)[0], atol=1e-12)

    def test_trace_loads(self, finished_run):
        result, run_dir = finished_run
        records = load_trace(run_dir)
        assert records == result.trace

    def test_save_is_deterministic(self, finished_run, tmp_path):
        result, run_dir = finished_run
        again = tmp_path / "again"
        save_run(result, again)
        for name in ("archive.csv", "trace.jsonl", "models.json", "meta.json"):
            assert (again / name).read_bytes() == (run_dir / name).read_bytes()

    def test_meta_contents(self, finished_run):
        _, run_dir = finished_run
        meta = json.loads((run_dir / "meta.json").read_text())
        assert meta["problem"]["kind"] == "mdtlz"
        assert meta["config"]["variant"] == "invtremo"
        assert meta["overlap"]["pairs"] == [[0, 0], [1, 1], [2, 2]]

    def test_missing_file_reported(self, tmp_path):
        with pytest.raises(FormatError, match="missing"):
            load_run(tmp_path)


class TestExperimentConfig:
    def _doc(self, tmp_path, **overrides):
        src = tmp_path / "src.json"
        save_dataset(make_dataset(), src)
        doc = {
            "format": "invtremo.experiment",
            "version": 1,
            "target": {"family": "dtlz2", "inverted": False, "delta1": 1.0,
                        "delta2": 0.0, "d": 8, "m": 3},
            "optimizer": {"variant": "invtremo", "budget": 30},
            "overlap": {"pairs": [[0, 0], [1, 1]]},
            "source_dataset": str(src),
            "n_seeds": 2,
        }
        doc.update(overrides)
        return doc

    def test_load_round_trip(self, tmp_path):
        doc = self._doc(tmp_path)
        path = tmp_path / "exp.json"
        path.write_text(json.dumps(doc))
        cfg = ExperimentConfig.load(path)
        assert cfg.n_seeds == 2
        assert cfg.target.id.startswith("mdtlz2")
        assert cfg.optimizer.budget == 30

    def test_missing_source_for_transfer_fails_before_running(self, tmp_path):
        doc = self._doc(tmp_path, source_dataset=None)
        path = tmp_path / "exp.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(SpecError):
            ExperimentConfig.load(path)

    def test_nonexistent_source_path(self, tmp_path):
        doc = self._doc(tmp_path, source_dataset=str(tmp_path / "nope.json"))
        path = tmp_path / "exp.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(SpecError, match="does not exist"):
            ExperimentConfig.load(path)

    def test_relative_source_resolved_against_config(self, tmp_path):
        doc = self._doc(tmp_path, source_dataset="src.json")
        path = tmp_path / "exp.json"
        path.write_text(json.dumps(doc))
        cfg = ExperimentConfig.load(path)
        assert Path(cfg.source_dataset).is_absolute()
