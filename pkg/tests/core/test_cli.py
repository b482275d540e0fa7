"""
End-to-end tests for the gvnn-kit subcommands.
"""

import json
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from main import main
from signals.csv_io import load_csv_signal, write_csv_signal
from signals.maps import MapConfig, simulate_map

SMALL_MAP = ["--map", "hopfield", "--nodes", "5", "--length", "160"]


def _train(tmp_path, name="run", *extra):
    out_dir = tmp_path / name
    argv = ["train", *SMALL_MAP, "--hidden", "8", "--batch", "16", "--out-dir", str(out_dir)]
    return main(argv + list(extra)), out_dir


class TestGenerate:
    def test_default_hopfield(self, tmp_path):
        out = tmp_path / "hopfield.csv"
        assert main(["generate", "--map", "hopfield", "--out", str(out), "--quiet"]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("#gvnn-kit v1 manifest=")
        assert len(lines) == 11
        assert (tmp_path / "hopfield.json").exists()
        assert (tmp_path / "hopfield.manifest.json").exists()

    def test_rerun_is_byte_identical(self, tmp_path):
        out = tmp_path / "lorenz.csv"
        argv = ["generate", "--map", "lorenz", "--length", "100", "--out", str(out), "--quiet"]
        assert main(argv) == 0
        first = out.read_bytes()
        assert main(argv) == 0
        assert out.read_bytes() == first

    def test_reloads_equal(self, tmp_path):
        out = tmp_path / "m.csv"
        argv = ["generate", "--map", "macarthur", "--length", "50", "--seed", "3", "--out", str(out)]
        assert main(argv) == 0
        expected = simulate_map(MapConfig.from_defaults("macarthur", {"length": 50, "seed": 3}))
        np.testing.assert_array_equal(load_csv_signal(out), expected)

    def test_param_override(self, tmp_path):
        out = tmp_path / "h.csv"
        argv = ["generate", "--map", "hopfield", "--length", "20", "--param", "gain=2.5"]
        assert main(argv + ["--out", str(out)]) == 0
        sidecar = json.loads((tmp_path / "h.json").read_text())
        assert sidecar["map"]["params"]["gain"] == 2.5

    def test_unknown_param_is_config_error(self, tmp_path):
        argv = ["generate", "--map", "hopfield", "--param", "rho=1", "--out", str(tmp_path / "x.csv")]
        assert main(argv) == 2

    def test_hopfield_reports_lyapunov(self, tmp_path):
        out = tmp_path / "h.csv"
        assert main(["generate", "--map", "hopfield", "--out", str(out), "--quiet"]) == 0
        sidecar = json.loads((tmp_path / "h.json").read_text())
        assert sidecar["diagnostics"]["lyapunov"] > 0.0

    def test_other_maps_have_no_diagnostics(self, tmp_path):
        out = tmp_path / "m.csv"
        argv = ["generate", "--map", "macarthur", "--length", "20", "--out", str(out), "--quiet"]
        assert main(argv) == 0
        assert "diagnostics" not in json.loads((tmp_path / "m.json").read_text())


class TestTrainAndEval:
    def test_frozen_training_matches_eval(self, tmp_path):
        code, out_dir = _train(tmp_path, "run", "--epochs", "1", "--lr", "0")
        assert code == 0
        report = json.loads((out_dir / "report.json").read_text())
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert report["manifest"] == manifest["digest"]
        assert report["format"] == "gvnn-kit v1"

        checkpoint = out_dir / "checkpoint.json"
        assert main(["eval", "--checkpoint", str(checkpoint)]) == 0
        metrics = json.loads((out_dir / "eval.json").read_text())
        assert metrics["mse"] == report["test_mse"]

    def test_rerun_is_identical(self, tmp_path):
        code, first = _train(tmp_path, "a", "--epochs", "2", "--lr", "1e-3")
        assert code == 0
        checkpoint = (first / "checkpoint.json").read_bytes()
        curve = (first / "curve.csv").read_bytes()
        report = json.loads((first / "report.json").read_text())
        assert _train(tmp_path, "a", "--epochs", "2", "--lr", "1e-3")[0] == 0
        assert (first / "checkpoint.json").read_bytes() == checkpoint
        assert (first / "curve.csv").read_bytes() == curve
        again = json.loads((first / "report.json").read_text())
        report.pop("timing")
        again.pop("timing")
        assert again == report

    def test_eval_on_csv_data(self, tmp_path):
        data = tmp_path / "signal.csv"
        write_csv_signal(data, simulate_map(MapConfig.from_defaults("hopfield", {"nodes": 5, "length": 160})))
        out_dir = tmp_path / "run"
        argv = ["train", "--data", str(data), "--hidden", "8", "--epochs", "1", "--out-dir", str(out_dir)]
        assert main(argv) == 0
        report = json.loads((out_dir / "report.json").read_text())
        out = tmp_path / "eval" / "metrics.json"
        argv = ["eval", "--checkpoint", str(out_dir / "checkpoint.json"), "--data", str(data)]
        assert main(argv + ["--out", str(out)]) == 0
        assert json.loads(out.read_text())["mse"] == report["test_mse"]

    def test_config_file_and_flags(self, tmp_path):
        config = tmp_path / "run.yaml"
        config.write_text("train:\n  epochs: 2\n  lr: 0.001\nmodel:\n  support_param: lora:1\n")
        code, out_dir = _train(tmp_path, "cfg", "--config", str(config), "--epochs", "1")
        assert code == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["config"]["train"]["epochs"] == 1
        assert manifest["config"]["train"]["lr"] == 0.001
        assert manifest["config"]["model"]["support_param"] == "lora:1"

    def test_corrupted_checkpoint(self, tmp_path):
        checkpoint = tmp_path / "checkpoint.json"
        checkpoint.write_text("{not json")
        assert main(["eval", "--checkpoint", str(checkpoint), *SMALL_MAP]) == 3

    def test_map_shorter_than_window_is_data_error(self, tmp_path):
        out_dir = tmp_path / "short"
        argv = ["train", "--map", "hopfield", "--length", "3", "--window", "3", "--horizon", "1"]
        assert main(argv + ["--out-dir", str(out_dir)]) == 3
        assert not (out_dir / "manifest.json").exists()

    def test_missing_input(self, tmp_path):
        assert main(["train", "--out-dir", str(tmp_path / "x")]) == 2

    def test_bad_node_function(self, tmp_path):
        code, _ = _train(tmp_path, "bad", "--node-fn", "cosine")
        assert code == 2

    def test_missing_data_file(self, tmp_path):
        argv = ["train", "--data", str(tmp_path / "absent.csv"), "--out-dir", str(tmp_path / "x")]
        assert main(argv) == 3


class TestGvft:
    def test_zero_signal(self, tmp_path):
        data = tmp_path / "zero.csv"
        support = tmp_path / "w.csv"
        write_csv_signal(data, np.zeros((4, 6)))
        write_csv_signal(support, np.eye(4))
        out = tmp_path / "gvft.csv"
        argv = ["gvft", "--data", str(data), "--support", "file", "--support-file", str(support)]
        assert main(argv + ["--out", str(out)]) == 0
        assert not np.any(load_csv_signal(out))

    def test_energy_and_determinism(self, tmp_path):
        x = np.random.default_rng(0).standard_normal((6, 12))
        data = tmp_path / "x.csv"
        write_csv_signal(data, x)
        out = tmp_path / "gvft.csv"
        argv = ["gvft", "--data", str(data), "--node-fn", "lde", "--out", str(out)]
        assert main(argv) == 0
        first = out.read_bytes()
        coefficients = load_csv_signal(out)
        np.testing.assert_allclose(
            np.sum(coefficients**2, axis=0), np.sum(x**2, axis=0), rtol=1e-10
        )
        assert main(argv) == 0
        assert out.read_bytes() == first


class TestVerify:
    def test_zero_trials(self, tmp_path):
        out = tmp_path / "verify.json"
        assert main(["verify", "--trials", "0", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["reports"] == []
        assert payload["all_passed"] is True

    def test_small_run_is_deterministic(self, tmp_path):
        out = tmp_path / "verify.json"
        argv = ["verify", "--trials", "2", "--sizes", "4", "--seed", "11", "--out", str(out)]
        assert main(argv) == 0
        first = out.read_bytes()
        assert main(argv) == 0
        assert out.read_bytes() == first

    @pytest.mark.slow
    def test_default_run(self, tmp_path):
        assert main(["verify", "--out", str(tmp_path / "verify.json")]) == 0


class TestBench:
    def test_small_run(self, tmp_path):
        out = tmp_path / "bench.csv"
        argv = ["bench", "-B", "1", "-N", "3", "--t-list", "4", "8", "--repeats", "1"]
        assert main(argv + ["--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("#gvnn-kit v1 manifest=")
        assert len(lines) == 2 + 4

    def test_invalid_method(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["bench", "--methods", "gpu", "--out", str(tmp_path / "b.csv")])
        assert exc.value.code == 2
