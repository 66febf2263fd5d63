"""Command-line workflow: artifacts, determinism, exit codes."""

import json
import subprocess
import sys

import pytest

from novact.cli import main

FAST_NET = ["--j", "4", "--fast", "6", "--mid", "4", "--slow", "3"]


def run_cli(args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """gen-data + a quick training run shared by the artifact tests."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    ckpt = root / "ckpt.json"
    assert run_cli(["gen-data", "--out", data, "--seed", "0"]) == 0
    assert run_cli(
        ["train", "--data", data / "manifest.json", "--out", ckpt,
         "--curve", root / "curve.csv", "--epochs", "120", "--seed", "1"] + FAST_NET
    ) == 0
    return root


class TestGenData:
    def test_writes_manifest_and_csvs(self, workspace):
        manifest = json.loads((workspace / "data" / "manifest.json").read_text())
        assert len(manifest["patterns"]) == 6
        for entry in manifest["patterns"]:
            assert (workspace / "data" / entry["file"]).exists()

    def test_deterministic_files(self, tmp_path):
        run_cli(["gen-data", "--out", tmp_path / "a", "--seed", "5"])
        run_cli(["gen-data", "--out", tmp_path / "b", "--seed", "5"])
        a = (tmp_path / "a" / "left_jab.csv").read_bytes()
        b = (tmp_path / "b" / "left_jab.csv").read_bytes()
        assert a == b


class TestTrain:
    def test_checkpoint_and_curve_exist(self, workspace):
        assert (workspace / "ckpt.json").exists()
        curve = (workspace / "curve.csv").read_text().splitlines()
        assert curve[0] == "epoch,loss,seconds"
        assert len(curve) == 121

    def test_gamma_validation_is_usage_error(self, workspace, capsys):
        code = run_cli(["train", "--data", workspace / "data" / "manifest.json",
                        "--out", workspace / "nope.json", "--gamma", "1.5"])
        assert code == 1
        assert "[0, 1]" in capsys.readouterr().err

    def test_unknown_flag_rejected(self):
        assert run_cli(["train", "--frobnicate"]) == 1

    def test_missing_data_is_runtime_error(self, tmp_path):
        code = run_cli(["train", "--data", tmp_path / "nope.json",
                        "--out", tmp_path / "x.json", "--epochs", "1"])
        assert code == 2


class TestSweepMeasureRender:
    def test_sweep_writes_record_and_report(self, workspace):
        out = workspace / "sweep"
        code = run_cli(["sweep", "--ckpt", workspace / "ckpt.json", "--out", out,
                        "--resolution", "6", "--iterations", "3", "--sample-size", "4"])
        assert code == 0
        record = (out / "record.jsonl").read_text().splitlines()
        assert len(record) == 36
        report = json.loads((out / "report.json").read_text())
        assert report["cells_total"] == 36
        assert sum(report["counts"].values()) == 36

    def test_measure_reproduces_report(self, workspace):
        out = workspace / "measured.json"
        code = run_cli(["measure", "--ckpt", workspace / "ckpt.json",
                        "--record", workspace / "sweep" / "record.jsonl",
                        "--out", out, "--iterations", "3", "--sample-size", "4"])
        assert code == 0
        measured = json.loads(out.read_text())
        swept = json.loads((workspace / "sweep" / "report.json").read_text())
        assert measured == swept

    def test_render_map(self, workspace):
        out = workspace / "map.png"
        code = run_cli(["render-map", "--ckpt", workspace / "ckpt.json",
                        "--record", workspace / "sweep" / "record.jsonl", "--out", out])
        assert code == 0
        assert out.exists()

    def test_generate_writes_csv(self, workspace):
        out = workspace / "traj.csv"
        code = run_cli(["generate", "--ckpt", workspace / "ckpt.json",
                        "--pb", "0.2", "-0.3", "--steps", "20", "--out", out])
        assert code == 0
        rows = out.read_text().splitlines()
        assert len(rows) == 21

    def test_identical_invocations_identical_artifacts(self, workspace, tmp_path):
        for sub in ("x", "y"):
            code = run_cli(["sweep", "--ckpt", workspace / "ckpt.json",
                            "--out", tmp_path / sub, "--resolution", "5",
                            "--iterations", "2", "--sample-size", "3", "--seed", "9"])
            assert code == 0
        assert (tmp_path / "x" / "record.jsonl").read_bytes() == \
            (tmp_path / "y" / "record.jsonl").read_bytes()
        assert (tmp_path / "x" / "report.json").read_bytes() == \
            (tmp_path / "y" / "report.json").read_bytes()


class TestHelp:
    @pytest.mark.parametrize(
        "command", ["gen-data", "train", "sweep", "measure", "render-map", "serve", "generate"]
    )
    def test_help_lists_defaults(self, command):
        proc = subprocess.run(
            [sys.executable, "-m", "novact.cli", command, "--help"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "default" in proc.stdout

    def test_effective_config_printed(self, tmp_path, capsys):
        run_cli(["gen-data", "--out", tmp_path / "d", "--seed", "3"])
        out = capsys.readouterr().out
        assert "config:" in out and '"seed": 3' in out
