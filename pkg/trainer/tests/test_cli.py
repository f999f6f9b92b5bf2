import csv
import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from wrsntrainer.cli import main


class TestTrainCommand:
    def test_short_training_run_via_cli(self, tiny_scenario_path, tmp_path):
        out = tmp_path / "run"
        rc = main(
            [
                "train",
                "--scenario",
                tiny_scenario_path,
                "--out",
                str(out),
                "--episodes",
                "2",
                "--seed",
                "0",
                "--trainer-config",
                str(_fast_trainer_config(tmp_path)),
                "--eval-episodes-final",
                "2",
            ]
        )
        assert rc == 0
        assert (out / "curves.csv").exists()
        assert (out / "checkpoint_final.pt").exists()
        assert (out / "eval_final.csv").exists()
        with open(out / "curves.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 3  # header + 2 episodes

    def test_scenario_trainer_section_feeds_config(self, tmp_path):
        scenario = {
            "scenario": {"x_max": 30, "y_max": 30, "n_sensors": 5, "episode_len": 8},
            "chargers": {"aav": {"spawn": [8, 8]}, "sv": {"spawn": [22, 22]}},
            "trainer": {"episodes": 1, "critic_epochs": 2, "cg_iters": 3},
        }
        path = tmp_path / "s.yaml"
        path.write_text(yaml.safe_dump(scenario))
        out = tmp_path / "run"
        assert main(["train", "--scenario", str(path), "--out", str(out)]) == 0
        with open(out / "curves.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 2  # the scenario's trainer section set episodes=1

    def test_bad_trainer_key_exits_2(self, tiny_scenario_path, tmp_path):
        bad = tmp_path / "t.yaml"
        bad.write_text("leraning_rate: 0.1\n")
        rc = main(
            [
                "train",
                "--scenario",
                tiny_scenario_path,
                "--out",
                str(tmp_path / "x"),
                "--trainer-config",
                str(bad),
            ]
        )
        assert rc == 2

    def test_ablation_flags(self, tiny_scenario_path, tmp_path):
        rc = main(
            [
                "train",
                "--scenario",
                tiny_scenario_path,
                "--out",
                str(tmp_path / "g"),
                "--episodes",
                "1",
                "--trainer-config",
                str(_fast_trainer_config(tmp_path)),
                "--gaussian-policy",
            ]
        )
        assert rc == 0


class TestEvalCommand:
    def test_eval_from_checkpoint(self, tiny_scenario_path, tmp_path, capsys):
        out = tmp_path / "run"
        main(
            [
                "train",
                "--scenario",
                tiny_scenario_path,
                "--out",
                str(out),
                "--episodes",
                "1",
                "--trainer-config",
                str(_fast_trainer_config(tmp_path)),
            ]
        )
        capsys.readouterr()
        report = tmp_path / "eval.csv"
        rc = main(
            [
                "eval",
                "--checkpoint",
                str(out / "checkpoint_final.pt"),
                "--scenario",
                tiny_scenario_path,
                "--episodes",
                "2",
                "--out",
                str(report),
            ]
        )
        assert rc == 0
        assert "eval[trained]" in capsys.readouterr().out
        with open(report, newline="") as fh:
            header = next(csv.reader(fh))
        assert header[:4] == ["episode", "agent", "slots", "final_mortality"]


def _fast_trainer_config(tmp_path) -> Path:
    path = tmp_path / "fast.yaml"
    if not path.exists():
        path.write_text(yaml.safe_dump({"critic_epochs": 2, "cg_iters": 3}))
    return path


class TestModuleEntryPoint:
    def test_python_dash_m_help(self):
        proc = subprocess.run(
            [sys.executable, "-m", "wrsntrainer", "--help"], capture_output=True, timeout=60
        )
        assert proc.returncode == 0
        assert b"train" in proc.stdout and b"eval" in proc.stdout
