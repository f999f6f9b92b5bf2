import csv
import json
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest
import yaml

from wrsnsim.cli import main
from wrsnsim.runner import METRICS_COLUMNS, TRAJECTORY_COLUMNS

DATA = Path(__file__).parent / "data"

TINY_SCENARIO = {
    "scenario": {"x_max": 40, "y_max": 40, "n_sensors": 8, "episode_len": 15},
    "chargers": {"aav": {"spawn": [10, 10]}, "sv": {"spawn": [30, 30]}},
}


@pytest.fixture
def tiny_scenario_path(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump(TINY_SCENARIO))
    return str(path)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestRun:
    def test_stationary_run_zero_distance(self, tiny_scenario_path, tmp_path, capsys):
        metrics = tmp_path / "m.csv"
        rc = main(
            [
                "run",
                "--config",
                tiny_scenario_path,
                "--policy",
                "stationary",
                "--episodes",
                "2",
                "--seed",
                "0",
                "--metrics-out",
                str(metrics),
            ]
        )
        assert rc == 0
        rows = read_rows(metrics)
        assert rows[0] == list(METRICS_COLUMNS)
        dist_col = METRICS_COLUMNS.index("total_distance_m")
        for row in rows[1:]:
            assert float(row[dist_col]) == 0.0
        assert "policy=stationary" in capsys.readouterr().out

    def test_reruns_byte_identical(self, tiny_scenario_path, tmp_path):
        out = {}
        for tag in ("a", "b"):
            metrics = tmp_path / f"metrics_{tag}.csv"
            traj = tmp_path / f"traj_{tag}.csv"
            rc = main(
                [
                    "run",
                    "--config",
                    tiny_scenario_path,
                    "--policy",
                    "random",
                    "--episodes",
                    "3",
                    "--seed",
                    "0",
                    "--metrics-out",
                    str(metrics),
                    "--traj-out",
                    str(traj),
                ]
            )
            assert rc == 0
            out[tag] = (metrics.read_bytes(), traj.read_bytes())
        assert out["a"] == out["b"]

    def test_trajectory_schema(self, tiny_scenario_path, tmp_path):
        traj = tmp_path / "t.csv"
        main(
            [
                "run",
                "--config",
                tiny_scenario_path,
                "--policy",
                "greedy",
                "--episodes",
                "1",
                "--seed",
                "1",
                "--traj-out",
                str(traj),
            ]
        )
        rows = read_rows(traj)
        assert rows[0] == list(TRAJECTORY_COLUMNS)
        kinds = {row[3] for row in rows[1:]}
        assert kinds == {"sensor", "aav", "sv"}
        # 8 sensors + 2 chargers per slot, slots 0..15 inclusive
        assert len(rows) - 1 == (8 + 2) * 16

    def test_unreadable_config_exits_2(self, tmp_path):
        rc = main(["run", "--config", str(tmp_path / "nope.yaml"), "--policy", "random"])
        assert rc == 2

    def test_invalid_config_exits_2(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("scenario:\n  e_max: -1\n")
        assert main(["run", "--config", str(bad)]) == 2

    def test_invalid_policy_exits_2(self, tiny_scenario_path):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--config", tiny_scenario_path, "--policy", "warp"])
        assert exc.value.code == 2

    def test_golden_metrics_file(self, tmp_path):
        """Schema freeze: the tiny reference run must reproduce the golden CSV."""
        golden = DATA / "golden_metrics.csv"
        metrics = tmp_path / "m.csv"
        config = tmp_path / "golden.yaml"
        config.write_text(yaml.safe_dump(TINY_SCENARIO))
        rc = main(
            [
                "run",
                "--config",
                str(config),
                "--policy",
                "greedy",
                "--episodes",
                "2",
                "--seed",
                "42",
                "--metrics-out",
                str(metrics),
            ]
        )
        assert rc == 0
        assert metrics.read_bytes() == golden.read_bytes()


class TestValidate:
    def test_empty_config_prints_defaults(self, tmp_path, capsys):
        empty = tmp_path / "empty.yaml"
        empty.write_text("")
        assert main(["validate", "--config", str(empty)]) == 0
        doc = yaml.safe_load(capsys.readouterr().out)
        assert doc["scenario"]["x_max"] == 100.0
        assert doc["scenario"]["n_sensors"] == 100
        assert doc["scenario"]["episode_len"] == 200
        assert doc["chargers"]["aav"]["charging"]["p0"] == 3.0
        assert doc["chargers"]["aav"]["charging"]["d_max"] == 6.0

    def test_invalid_config_lists_errors(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text("scenario:\n  e_max: -1\n  n_sensors: 0\n")
        assert main(["validate", "--config", str(bad)]) == 2
        err = capsys.readouterr().err
        assert "e_max" in err and "n_sensors" in err

    def test_unknown_key_warns(self, tmp_path, capsys):
        doc = tmp_path / "warn.yaml"
        doc.write_text("scenario:\n  sensors: 5\n")
        assert main(["validate", "--config", str(doc)]) == 0
        assert "unknown key scenario.sensors" in capsys.readouterr().err

    def test_trainer_passthrough_round_trips(self, tmp_path, capsys):
        doc = tmp_path / "t.yaml"
        doc.write_text("trainer:\n  episodes: 12\n")
        assert main(["validate", "--config", str(doc)]) == 0
        parsed = yaml.safe_load(capsys.readouterr().out)
        assert parsed["trainer"] == {"episodes": 12}


class TestServe:
    def test_flag_conflicts_exit_2(self, tiny_scenario_path):
        for argv in (
            ["serve", "--config", tiny_scenario_path],
            ["serve", "--config", tiny_scenario_path, "--stdio", "--port", "0"],
        ):
            with pytest.raises(SystemExit) as exc:
                main(argv)
            assert exc.value.code == 2

    def test_stdio_subprocess_round_trip(self, tiny_scenario_path):
        proc = subprocess.Popen(
            [sys.executable, "-m", "wrsnsim", "serve", "--stdio", "--config", tiny_scenario_path],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
        )
        try:
            requests = [
                b'{"cmd":"spec"}\n',
                b'{"cmd":"reset","seed":5}\n',
                b'{"cmd":"step","actions":{"aav":[0.2,0.4],"sv":[0.8,0.1]}}\n',
                b"garbage\n",
                b'{"cmd":"close"}\n',
            ]
            proc.stdin.write(b"".join(requests))
            proc.stdin.flush()
            lines = [proc.stdout.readline() for _ in requests]
            spec, rst, step, bad, closed = (json.loads(l) for l in lines)
            assert spec["obs_dim"] == 3 * 8 + 5
            assert rst["t"] == 0
            assert "rewards" in step
            assert bad["code"] == "parse_error"
            assert closed == {"ok": True}
            assert proc.wait(timeout=10) == 0
        finally:
            proc.kill()

    def test_tcp_subprocess_announces_port(self, tiny_scenario_path):
        proc = subprocess.Popen(
            [sys.executable, "-m", "wrsnsim", "serve", "--port", "0", "--config", tiny_scenario_path],
            stdout=subprocess.PIPE,
        )
        try:
            line = proc.stdout.readline()
            info = json.loads(line)
            assert info["event"] == "listening" and info["port"] > 0
            with socket.create_connection(("127.0.0.1", info["port"]), timeout=5) as sock:
                fh = sock.makefile("rwb")
                fh.write(b'{"cmd":"spec"}\n')
                fh.flush()
                assert json.loads(fh.readline())["n_agents"] == 2
        finally:
            proc.kill()
            proc.wait(timeout=10)
