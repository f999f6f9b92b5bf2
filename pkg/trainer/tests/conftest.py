import sys
from pathlib import Path

import pytest
import yaml

TINY_SCENARIO = {
    "scenario": {"x_max": 30, "y_max": 30, "n_sensors": 6, "episode_len": 12},
    "chargers": {
        "aav": {"spawn": [8, 8], "charging": {"d_max": 8.0}},
        "sv": {"spawn": [22, 22], "charging": {"d_max": 8.0}},
    },
    "rewards": {
        "aav": {"charge": 3.0, "distance": 0.02, "mortality": 2.0},
        "sv": {"charge": 3.0, "distance": 0.04, "mortality": 1.0},
    },
}


@pytest.fixture(scope="session")
def tiny_scenario_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("scenario") / "tiny.yaml"
    path.write_text(yaml.safe_dump(TINY_SCENARIO))
    return str(path)


def env_command(scenario_path: str) -> list[str]:
    return [sys.executable, "-m", "wrsnsim", "serve", "--stdio", "--config", scenario_path]


def desk_scenario_path() -> str:
    return str(Path(__file__).resolve().parents[1] / "configs" / "desk40.yaml")
