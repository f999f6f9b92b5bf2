import numpy as np
import pytest

from wrsnsim.physics import AavPowerParams, ChargingParams, SvPowerParams
from wrsnsim.world import ChargerConfig, RewardWeights, WorldConfig


def small_config(**overrides) -> WorldConfig:
    """A 40x40 scenario with 12 sensors and 30 slots; fast to step."""
    defaults = dict(
        x_max=40.0,
        y_max=40.0,
        n_sensors=12,
        episode_len=30,
        aav=ChargerConfig(
            kind="aav",
            initial_battery=50_000.0,
            cruise_speed=5.0,
            spawn=(10.0, 10.0),
            altitude=3.0,
            charging=ChargingParams(),
            power=AavPowerParams(),
            reward_weights=RewardWeights(charge=1.0, distance=0.02, mortality=2.0),
        ),
        sv=ChargerConfig(
            kind="sv",
            initial_battery=100_000.0,
            cruise_speed=2.0,
            spawn=(30.0, 30.0),
            altitude=0.0,
            charging=ChargingParams(),
            power=SvPowerParams(),
            reward_weights=RewardWeights(charge=1.0, distance=0.04, mortality=1.0),
        ),
    )
    defaults.update(overrides)
    return WorldConfig(**defaults)


def random_world_config(rng: np.random.Generator) -> WorldConfig:
    """Randomized small scenario for fuzzing."""
    x_max = float(rng.uniform(20.0, 120.0))
    y_max = float(rng.uniform(20.0, 120.0))
    d_max = float(rng.uniform(4.0, 12.0))
    charging = ChargingParams(d_max=d_max, rx_threshold=float(rng.uniform(0.0, 0.01)))
    base = small_config()
    return WorldConfig(
        x_max=x_max,
        y_max=y_max,
        n_sensors=int(rng.integers(1, 30)),
        e_max=float(rng.uniform(0.5, 4.0)),
        consumption_range=tuple(sorted(rng.uniform(0.01, 0.08, 2))),
        slot_charge_duration=float(rng.uniform(0.5, 2.0)),
        d_move_max=float(rng.uniform(2.0, 15.0)),
        episode_len=int(rng.integers(5, 40)),
        aav=ChargerConfig(
            kind="aav",
            initial_battery=float(rng.uniform(500.0, 5_000.0)),
            cruise_speed=float(rng.uniform(2.0, 10.0)),
            spawn=(float(rng.uniform(0, x_max)), float(rng.uniform(0, y_max))),
            altitude=float(rng.uniform(0.5, 0.9) * d_max),
            charging=charging,
            power=base.aav.power,
            reward_weights=base.aav.reward_weights,
        ),
        sv=ChargerConfig(
            kind="sv",
            initial_battery=float(rng.uniform(500.0, 5_000.0)),
            cruise_speed=float(rng.uniform(0.5, 5.0)),
            spawn=(float(rng.uniform(0, x_max)), float(rng.uniform(0, y_max))),
            altitude=0.0,
            charging=charging,
            power=base.sv.power,
            reward_weights=base.sv.reward_weights,
        ),
    )


@pytest.fixture
def tiny_config():
    return small_config()
