"""Markov-game world: sensor field, two mobile chargers, one-slot dynamics.

Each time slot runs a sensing phase (every alive sensor draws a random
consumption and may die), charger movement with boundary clamping, and a
charging phase (every powered charger broadcasts and in-range sensors
harvest). Rewards combine delivered power, travel distance and the dead
fraction of the sensor population.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .physics import (
    AavPowerParams,
    ChargingParams,
    SvPowerParams,
    aav_motion_power,
    sv_motion_power,
)

AGENTS = ("aav", "sv")

TWO_PI = 2.0 * math.pi

__all__ = [
    "AGENTS",
    "ActionRangeError",
    "ChargerConfig",
    "ChargerState",
    "EpisodeDoneError",
    "RewardWeights",
    "SensorNode",
    "SlotMetrics",
    "WorldConfig",
    "WorldState",
]


class EpisodeDoneError(RuntimeError):
    """Raised when step() is called on a finished episode."""


class ActionRangeError(ValueError):
    """Raised when a decoded action is outside [0, 2pi] x [0, d_move_max]."""


@dataclass(frozen=True)
class RewardWeights:
    """Per-agent reward weights: r = charge*f1 - distance*f2 - mortality*f3."""

    charge: float = 1.0
    distance: float = 0.02
    mortality: float = 2.0

    def __post_init__(self):
        if self.charge < 0 or self.distance < 0 or self.mortality < 0:
            raise ValueError("reward weights must be >= 0")


@dataclass(frozen=True)
class ChargerConfig:
    """Static per-charger configuration (see WorldConfig for defaults)."""

    kind: str
    initial_battery: float
    cruise_speed: float
    spawn: tuple[float, float]
    altitude: float
    charging: ChargingParams
    power: AavPowerParams | SvPowerParams
    reward_weights: RewardWeights

    def __post_init__(self):
        if self.kind not in AGENTS:
            raise ValueError(f"charger kind must be one of {AGENTS}, got {self.kind!r}")
        if self.initial_battery <= 0:
            raise ValueError("initial_battery must be > 0")
        if self.cruise_speed <= 0:
            raise ValueError("cruise_speed must be > 0")
        if self.altitude < 0:
            raise ValueError("altitude must be >= 0")
        if self.kind == "aav":
            if not isinstance(self.power, AavPowerParams):
                raise ValueError("aav charger needs AavPowerParams")
            if self.altitude >= self.charging.d_max:
                raise ValueError(
                    "aav altitude must be below the charging radius d_max, "
                    f"got altitude={self.altitude} d_max={self.charging.d_max}"
                )
        else:
            if not isinstance(self.power, SvPowerParams):
                raise ValueError("sv charger needs SvPowerParams")
            if self.altitude != 0:
                raise ValueError("sv altitude must be 0")

    def motion_power(self) -> float:
        """Propulsion/travel power [W] at this charger's cruise speed."""
        if self.kind == "aav":
            return aav_motion_power(self.power, self.cruise_speed)
        return sv_motion_power(self.power, self.cruise_speed)


def _default_aav() -> ChargerConfig:
    return ChargerConfig(
        kind="aav",
        initial_battery=150_000.0,
        cruise_speed=5.0,
        spawn=(25.0, 25.0),
        altitude=3.0,
        charging=ChargingParams(),
        power=AavPowerParams(),
        reward_weights=RewardWeights(charge=1.0, distance=0.02, mortality=2.0),
    )


def _default_sv() -> ChargerConfig:
    return ChargerConfig(
        kind="sv",
        initial_battery=300_000.0,
        cruise_speed=2.0,
        spawn=(75.0, 75.0),
        altitude=0.0,
        charging=ChargingParams(),
        power=SvPowerParams(),
        reward_weights=RewardWeights(charge=1.0, distance=0.04, mortality=1.0),
    )


@dataclass(frozen=True)
class WorldConfig:
    """Full scenario description; defaults are the 100x100 m, 100-node setup."""

    x_max: float = 100.0
    y_max: float = 100.0
    n_sensors: int = 100
    e_max: float = 2.0
    consumption_range: tuple[float, float] = (0.025, 0.04)
    slot_charge_duration: float = 1.0
    d_move_max: float = 10.0
    episode_len: int = 200
    init_energy_frac: tuple[float, float] = (0.5, 1.0)
    aav: ChargerConfig = field(default_factory=_default_aav)
    sv: ChargerConfig = field(default_factory=_default_sv)
    seed: int = 0

    def __post_init__(self):
        if self.x_max <= 0 or self.y_max <= 0:
            raise ValueError("x_max and y_max must be > 0")
        if self.n_sensors < 1:
            raise ValueError("n_sensors must be >= 1")
        if self.e_max <= 0:
            raise ValueError("e_max must be > 0")
        lo, hi = self.consumption_range
        if lo <= 0 or hi < lo:
            raise ValueError("consumption_range must satisfy 0 < lo <= hi")
        if self.slot_charge_duration <= 0:
            raise ValueError("slot_charge_duration must be > 0")
        if self.d_move_max <= 0:
            raise ValueError("d_move_max must be > 0")
        if self.d_move_max > math.hypot(self.x_max, self.y_max):
            raise ValueError("d_move_max must not exceed the area diagonal")
        if self.episode_len < 1:
            raise ValueError("episode_len must be >= 1")
        f_lo, f_hi = self.init_energy_frac
        if not (0 < f_lo <= f_hi <= 1):
            raise ValueError("init_energy_frac must satisfy 0 < lo <= hi <= 1")
        if self.aav.kind != "aav" or self.sv.kind != "sv":
            raise ValueError("charger configs assigned to the wrong slots")
        for ch in (self.aav, self.sv):
            sx, sy = ch.spawn
            if not (0 <= sx <= self.x_max and 0 <= sy <= self.y_max):
                raise ValueError(f"{ch.kind} spawn {ch.spawn} outside the area")

    def charger(self, name: str) -> ChargerConfig:
        if name == "aav":
            return self.aav
        if name == "sv":
            return self.sv
        raise KeyError(name)


@dataclass
class ChargerState:
    """Evolving state of one mobile charger."""

    kind: str
    x: float
    y: float
    altitude: float
    battery: float
    cruise_speed: float
    charging: ChargingParams
    power_model: AavPowerParams | SvPowerParams
    cruise_power: float
    dist_travelled_slot: float = 0.0

    @property
    def powered(self) -> bool:
        return self.battery > 0.0


@dataclass(frozen=True)
class SensorNode:
    """Read-only view of one sensor (materialized from the world arrays)."""

    id: int
    x: float
    y: float
    energy: float
    alive: bool
    last_draw: float


@dataclass(frozen=True)
class SlotMetrics:
    """Per-slot outcome: objectives, rewards and bookkeeping."""

    t: int
    f1_per_agent: dict[str, float]
    f2_per_agent: dict[str, float]
    f3: float
    rewards: dict[str, float]
    alive_count: int
    battery: dict[str, float]


class WorldState:
    """Mutable Markov-game state; one logical owner, no shared globals."""

    def __init__(self, config: WorldConfig, seed: int | None = None):
        self.config = config
        self.rng = np.random.default_rng(config.seed if seed is None else seed)
        n = config.n_sensors
        self.xs = self.rng.uniform(0.0, config.x_max, n)
        self.ys = self.rng.uniform(0.0, config.y_max, n)
        f_lo, f_hi = config.init_energy_frac
        self.energy = self.rng.uniform(f_lo * config.e_max, f_hi * config.e_max, n)
        self.alive = np.ones(n, dtype=bool)
        self.last_draw = np.zeros(n)
        self._powers = np.empty(n)
        self.chargers = {}
        for name in AGENTS:
            cc = config.charger(name)
            self.chargers[name] = ChargerState(
                kind=name,
                x=cc.spawn[0],
                y=cc.spawn[1],
                altitude=cc.altitude,
                battery=cc.initial_battery,
                cruise_speed=cc.cruise_speed,
                charging=cc.charging,
                power_model=cc.power,
                cruise_power=cc.motion_power(),
            )
        self.t = 0
        self.done = False
        self.last_metrics: SlotMetrics | None = None

    @property
    def sensors(self) -> list[SensorNode]:
        return [
            SensorNode(
                id=i,
                x=float(self.xs[i]),
                y=float(self.ys[i]),
                energy=float(self.energy[i]),
                alive=bool(self.alive[i]),
                last_draw=float(self.last_draw[i]),
            )
            for i in range(self.config.n_sensors)
        ]

    @property
    def alive_count(self) -> int:
        return int(np.count_nonzero(self.alive))

    def mortality(self) -> float:
        """Dead fraction of the sensor population, in [0, 1]."""
        n = self.config.n_sensors
        return (n - self.alive_count) / n

    def sense_phase(self) -> np.ndarray:
        """Run the sensing phase; returns the indices of newly dead sensors.

        Every alive sensor draws a fresh uniform consumption from the
        configured range; depletion (energy <= 0) is permanent death.
        """
        lo, hi = self.config.consumption_range
        draws = self.rng.uniform(lo, hi, self.config.n_sensors)
        before = self.alive.copy()
        kernels.sense_sweep(self.energy, self.alive, draws, self.last_draw)
        return np.flatnonzero(before & ~self.alive)

    def apply_action(self, agent: str, action: tuple[float, float]) -> float:
        """Move one charger by (heading, distance), clamped to the area.

        Returns the realized displacement [m] (the per-slot travel distance
        objective). Motion energy = cruise power * (displacement / cruise
        speed) is deducted from the battery; an unpowered charger ignores the
        command entirely.
        """
        theta, d = action
        if not (0.0 <= theta <= TWO_PI):
            raise ActionRangeError(f"heading {theta} outside [0, 2*pi]")
        if not (0.0 <= d <= self.config.d_move_max):
            raise ActionRangeError(
                f"travel distance {d} outside [0, {self.config.d_move_max}]"
            )
        ch = self.chargers[agent]
        if not ch.powered:
            ch.dist_travelled_slot = 0.0
            return 0.0
        nx = min(max(ch.x + d * math.cos(theta), 0.0), self.config.x_max)
        ny = min(max(ch.y + d * math.sin(theta), 0.0), self.config.y_max)
        displacement = math.hypot(nx - ch.x, ny - ch.y)
        ch.x = nx
        ch.y = ny
        ch.dist_travelled_slot = displacement
        if displacement > 0.0:
            cost = ch.cruise_power * (displacement / ch.cruise_speed)
            ch.battery = max(0.0, ch.battery - cost)
        return displacement

    def charge_phase(self) -> dict[str, float]:
        """Run the charging phase; returns delivered power f1 [W] per agent.

        Every powered charger broadcasts for the slot's charge duration and
        pays the transmit cost p0*tau regardless of receiver count. f1 sums
        the received power of alive, in-range, above-threshold sensors before
        storage capping; harvested energy is capped at e_max per node.
        """
        cfg = self.config
        f1 = {}
        for name in AGENTS:
            ch = self.chargers[name]
            if not ch.powered:
                f1[name] = 0.0
                continue
            cp = ch.charging
            dz2 = ch.altitude * ch.altitude
            kernels.charge_sweep(
                self.xs,
                self.ys,
                self.energy,
                self.alive,
                ch.x,
                ch.y,
                dz2,
                cp.alpha_lumped,
                cp.beta_offset,
                cp.d_max,
                cp.p0,
                cp.rx_threshold,
                cfg.slot_charge_duration,
                cfg.e_max,
                self._powers,
            )
            f1[name] = float(self._powers.sum())
            ch.battery = max(0.0, ch.battery - cp.p0 * cfg.slot_charge_duration)
        return f1

    def step(self, actions: dict[str, tuple[float, float]]) -> SlotMetrics:
        """Advance one slot: sense, move both chargers, charge, score.

        actions maps agent name -> (heading [rad], distance [m]). Raises
        EpisodeDoneError once the episode has ended.
        """
        if self.done:
            raise EpisodeDoneError(f"episode finished at t={self.t}")
        missing = [a for a in AGENTS if a not in actions]
        if missing:
            raise ValueError(f"missing actions for {missing}")
        self.sense_phase()
        f2 = {name: self.apply_action(name, actions[name]) for name in AGENTS}
        f1 = self.charge_phase()
        f3 = self.mortality()
        rewards = {}
        for name in AGENTS:
            w = self.config.charger(name).reward_weights
            rewards[name] = w.charge * f1[name] - w.distance * f2[name] - w.mortality * f3
        self.t += 1
        alive_count = self.alive_count
        battery = {name: self.chargers[name].battery for name in AGENTS}
        self.done = (
            self.t >= self.config.episode_len
            or all(b <= 0.0 for b in battery.values())
            or alive_count == 0
        )
        metrics = SlotMetrics(
            t=self.t,
            f1_per_agent=f1,
            f2_per_agent=f2,
            f3=f3,
            rewards=rewards,
            alive_count=alive_count,
            battery=battery,
        )
        self.last_metrics = metrics
        return metrics


def reset(config: WorldConfig, seed: int | None = None) -> WorldState:
    """Create a fresh episode: seeded sensor layout, full batteries, t=0."""
    return WorldState(config, seed)
