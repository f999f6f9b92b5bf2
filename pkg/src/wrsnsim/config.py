"""Scenario config files: YAML documents with nested sections, environment
variable overrides and defaulting to the reference scenario.

Sections: ``scenario`` (area, sensors, slots), ``chargers.aav`` /
``chargers.sv`` (battery, speed, spawn, charging and power models),
``rewards.aav`` / ``rewards.sv`` (weight triples) and ``trainer`` (opaque
passthrough for the training side, ignored here). Every key can be
overridden with ``WRSNSIM_<SECTION>__<KEY>...`` environment variables whose
values are parsed as YAML scalars.
"""

from __future__ import annotations

import os
from pathlib import Path

import yaml

from .physics import AavPowerParams, ChargingParams, SvPowerParams
from .world import ChargerConfig, RewardWeights, WorldConfig

ENV_PREFIX = "WRSNSIM_"

_TOP_SECTIONS = ("scenario", "chargers", "rewards", "trainer")


class ConfigError(ValueError):
    """Invalid config document; carries one message per violated invariant."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


def read_config_dict(path) -> dict:
    """Load the YAML document at path; an empty file means all defaults."""
    text = Path(path).read_text()
    doc = yaml.safe_load(text)
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigError([f"{path}: top level must be a mapping, got {type(doc).__name__}"])
    return doc


def apply_env_overrides(doc: dict, env=None) -> list[tuple[str, object]]:
    """Apply WRSNSIM_* overrides to doc in place; returns (dotted key, value)."""
    env = os.environ if env is None else env
    applied = []
    for name in sorted(env):
        if not name.startswith(ENV_PREFIX):
            continue
        parts = [p.lower() for p in name[len(ENV_PREFIX) :].split("__") if p]
        if not parts:
            continue
        try:
            value = yaml.safe_load(env[name])
        except yaml.YAMLError:
            value = env[name]
        node = doc
        for part in parts[:-1]:
            child = node.get(part)
            if not isinstance(child, dict):
                child = {}
                node[part] = child
            node = child
        node[parts[-1]] = value
        applied.append((".".join(parts), value))
    return applied


def _section(doc: dict, key: str, errors: list[str]) -> dict:
    value = doc.get(key, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        errors.append(f"{key}: must be a mapping")
        return {}
    return value


def _warn_unknown(sec: dict, path: str, known, warnings: list[str]):
    for key in sec:
        if key not in known:
            warnings.append(f"unknown key {path}.{key} (ignored)")


def _num(sec, path, key, default, errors, integer=False, positive=False, nonneg=False, min_value=None):
    value = sec.get(key, default)
    if integer:
        if isinstance(value, bool) or not isinstance(value, int):
            errors.append(f"{path}.{key}: must be an integer, got {value!r}")
            return default
    elif isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{path}.{key}: must be a number, got {value!r}")
        return default
    else:
        value = float(value)
    if positive and value <= 0:
        errors.append(f"{path}.{key}: must be > 0, got {value!r}")
        return default
    if nonneg and value < 0:
        errors.append(f"{path}.{key}: must be >= 0, got {value!r}")
        return default
    if min_value is not None and value < min_value:
        errors.append(f"{path}.{key}: must be >= {min_value}, got {value!r}")
        return default
    return value


def _pair(sec, path, key, default, errors, positive=False, ordered=False):
    value = sec.get(key, default)
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
    ):
        errors.append(f"{path}.{key}: must be a pair of numbers, got {value!r}")
        return tuple(default)
    lo, hi = float(value[0]), float(value[1])
    if positive and lo <= 0:
        errors.append(f"{path}.{key}: values must be > 0, got {value!r}")
        return tuple(default)
    if ordered and hi < lo:
        errors.append(f"{path}.{key}: must be ordered lo <= hi, got {value!r}")
        return tuple(default)
    return lo, hi


def _build_dataclass(cls, kwargs, path, errors):
    try:
        return cls(**kwargs)
    except ValueError as exc:
        errors.append(f"{path}: {exc}")
        return cls()


_CHARGING_KEYS = ("alpha_lumped", "beta_offset", "d_max", "p0", "rx_threshold")
_AAV_POWER_KEYS = (
    "blade_power",
    "induced_power",
    "tip_speed",
    "induced_velocity",
    "drag_coeff",
    "air_density",
    "rotor_solidity",
    "rotor_area",
)
_SV_POWER_KEYS = ("k1", "k2", "k3")
_REWARD_KEYS = ("charge", "distance", "mortality")


def _charging(sec, path, errors, warnings) -> ChargingParams:
    _warn_unknown(sec, path, _CHARGING_KEYS, warnings)
    defaults = ChargingParams()
    kwargs = {k: _num(sec, path, k, getattr(defaults, k), errors) for k in _CHARGING_KEYS}
    return _build_dataclass(ChargingParams, kwargs, path, errors)


def _charger(doc_chargers, rewards_doc, kind, errors, warnings) -> ChargerConfig:
    path = f"chargers.{kind}"
    sec = doc_chargers.get(kind, {}) or {}
    if not isinstance(sec, dict):
        errors.append(f"{path}: must be a mapping")
        sec = {}
    known = ("altitude", "initial_battery", "cruise_speed", "spawn", "charging", "power")
    _warn_unknown(sec, path, known, warnings)

    if kind == "aav":
        defaults = dict(altitude=3.0, initial_battery=150_000.0, cruise_speed=5.0, spawn=(25.0, 25.0))
        power_cls, power_keys = AavPowerParams, _AAV_POWER_KEYS
        weight_defaults = RewardWeights(charge=1.0, distance=0.02, mortality=2.0)
    else:
        defaults = dict(altitude=0.0, initial_battery=300_000.0, cruise_speed=2.0, spawn=(75.0, 75.0))
        power_cls, power_keys = SvPowerParams, _SV_POWER_KEYS
        weight_defaults = RewardWeights(charge=1.0, distance=0.04, mortality=1.0)

    charging_sec = sec.get("charging", {}) or {}
    if not isinstance(charging_sec, dict):
        errors.append(f"{path}.charging: must be a mapping")
        charging_sec = {}
    charging = _charging(charging_sec, f"{path}.charging", errors, warnings)

    power_sec = sec.get("power", {}) or {}
    if not isinstance(power_sec, dict):
        errors.append(f"{path}.power: must be a mapping")
        power_sec = {}
    _warn_unknown(power_sec, f"{path}.power", power_keys, warnings)
    power_defaults = power_cls()
    power_kwargs = {
        k: _num(power_sec, f"{path}.power", k, getattr(power_defaults, k), errors)
        for k in power_keys
    }
    power = _build_dataclass(power_cls, power_kwargs, f"{path}.power", errors)

    rewards_sec = rewards_doc.get(kind, {}) or {}
    if not isinstance(rewards_sec, dict):
        errors.append(f"rewards.{kind}: must be a mapping")
        rewards_sec = {}
    _warn_unknown(rewards_sec, f"rewards.{kind}", _REWARD_KEYS, warnings)
    weight_kwargs = {
        k: _num(rewards_sec, f"rewards.{kind}", k, getattr(weight_defaults, k), errors)
        for k in _REWARD_KEYS
    }
    weights = _build_dataclass(RewardWeights, weight_kwargs, f"rewards.{kind}", errors)

    kwargs = dict(
        kind=kind,
        altitude=_num(sec, path, "altitude", defaults["altitude"], errors, nonneg=True),
        initial_battery=_num(sec, path, "initial_battery", defaults["initial_battery"], errors, positive=True),
        cruise_speed=_num(sec, path, "cruise_speed", defaults["cruise_speed"], errors, positive=True),
        spawn=_pair(sec, path, "spawn", defaults["spawn"], errors),
        charging=charging,
        power=power,
        reward_weights=weights,
    )
    try:
        return ChargerConfig(**kwargs)
    except ValueError as exc:
        errors.append(f"{path}: {exc}")
        return _default_charger(kind)


def _default_charger(kind):
    from .world import _default_aav, _default_sv

    return _default_aav() if kind == "aav" else _default_sv()


_SCENARIO_KEYS = (
    "x_max",
    "y_max",
    "n_sensors",
    "e_max",
    "consumption_range",
    "slot_charge_duration",
    "d_move_max",
    "episode_len",
    "init_energy_frac",
    "seed",
)


def build_world_config(doc: dict):
    """Resolve a config document against the defaults.

    Returns (config, errors, warnings); config is None when errors exist.
    """
    errors: list[str] = []
    warnings: list[str] = []
    for key in doc:
        if key not in _TOP_SECTIONS:
            warnings.append(f"unknown key {key} (ignored)")
    scenario = _section(doc, "scenario", errors)
    chargers = _section(doc, "chargers", errors)
    rewards = _section(doc, "rewards", errors)
    _warn_unknown(scenario, "scenario", _SCENARIO_KEYS, warnings)
    _warn_unknown(chargers, "chargers", ("aav", "sv"), warnings)
    _warn_unknown(rewards, "rewards", ("aav", "sv"), warnings)

    aav = _charger(chargers, rewards, "aav", errors, warnings)
    sv = _charger(chargers, rewards, "sv", errors, warnings)

    kwargs = dict(
        x_max=_num(scenario, "scenario", "x_max", 100.0, errors, positive=True),
        y_max=_num(scenario, "scenario", "y_max", 100.0, errors, positive=True),
        n_sensors=_num(scenario, "scenario", "n_sensors", 100, errors, integer=True, min_value=1),
        e_max=_num(scenario, "scenario", "e_max", 2.0, errors, positive=True),
        consumption_range=_pair(
            scenario, "scenario", "consumption_range", (0.025, 0.04), errors, positive=True, ordered=True
        ),
        slot_charge_duration=_num(scenario, "scenario", "slot_charge_duration", 1.0, errors, positive=True),
        d_move_max=_num(scenario, "scenario", "d_move_max", 10.0, errors, positive=True),
        episode_len=_num(scenario, "scenario", "episode_len", 200, errors, integer=True, min_value=1),
        init_energy_frac=_pair(
            scenario, "scenario", "init_energy_frac", (0.5, 1.0), errors, positive=True, ordered=True
        ),
        aav=aav,
        sv=sv,
        seed=_num(scenario, "scenario", "seed", 0, errors, integer=True),
    )
    config = None
    try:
        config = WorldConfig(**kwargs)
    except ValueError as exc:
        errors.append(f"scenario: {exc}")
    if errors:
        return None, errors, warnings
    return config, errors, warnings


def load_config(path=None, env=None) -> WorldConfig:
    """Load, override and validate a scenario config; None means defaults."""
    doc = read_config_dict(path) if path is not None else {}
    apply_env_overrides(doc, env)
    config, errors, _ = build_world_config(doc)
    if errors:
        raise ConfigError(errors)
    return config


def config_to_dict(config: WorldConfig) -> dict:
    """Fully-resolved config as a plain nested dict (for display/dumping)."""

    def charging(cp: ChargingParams):
        return {k: getattr(cp, k) for k in _CHARGING_KEYS}

    def charger(cc: ChargerConfig):
        power_keys = _AAV_POWER_KEYS if cc.kind == "aav" else _SV_POWER_KEYS
        return {
            "altitude": cc.altitude,
            "initial_battery": cc.initial_battery,
            "cruise_speed": cc.cruise_speed,
            "spawn": list(cc.spawn),
            "charging": charging(cc.charging),
            "power": {k: getattr(cc.power, k) for k in power_keys},
        }

    def weights(cc: ChargerConfig):
        return {k: getattr(cc.reward_weights, k) for k in _REWARD_KEYS}

    return {
        "scenario": {
            "x_max": config.x_max,
            "y_max": config.y_max,
            "n_sensors": config.n_sensors,
            "e_max": config.e_max,
            "consumption_range": list(config.consumption_range),
            "slot_charge_duration": config.slot_charge_duration,
            "d_move_max": config.d_move_max,
            "episode_len": config.episode_len,
            "init_energy_frac": list(config.init_energy_frac),
            "seed": config.seed,
        },
        "chargers": {"aav": charger(config.aav), "sv": charger(config.sv)},
        "rewards": {"aav": weights(config.aav), "sv": weights(config.sv)},
    }
