"""Wireless rechargeable sensor network simulator with heterogeneous
aerial/ground mobile chargers, a wire protocol for external trainers, and
scripted baseline controllers."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .physics import (
    AavPowerParams,
    ChargingParams,
    SvPowerParams,
    aav_motion_power,
    charging_efficiency,
    received_power,
    sv_motion_power,
)
from .world import (
    AGENTS,
    ActionRangeError,
    ChargerConfig,
    ChargerState,
    EpisodeDoneError,
    RewardWeights,
    SensorNode,
    SlotMetrics,
    WorldConfig,
    WorldState,
    reset,
)

__version__ = "0.1.0"

__all__ = [
    "AGENTS",
    "ActionRangeError",
    "AavPowerParams",
    "ChargerConfig",
    "ChargerState",
    "ChargingParams",
    "EpisodeDoneError",
    "KERNEL_BACKEND",
    "RewardWeights",
    "SensorNode",
    "SlotMetrics",
    "SvPowerParams",
    "WorldConfig",
    "WorldState",
    "aav_motion_power",
    "charging_efficiency",
    "received_power",
    "reset",
    "sv_motion_power",
]
