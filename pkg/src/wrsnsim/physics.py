"""Closed-form wireless charging and motion power models.

Everything here is pure and stateless: the RF charging efficiency/received
power of a mobile charger, the rotary-wing propulsion power of the aerial
charger, and the DC-motor travel power of the ground charger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ChargingParams",
    "AavPowerParams",
    "SvPowerParams",
    "charging_efficiency",
    "received_power",
    "aav_motion_power",
    "sv_motion_power",
]


@dataclass(frozen=True)
class ChargingParams:
    """RF charging model parameters.

    alpha_lumped is the dimensionless lumped gain constant (antenna gains,
    rectifier efficiency, polarization loss and wavelength collapsed into a
    single factor); beta_offset [m] is the path-loss offset; d_max [m] is the
    effective charging radius beyond which the received power is treated as
    zero; p0 [W] is the transmit power; rx_threshold [W] is the minimum
    received power a sensor can rectify (enforced by the world, not here).
    """

    alpha_lumped: float = 36.0
    beta_offset: float = 30.0
    d_max: float = 6.0
    p0: float = 3.0
    rx_threshold: float = 0.005

    def __post_init__(self):
        if self.alpha_lumped <= 0:
            raise ValueError("alpha_lumped must be > 0")
        if self.beta_offset <= 0:
            raise ValueError("beta_offset must be > 0")
        if self.d_max <= 0:
            raise ValueError("d_max must be > 0")
        if self.p0 <= 0:
            raise ValueError("p0 must be > 0")
        if self.rx_threshold < 0:
            raise ValueError("rx_threshold must be >= 0")


@dataclass(frozen=True)
class AavPowerParams:
    """Rotary-wing propulsion model parameters.

    Defaults are the standard reference set for a small rotary-wing craft:
    blade (profile) and induced hover powers [W], rotor tip speed and mean
    induced velocity [m/s], fuselage drag ratio, air density [kg/m^3], rotor
    solidity and rotor disc area [m^2].
    """

    blade_power: float = 79.86
    induced_power: float = 88.63
    tip_speed: float = 120.0
    induced_velocity: float = 4.03
    drag_coeff: float = 0.6
    air_density: float = 1.225
    rotor_solidity: float = 0.05
    rotor_area: float = 0.503

    def __post_init__(self):
        for name in (
            "blade_power",
            "induced_power",
            "tip_speed",
            "induced_velocity",
            "drag_coeff",
            "air_density",
            "rotor_solidity",
            "rotor_area",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class SvPowerParams:
    """PMDC-motor travel power coefficients: P(v) = k1*v^2 + k2*v + k3.

    Units: k1 [W s^2/m^2], k2 [W s/m], k3 [W]. Defaults are calibrated so the
    ground charger draws an order of magnitude less than the aerial one.
    """

    k1: float = 0.3
    k2: float = 0.04
    k3: float = 10.0

    def __post_init__(self):
        if self.k1 < 0 or self.k2 < 0 or self.k3 < 0:
            raise ValueError("k1, k2, k3 must be >= 0")
        if self.k1 == 0 and self.k2 == 0 and self.k3 == 0:
            raise ValueError("k1, k2, k3 must not all be zero")


def charging_efficiency(params: ChargingParams, d: float) -> float:
    """Charging efficiency at transmitter-receiver distance d [m].

    mu = alpha / (d + beta)^2, with no radius cutoff applied here.
    """
    if d < 0:
        raise ValueError(f"distance must be >= 0, got {d}")
    db = d + params.beta_offset
    return params.alpha_lumped / (db * db)


def received_power(params: ChargingParams, d: float) -> float:
    """Received power [W] at distance d [m]: p0 * mu inside the effective
    charging radius, exactly zero beyond it (d == d_max still charges)."""
    if d < 0:
        raise ValueError(f"distance must be >= 0, got {d}")
    if d > params.d_max:
        return 0.0
    return params.p0 * charging_efficiency(params, d)


def aav_motion_power(params: AavPowerParams, v: float) -> float:
    """Propulsion power [W] of the rotary-wing charger at speed v [m/s].

    Sum of blade profile power, induced power and parasite power:

        P_B (1 + 3 v^2 / v_tip^2)
        + P_I (sqrt(1 + v^4 / (4 v0^4)) - v^2 / (2 v0^2))^(1/2)
        + (1/2) d0 rho s A v^3

    At v = 0 this reduces exactly to P_B + P_I (hover).
    """
    if v < 0:
        raise ValueError(f"speed must be >= 0, got {v}")
    v2 = v * v
    blade = params.blade_power * (1.0 + 3.0 * v2 / (params.tip_speed * params.tip_speed))
    # v^4 / (4 v0^4) == ratio^2 with ratio = v^2 / (2 v0^2)
    ratio = v2 / (2.0 * params.induced_velocity * params.induced_velocity)
    induced = params.induced_power * math.sqrt(math.sqrt(1.0 + ratio * ratio) - ratio)
    parasite = (
        0.5
        * params.drag_coeff
        * params.air_density
        * params.rotor_solidity
        * params.rotor_area
        * v2
        * v
    )
    return blade + induced + parasite


def sv_motion_power(params: SvPowerParams, v: float) -> float:
    """Travel power [W] of the ground charger at speed v [m/s]."""
    if v < 0:
        raise ValueError(f"speed must be >= 0, got {v}")
    return params.k1 * v * v + params.k2 * v + params.k3
