"""Scripted non-learning controllers: random, stationary and greedy.

All controllers consume the shared observation vector and emit raw actions
in [0,1]^2 (the same interface a learned policy uses over the wire).
"""

from __future__ import annotations

import math

import numpy as np

from .world import WorldConfig

CONTROLLERS = ("random", "stationary", "greedy")

TWO_PI = 2.0 * math.pi


def random_policy(rng: np.random.Generator) -> tuple[float, float]:
    """Uniform raw action in [0,1]^2 from the caller's generator."""
    return float(rng.uniform()), float(rng.uniform())


def stationary_policy() -> tuple[float, float]:
    """Zero-displacement raw action."""
    return 0.0, 0.0


def greedy_policy(
    obs: np.ndarray,
    agent: str,
    x_max: float,
    y_max: float,
    d_move_max: float,
) -> tuple[float, float]:
    """Head toward the lowest-energy alive sensor in this agent's half of
    the field (sensors closer to this agent than to the other one); if that
    partition is empty, fall back to the global lowest-energy alive sensor.
    Stationary when no sensor is alive.
    """
    n = (len(obs) - 5) // 3
    triplets = np.asarray(obs[: 3 * n]).reshape(n, 3)
    xs = triplets[:, 0] * x_max
    ys = triplets[:, 1] * y_max
    q = triplets[:, 2]
    alive = q > 0.0
    if not alive.any():
        return 0.0, 0.0
    ax, ay = obs[3 * n] * x_max, obs[3 * n + 1] * y_max
    sx, sy = obs[3 * n + 3] * x_max, obs[3 * n + 4] * y_max
    if agent == "aav":
        mx, my, ox, oy = ax, ay, sx, sy
    elif agent == "sv":
        mx, my, ox, oy = sx, sy, ax, ay
    else:
        raise ValueError(f"unknown agent {agent!r}")
    d_mine = np.hypot(xs - mx, ys - my)
    d_other = np.hypot(xs - ox, ys - oy)
    candidates = alive & (d_mine < d_other)
    if not candidates.any():
        candidates = alive
    masked_q = np.where(candidates, q, np.inf)
    target = int(np.argmin(masked_q))
    dx = xs[target] - mx
    dy = ys[target] - my
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        return 0.0, 0.0
    theta = math.atan2(dy, dx) % TWO_PI
    d = min(d_move_max, dist)
    return theta / TWO_PI, d / d_move_max


def make_controller(kind: str, config: WorldConfig, seed: int):
    """Build an ``act(obs, agent) -> raw action`` callable for one episode."""
    if kind == "random":
        rng = np.random.default_rng([seed, 1])

        def act(obs, agent):
            return random_policy(rng)

    elif kind == "stationary":

        def act(obs, agent):
            return stationary_policy()

    elif kind == "greedy":

        def act(obs, agent):
            return greedy_policy(obs, agent, config.x_max, config.y_max, config.d_move_max)

    else:
        raise ValueError(f"unknown controller {kind!r} (expected one of {CONTROLLERS})")
    return act
