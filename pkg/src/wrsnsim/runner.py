"""Seeded episode driver plus CSV reporting.

Episode e of a run uses seed S+e for both the world and the controller, so
paired-seed comparisons across policies and byte-identical reruns come for
free. CSV numbers are written with 9 significant digits to keep golden files
stable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .baselines import make_controller
from .protocol import decode_action, encode_observation
from .world import AGENTS, WorldConfig, WorldState


def fmt(x) -> str:
    """Canonical CSV number formatting: 9 significant digits."""
    return format(float(x), ".9g")


@dataclass(frozen=True)
class EpisodeResult:
    episode: int
    seed: int
    slots: int
    final_mortality: float
    mean_reward: dict[str, float]
    total_f1_joules: dict[str, float]
    total_distance: dict[str, float]
    battery: dict[str, float]


@dataclass(frozen=True)
class RunReport:
    config: WorldConfig
    policy: str
    episodes: list[EpisodeResult]

    def agent_column(self, agent: str, field: str) -> np.ndarray:
        values = [getattr(ep, field)[agent] for ep in self.episodes]
        return np.asarray(values, dtype=float)

    def aggregate(self) -> dict[str, dict[str, tuple[float, float]]]:
        """Per-agent (mean, population std) of every numeric column."""
        out = {}
        mortality = np.asarray([ep.final_mortality for ep in self.episodes], dtype=float)
        slots = np.asarray([ep.slots for ep in self.episodes], dtype=float)
        for agent in AGENTS:
            cols = {
                "slots": slots,
                "final_mortality": mortality,
                "mean_reward": self.agent_column(agent, "mean_reward"),
                "total_f1_joules": self.agent_column(agent, "total_f1_joules"),
                "total_distance": self.agent_column(agent, "total_distance"),
                "battery": self.agent_column(agent, "battery"),
            }
            out[agent] = {k: (float(v.mean()), float(v.std())) for k, v in cols.items()}
        return out


TRAJECTORY_COLUMNS = ("episode", "t", "entity_id", "kind", "x", "y", "z", "energy_or_battery", "alive")

METRICS_COLUMNS = (
    "episode",
    "agent",
    "slots",
    "final_mortality",
    "mean_reward",
    "total_f1_joules",
    "total_distance_m",
    "battery_remaining_j",
)


def _write_trajectory_rows(writer, episode: int, state: WorldState):
    for i in range(state.config.n_sensors):
        writer.writerow(
            [
                episode,
                state.t,
                i,
                "sensor",
                fmt(state.xs[i]),
                fmt(state.ys[i]),
                fmt(0.0),
                fmt(state.energy[i]),
                int(state.alive[i]),
            ]
        )
    for name in AGENTS:
        ch = state.chargers[name]
        writer.writerow(
            [
                episode,
                state.t,
                0,
                name,
                fmt(ch.x),
                fmt(ch.y),
                fmt(ch.altitude),
                fmt(ch.battery),
                int(ch.powered),
            ]
        )


def run_episodes(
    config: WorldConfig,
    policy: str,
    episodes: int,
    seed: int,
    metrics_path=None,
    traj_path=None,
) -> RunReport:
    """Run seeded episodes under a scripted controller; write CSVs if asked."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    results = []
    traj_file = open(traj_path, "w", newline="") if traj_path else None
    try:
        traj_writer = None
        if traj_file:
            traj_writer = csv.writer(traj_file)
            traj_writer.writerow(TRAJECTORY_COLUMNS)
        for e in range(episodes):
            ep_seed = seed + e
            world = WorldState(config, ep_seed)
            act = make_controller(policy, config, ep_seed)
            if traj_writer:
                _write_trajectory_rows(traj_writer, e, world)
            reward_sum = {name: 0.0 for name in AGENTS}
            f1_joules = {name: 0.0 for name in AGENTS}
            distance = {name: 0.0 for name in AGENTS}
            while not world.done:
                obs = encode_observation(world)
                actions = {name: decode_action(act(obs, name), config) for name in AGENTS}
                metrics = world.step(actions)
                for name in AGENTS:
                    reward_sum[name] += metrics.rewards[name]
                    f1_joules[name] += metrics.f1_per_agent[name] * config.slot_charge_duration
                    distance[name] += metrics.f2_per_agent[name]
                if traj_writer:
                    _write_trajectory_rows(traj_writer, e, world)
            slots = world.t
            results.append(
                EpisodeResult(
                    episode=e,
                    seed=ep_seed,
                    slots=slots,
                    final_mortality=world.mortality(),
                    mean_reward={n: reward_sum[n] / slots for n in AGENTS},
                    total_f1_joules=dict(f1_joules),
                    total_distance=dict(distance),
                    battery={n: world.chargers[n].battery for n in AGENTS},
                )
            )
    finally:
        if traj_file:
            traj_file.close()
    report = RunReport(config=config, policy=policy, episodes=results)
    if metrics_path:
        write_metrics_csv(report, metrics_path)
    return report


def write_metrics_csv(report: RunReport, path):
    """One row per episode per agent, then mean/std aggregate rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_COLUMNS)
        for ep in report.episodes:
            for agent in AGENTS:
                writer.writerow(
                    [
                        ep.episode,
                        agent,
                        ep.slots,
                        fmt(ep.final_mortality),
                        fmt(ep.mean_reward[agent]),
                        fmt(ep.total_f1_joules[agent]),
                        fmt(ep.total_distance[agent]),
                        fmt(ep.battery[agent]),
                    ]
                )
        agg = report.aggregate()
        for stat, idx in (("mean", 0), ("std", 1)):
            for agent in AGENTS:
                a = agg[agent]
                writer.writerow(
                    [
                        stat,
                        agent,
                        fmt(a["slots"][idx]),
                        fmt(a["final_mortality"][idx]),
                        fmt(a["mean_reward"][idx]),
                        fmt(a["total_f1_joules"][idx]),
                        fmt(a["total_distance"][idx]),
                        fmt(a["battery"][idx]),
                    ]
                )


def summary_lines(report: RunReport) -> list[str]:
    agg = report.aggregate()
    lines = [
        f"policy={report.policy} episodes={len(report.episodes)}",
        f"final mortality: mean={fmt(agg['aav']['final_mortality'][0])}"
        f" std={fmt(agg['aav']['final_mortality'][1])}",
    ]
    for agent in AGENTS:
        a = agg[agent]
        lines.append(
            f"{agent}: reward/slot={fmt(a['mean_reward'][0])}"
            f" delivered={fmt(a['total_f1_joules'][0])} J"
            f" travelled={fmt(a['total_distance'][0])} m"
            f" battery={fmt(a['battery'][0])} J"
        )
    return lines
