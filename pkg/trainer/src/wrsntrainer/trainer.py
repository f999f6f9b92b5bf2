"""Training loop: collect one episode per iteration, then per agent compute
GAE, fit the critic, and take one trust-region policy step (agents updated
sequentially in a fixed order).

Outputs: a per-episode learning-curve CSV, periodic checkpoints, and eval
reports whose CSV schema mirrors the simulator CLI's metrics files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .config import TrainerConfig
from .envclient import EnvClient
from .gae import gae_advantages, normalize
from .nets import Actor, Critic
from .trpo import trpo_update

CHECKPOINT_FORMAT = "wrsntrainer-checkpoint"
CHECKPOINT_VERSION = 1

# mirrors the simulator CLI's metrics CSV (an external interface, not an import)
EVAL_COLUMNS = (
    "episode",
    "agent",
    "slots",
    "final_mortality",
    "mean_reward",
    "total_f1_joules",
    "total_distance_m",
    "battery_remaining_j",
)


def fmt(x) -> str:
    return format(float(x), ".9g")


@dataclass
class EpisodeBuffer:
    obs: list
    actions: list
    rewards: list
    dones: list
    log_probs: list

    @classmethod
    def empty(cls):
        return cls([], [], [], [], [])

    def add(self, obs, action, reward, done, log_prob):
        self.obs.append(obs)
        self.actions.append(action)
        self.rewards.append(reward)
        self.dones.append(done)
        self.log_probs.append(log_prob)

    def __len__(self):
        return len(self.rewards)


@dataclass
class EvalEpisode:
    episode: int
    seed: int
    slots: int
    final_mortality: float
    mean_reward: dict[str, float]
    total_f1_joules: dict[str, float]
    total_distance: dict[str, float]
    battery: dict[str, float]


CURVE_BASE_COLUMNS = ("episode", "slots", "final_mortality", "clip_events")
CURVE_AGENT_COLUMNS = ("reward", "f1_total", "f2_total", "kl", "improve", "accepted", "critic_loss")


class Trainer:
    """Owns the per-agent actor-critic pairs and the update schedule."""

    def __init__(self, client: EnvClient, config: TrainerConfig, slot_duration: float = 1.0,
                 out_dir=None):
        self.client = client
        self.config = config
        self.slot_duration = slot_duration
        self.out_dir = Path(out_dir) if out_dir is not None else None
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        torch.set_num_threads(1)
        torch.manual_seed(config.seed)
        spec = client.spec()
        self.agents = list(spec["agents"])
        self.obs_dim = spec["obs_dim"]
        self.n_sensors = (self.obs_dim - 5) // 3
        self.dtype = torch.float64 if config.dtype == "float64" else torch.float32
        policy = "gaussian" if config.gaussian_policy else "beta"
        use_attention = not config.no_attention
        self.actors = {}
        self.critics = {}
        self.critic_opts = {}
        for name in self.agents:
            actor = Actor(
                self.n_sensors,
                action_dim=spec["action_dim"],
                embed_dim=config.embed_dim,
                hidden_dim=config.hidden_dim,
                use_attention=use_attention,
                policy=policy,
            ).to(self.dtype)
            critic = Critic(
                self.n_sensors,
                embed_dim=config.embed_dim,
                hidden_dim=config.hidden_dim,
                use_attention=use_attention,
            ).to(self.dtype)
            self.actors[name] = actor
            self.critics[name] = critic
            self.critic_opts[name] = torch.optim.Adam(critic.parameters(), lr=config.critic_lr)
        self.clip_events = 0
        self.kl_violations = 0
        self.episodes_trained = 0
        self.curves: list[dict] = []

    # ------------------------------------------------------------------ rollouts

    def _obs_tensor(self, obs: np.ndarray) -> torch.Tensor:
        return torch.as_tensor(obs, dtype=self.dtype).unsqueeze(0)

    def collect_episode(self, env_seed: int):
        """Roll out one episode with stochastic actions; returns per-agent
        buffers plus the episode's objective totals."""
        obs = self.client.reset(env_seed)
        buffers = {name: EpisodeBuffer.empty() for name in self.agents}
        totals = {
            "reward": {name: 0.0 for name in self.agents},
            "f1": {name: 0.0 for name in self.agents},
            "f2": {name: 0.0 for name in self.agents},
        }
        final_info = None
        done = False
        while not done:
            obs_t = self._obs_tensor(obs)
            actions = {}
            records = {}
            for name in self.agents:
                actor = self.actors[name]
                with torch.no_grad():
                    params = actor.dist_params(obs_t)
                    u, clipped = actor.sample(params)
                    log_prob = float(actor.log_prob(params, u)[0])
                self.clip_events += clipped
                actions[name] = (float(u[0, 0]), float(u[0, 1]))
                records[name] = (u[0].numpy(), log_prob)
            result = self.client.step(actions)
            done = result.done
            for name in self.agents:
                u_np, log_prob = records[name]
                buffers[name].add(obs, u_np, result.rewards[name], done, log_prob)
                totals["reward"][name] += result.rewards[name]
                totals["f1"][name] += result.info["f1"][name] * self.slot_duration
                totals["f2"][name] += result.info["f2"][name]
            obs = result.obs
            final_info = result.info
        stats = {
            "slots": len(buffers[self.agents[0]]),
            "final_mortality": final_info["f3"],
            "battery": dict(final_info["battery"]),
            **totals,
        }
        return buffers, stats

    # ------------------------------------------------------------------ updates

    def update_agent(self, name: str, buf: EpisodeBuffer, adv_multiplier=None):
        cfg = self.config
        obs = torch.as_tensor(np.asarray(buf.obs), dtype=self.dtype)
        actions = torch.as_tensor(np.asarray(buf.actions), dtype=self.dtype)
        rewards = torch.as_tensor(buf.rewards, dtype=self.dtype)
        dones = torch.as_tensor(buf.dones, dtype=torch.bool)
        behavior_log_probs = torch.as_tensor(buf.log_probs, dtype=self.dtype)

        critic = self.critics[name]
        with torch.no_grad():
            values = critic(obs)
        raw_adv = gae_advantages(rewards, values, dones, cfg.gamma, cfg.gae_lambda)
        returns = raw_adv + values
        if adv_multiplier is not None:
            raw_adv = raw_adv * adv_multiplier
        advantages = normalize(raw_adv)

        opt = self.critic_opts[name]
        critic_loss = 0.0
        for _ in range(cfg.critic_epochs):
            opt.zero_grad()
            loss = torch.nn.functional.mse_loss(critic(obs), returns)
            loss.backward()
            opt.step()
            critic_loss = float(loss.detach())

        actor = self.actors[name]
        result = trpo_update(
            actor,
            obs,
            actions,
            behavior_log_probs,
            advantages,
            kl_threshold=cfg.kl_threshold,
            entropy_coef=cfg.entropy_coef,
            cg_iters=cfg.cg_iters,
            cg_damping=cfg.cg_damping,
            backtrack_coef=cfg.backtrack_coef,
            max_backtracks=cfg.max_backtracks,
        )
        if result.accepted and result.kl > cfg.kl_threshold:
            self.kl_violations += 1
        ratio = None
        if cfg.compound_ratios:
            with torch.no_grad():
                new_log_probs = actor.log_prob(actor.dist_params(obs), actions)
                ratio = torch.exp(new_log_probs - behavior_log_probs)
        return result, critic_loss, ratio

    def train_episode(self, env_seed: int) -> dict:
        """One Algorithm-iteration: rollout, then sequential per-agent updates."""
        buffers, stats = self.collect_episode(env_seed)
        multiplier = None
        row = {
            "episode": self.episodes_trained,
            "slots": stats["slots"],
            "final_mortality": stats["final_mortality"],
            "clip_events": self.clip_events,
        }
        for name in self.agents:
            result, critic_loss, ratio = self.update_agent(name, buffers[name], multiplier)
            if self.config.compound_ratios and ratio is not None:
                multiplier = ratio if multiplier is None else multiplier * ratio
            row[f"reward_{name}"] = stats["reward"][name]
            row[f"f1_total_{name}"] = stats["f1"][name]
            row[f"f2_total_{name}"] = stats["f2"][name]
            row[f"kl_{name}"] = result.kl
            row[f"improve_{name}"] = result.improvement
            row[f"accepted_{name}"] = int(result.accepted)
            row[f"critic_loss_{name}"] = critic_loss
        self.episodes_trained += 1
        self.curves.append(row)
        return row

    def train(self) -> list[dict]:
        """Run the configured number of episodes; writes curves/checkpoints."""
        cfg = self.config
        curve_file = writer = None
        if self.out_dir is not None:
            curve_file = open(self.out_dir / "curves.csv", "w", newline="")
            writer = csv.writer(curve_file)
            writer.writerow(self.curve_columns())
        try:
            for episode in range(cfg.episodes):
                row = self.train_episode(cfg.env_seed_base + episode)
                if writer is not None:
                    writer.writerow(self.curve_row_values(row))
                    curve_file.flush()
                if cfg.checkpoint_every and (episode + 1) % cfg.checkpoint_every == 0:
                    self.save_checkpoint(self.out_dir / f"checkpoint_{episode + 1:05d}.pt")
                if cfg.eval_every and (episode + 1) % cfg.eval_every == 0:
                    results = self.evaluate(cfg.eval_episodes, cfg.eval_seed_base)
                    write_eval_csv(self.out_dir / f"eval_{episode + 1:05d}.csv", results, self.agents)
        finally:
            if curve_file is not None:
                curve_file.close()
        if self.out_dir is not None:
            self.save_checkpoint(self.out_dir / "checkpoint_final.pt")
        return self.curves

    def curve_columns(self):
        cols = list(CURVE_BASE_COLUMNS)
        for name in self.agents:
            cols.extend(f"{c}_{name}" for c in CURVE_AGENT_COLUMNS)
        return cols

    def curve_row_values(self, row: dict):
        return [row[c] if isinstance(row[c], int) else fmt(row[c]) for c in self.curve_columns()]

    # ------------------------------------------------------------------ evaluation

    def evaluate(self, episodes: int, seed_base: int, policy: str = "trained",
                 deterministic: bool = False) -> list[EvalEpisode]:
        """Stochastic (default), mean-action, or random rollouts on paired env
        seeds. Heading is an angle, so the honest evaluation samples the
        trained policy; the torch RNG state is saved, reseeded per episode and
        restored, keeping evals reproducible and training unaffected."""
        rng_state = torch.random.get_rng_state()
        try:
            return self._evaluate(episodes, seed_base, policy, deterministic)
        finally:
            torch.random.set_rng_state(rng_state)

    def _evaluate(self, episodes, seed_base, policy, deterministic) -> list[EvalEpisode]:
        out = []
        for e in range(episodes):
            seed = seed_base + e
            torch.manual_seed(seed)
            obs = self.client.reset(seed)
            rng = np.random.default_rng([seed, 2])
            reward_sum = {name: 0.0 for name in self.agents}
            f1 = {name: 0.0 for name in self.agents}
            f2 = {name: 0.0 for name in self.agents}
            done = False
            info = None
            slots = 0
            while not done:
                actions = {}
                for name in self.agents:
                    if policy == "random":
                        actions[name] = (float(rng.uniform()), float(rng.uniform()))
                    else:
                        actor = self.actors[name]
                        with torch.no_grad():
                            params = actor.dist_params(self._obs_tensor(obs))
                            if deterministic:
                                u = actor.mean_action(params)
                            else:
                                u, _ = actor.sample(params)
                        actions[name] = (float(u[0, 0]), float(u[0, 1]))
                result = self.client.step(actions)
                done = result.done
                slots += 1
                for name in self.agents:
                    reward_sum[name] += result.rewards[name]
                    f1[name] += result.info["f1"][name] * self.slot_duration
                    f2[name] += result.info["f2"][name]
                obs = result.obs
                info = result.info
            out.append(
                EvalEpisode(
                    episode=e,
                    seed=seed,
                    slots=slots,
                    final_mortality=info["f3"],
                    mean_reward={n: reward_sum[n] / slots for n in self.agents},
                    total_f1_joules=dict(f1),
                    total_distance=dict(f2),
                    battery=dict(info["battery"]),
                )
            )
        return out

    # ------------------------------------------------------------------ checkpoints

    def save_checkpoint(self, path) -> None:
        torch.save(
            {
                "format": CHECKPOINT_FORMAT,
                "version": CHECKPOINT_VERSION,
                "trainer_config": self.config.to_dict(),
                "obs_dim": self.obs_dim,
                "agents": list(self.agents),
                "episodes_trained": self.episodes_trained,
                "clip_events": self.clip_events,
                "kl_violations": self.kl_violations,
                "state": {
                    name: {
                        "actor": self.actors[name].state_dict(),
                        "critic": self.critics[name].state_dict(),
                    }
                    for name in self.agents
                },
            },
            path,
        )

    @classmethod
    def from_checkpoint(cls, path, client: EnvClient, slot_duration: float = 1.0,
                        out_dir=None) -> "Trainer":
        payload = torch.load(path, weights_only=False)
        if payload.get("format") != CHECKPOINT_FORMAT:
            raise ValueError(f"{path} is not a trainer checkpoint")
        if payload.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {payload.get('version')}")
        config = TrainerConfig(**payload["trainer_config"])
        trainer = cls(client, config, slot_duration=slot_duration, out_dir=out_dir)
        if trainer.obs_dim != payload["obs_dim"]:
            raise ValueError(
                f"checkpoint was trained with obs_dim={payload['obs_dim']}, "
                f"environment reports {trainer.obs_dim}"
            )
        for name in trainer.agents:
            trainer.actors[name].load_state_dict(payload["state"][name]["actor"])
            trainer.critics[name].load_state_dict(payload["state"][name]["critic"])
        trainer.episodes_trained = payload["episodes_trained"]
        trainer.clip_events = payload["clip_events"]
        trainer.kl_violations = payload["kl_violations"]
        return trainer


def write_eval_csv(path, results: list[EvalEpisode], agents) -> None:
    """Eval report in the simulator metrics schema plus mean/std rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVAL_COLUMNS)
        for ep in results:
            for agent in agents:
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
        for stat, fn in (("mean", np.mean), ("std", np.std)):
            for agent in agents:
                writer.writerow(
                    [
                        stat,
                        agent,
                        fmt(fn([ep.slots for ep in results])),
                        fmt(fn([ep.final_mortality for ep in results])),
                        fmt(fn([ep.mean_reward[agent] for ep in results])),
                        fmt(fn([ep.total_f1_joules[agent] for ep in results])),
                        fmt(fn([ep.total_distance[agent] for ep in results])),
                        fmt(fn([ep.battery[agent] for ep in results])),
                    ]
                )
