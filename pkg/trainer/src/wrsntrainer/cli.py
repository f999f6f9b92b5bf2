"""Trainer CLI: train against a simulator process, evaluate checkpoints."""

from __future__ import annotations

import argparse
import shlex
import sys
from pathlib import Path

import numpy as np
import yaml

from .config import TrainerConfig
from .envclient import EnvClient
from .trainer import Trainer, write_eval_csv

DEFAULT_ENV_CMD = "{python} -m wrsnsim serve --stdio --config {scenario}"


def read_scenario_meta(path) -> tuple[dict, float]:
    """Trainer-relevant bits of a scenario file: its `trainer` section and the
    slot charge duration (for watt->joule totals)."""
    doc = yaml.safe_load(Path(path).read_text()) or {}
    trainer_section = doc.get("trainer") or {}
    slot_duration = float((doc.get("scenario") or {}).get("slot_charge_duration", 1.0))
    return trainer_section, slot_duration


def build_env_client(args) -> tuple[EnvClient, float]:
    trainer_section, slot_duration = ({}, 1.0)
    if args.scenario:
        trainer_section, slot_duration = read_scenario_meta(args.scenario)
    if getattr(args, "tcp", None):
        host, _, port = args.tcp.partition(":")
        client = EnvClient.connect(host or "127.0.0.1", int(port))
    else:
        template = args.env_cmd or DEFAULT_ENV_CMD
        cmd = [
            part.format(python=sys.executable, scenario=args.scenario or "")
            for part in shlex.split(template)
        ]
        cmd = [part for part in cmd if part]
        if not args.scenario and "--config" in cmd:
            i = cmd.index("--config")
            del cmd[i : i + 2]
        client = EnvClient.spawn(cmd)
    return client, slot_duration, trainer_section


def _cmd_train(args) -> int:
    client, slot_duration, trainer_section = build_env_client(args)
    overrides = {}
    if args.trainer_config:
        overrides = yaml.safe_load(Path(args.trainer_config).read_text()) or {}
    flags = {}
    for key in ("episodes", "seed", "eval_every", "checkpoint_every"):
        value = getattr(args, key)
        if value is not None:
            flags[key] = value
    if args.no_attention:
        flags["no_attention"] = True
    if args.gaussian_policy:
        flags["gaussian_policy"] = True
    try:
        config = TrainerConfig.from_dicts(trainer_section, overrides, flags)
    except (ValueError, TypeError) as exc:
        print(f"trainer config error: {exc}", file=sys.stderr)
        client.close()
        return 2
    try:
        trainer = Trainer(client, config, slot_duration=slot_duration, out_dir=args.out)
        trainer.train()
        last = trainer.curves[-1]
        rewards = ", ".join(f"{name}={last[f'reward_{name}']:.3f}" for name in trainer.agents)
        print(
            f"trained {trainer.episodes_trained} episodes"
            f" | final episode rewards: {rewards}"
            f" | mortality {last['final_mortality']:.3f}"
            f" | clip events {trainer.clip_events}"
            f" | kl violations {trainer.kl_violations}"
        )
        if args.eval_episodes_final:
            results = trainer.evaluate(args.eval_episodes_final, config.eval_seed_base)
            write_eval_csv(Path(args.out) / "eval_final.csv", results, trainer.agents)
            mort = float(np.mean([ep.final_mortality for ep in results]))
            print(f"final eval mortality over {args.eval_episodes_final} seeds: {mort:.3f}")
    finally:
        client.close()
    return 0


def _cmd_eval(args) -> int:
    client, slot_duration, _ = build_env_client(args)
    try:
        trainer = Trainer.from_checkpoint(args.checkpoint, client, slot_duration=slot_duration)
        results = trainer.evaluate(
            args.episodes, args.seed_base, policy=args.policy, deterministic=args.deterministic
        )
        write_eval_csv(args.out, results, trainer.agents)
        mort = float(np.mean([ep.final_mortality for ep in results]))
        reward = {
            name: float(np.mean([ep.mean_reward[name] for ep in results]))
            for name in trainer.agents
        }
        print(f"eval[{args.policy}] mortality={mort:.3f} mean_reward={reward}")
    finally:
        client.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wrsntrainer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    train_p = sub.add_parser("train", help="train policies against a simulator process")
    train_p.add_argument("--scenario", default=None, help="scenario YAML handed to the simulator")
    train_p.add_argument("--out", required=True, help="output directory (curves, checkpoints)")
    train_p.add_argument("--trainer-config", default=None, help="YAML with TrainerConfig keys")
    train_p.add_argument("--episodes", type=int, default=None)
    train_p.add_argument("--seed", type=int, default=None)
    train_p.add_argument("--eval-every", type=int, default=None)
    train_p.add_argument("--checkpoint-every", type=int, default=None)
    train_p.add_argument("--eval-episodes-final", type=int, default=0,
                         help="run a final eval over this many paired seeds")
    train_p.add_argument("--no-attention", action="store_true", help="ablation: drop the attention block")
    train_p.add_argument("--gaussian-policy", action="store_true", help="ablation: clipped Gaussian policy")
    train_p.add_argument("--env-cmd", default=None,
                         help="environment command template ({python}, {scenario} substituted)")
    train_p.add_argument("--tcp", default=None, help="connect to HOST:PORT instead of spawning")
    train_p.set_defaults(func=_cmd_train)

    eval_p = sub.add_parser("eval", help="evaluate a checkpoint")
    eval_p.add_argument("--checkpoint", required=True)
    eval_p.add_argument("--scenario", default=None)
    eval_p.add_argument("--episodes", type=int, default=20)
    eval_p.add_argument("--seed-base", type=int, default=10_000)
    eval_p.add_argument("--policy", choices=("trained", "random"), default="trained")
    eval_p.add_argument("--deterministic", action="store_true",
                        help="use per-dimension mean actions instead of sampling")
    eval_p.add_argument("--out", required=True, help="eval report CSV path")
    eval_p.add_argument("--env-cmd", default=None)
    eval_p.add_argument("--tcp", default=None)
    eval_p.set_defaults(func=_cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
