"""Command-line entry point: run scripted episodes, serve the wire protocol,
or validate a scenario config."""

from __future__ import annotations

import argparse
import sys

import yaml

from .baselines import CONTROLLERS
from .config import ConfigError, apply_env_overrides, build_world_config, config_to_dict, read_config_dict
from .protocol import serve_stdio, serve_tcp
from .runner import run_episodes, summary_lines


def _load_or_exit(path):
    from .config import load_config

    try:
        return load_config(path)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        raise SystemExit(2)
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _cmd_run(args) -> int:
    config = _load_or_exit(args.config)
    report = run_episodes(
        config,
        policy=args.policy,
        episodes=args.episodes,
        seed=args.seed,
        metrics_path=args.metrics_out,
        traj_path=args.traj_out,
    )
    for line in summary_lines(report):
        print(line)
    return 0


def _cmd_serve(args) -> int:
    config = _load_or_exit(args.config)
    if args.stdio:
        serve_stdio(config)
    else:
        try:
            serve_tcp(config, port=args.port)
        except KeyboardInterrupt:
            pass
    return 0


def _cmd_validate(args) -> int:
    try:
        doc = read_config_dict(args.config)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    applied = apply_env_overrides(doc)
    for key, value in applied:
        print(f"override {key} = {value!r}", file=sys.stderr)
    config, errors, warnings = build_world_config(doc)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if errors:
        for err in errors:
            print(f"config error: {err}", file=sys.stderr)
        return 2
    resolved = config_to_dict(config)
    if isinstance(doc.get("trainer"), dict) and doc["trainer"]:
        resolved["trainer"] = doc["trainer"]
    print(yaml.safe_dump(resolved, sort_keys=False), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wrsnsim",
        description="Wireless rechargeable sensor network simulator with two mobile chargers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run seeded episodes under a scripted controller")
    run_p.add_argument("--config", default=None, help="scenario config file (defaults when omitted)")
    run_p.add_argument("--policy", default="random", choices=CONTROLLERS)
    run_p.add_argument("--episodes", type=int, default=1)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--metrics-out", default=None, help="write per-episode metrics CSV here")
    run_p.add_argument("--traj-out", default=None, help="write per-slot trajectory CSV here")
    run_p.set_defaults(func=_cmd_run)

    serve_p = sub.add_parser("serve", help="serve the newline-delimited JSON environment protocol")
    serve_p.add_argument("--config", default=None)
    transport = serve_p.add_mutually_exclusive_group(required=True)
    transport.add_argument("--stdio", action="store_true", help="one session over stdin/stdout")
    transport.add_argument("--port", type=int, help="TCP listener (0 = ephemeral, prints the port)")
    serve_p.set_defaults(func=_cmd_serve)

    validate_p = sub.add_parser("validate", help="check a config and print the resolved document")
    validate_p.add_argument("--config", required=True)
    validate_p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:  # config loader already printed its message
        return exc.code if isinstance(exc.code, int) else 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
