"""Wire protocol: shared observation encoding, raw-action decoding and a
newline-delimited JSON request/response server (stdio or TCP).

Verbs: spec, reset(seed), step(actions), close. One JSON object per line in
each direction; malformed input yields an {"error", "code"} response and the
session keeps running. Each session owns exactly one episode at a time.
"""

from __future__ import annotations

import json
import math
import socketserver
import sys

import numpy as np

from .world import AGENTS, ActionRangeError, EpisodeDoneError, WorldConfig, WorldState

TWO_PI = 2.0 * math.pi


class ProtocolError(Exception):
    """Protocol-level failure carrying a machine-readable code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def observation_dim(config: WorldConfig) -> int:
    return 3 * config.n_sensors + 5


def encode_observation(state: WorldState) -> np.ndarray:
    """Flatten the shared global state into a [0,1]-normalized vector.

    Layout: n_sensors triplets (x/x_max, y/y_max, q/e_max) with q=0 for dead
    nodes, then the aerial charger triple (x/x_max, y/y_max, h/x_max), then
    the ground charger pair (x/x_max, y/y_max).
    """
    cfg = state.config
    n = cfg.n_sensors
    obs = np.empty(3 * n + 5)
    triplets = obs[: 3 * n].reshape(n, 3)
    triplets[:, 0] = state.xs / cfg.x_max
    triplets[:, 1] = state.ys / cfg.y_max
    triplets[:, 2] = np.where(state.alive, state.energy, 0.0) / cfg.e_max
    aav = state.chargers["aav"]
    sv = state.chargers["sv"]
    obs[3 * n : 3 * n + 3] = (aav.x / cfg.x_max, aav.y / cfg.y_max, aav.altitude / cfg.x_max)
    obs[3 * n + 3 :] = (sv.x / cfg.x_max, sv.y / cfg.y_max)
    return obs


def decode_action(raw: tuple[float, float], config: WorldConfig) -> tuple[float, float]:
    """Scale a raw [0,1]^2 pair to (heading [rad], travel distance [m])."""
    u_theta, u_d = raw
    for name, u in (("u_theta", u_theta), ("u_d", u_d)):
        if not isinstance(u, (int, float)) or isinstance(u, bool) or not math.isfinite(u):
            raise ProtocolError("bad_action", f"{name} must be a finite number, got {u!r}")
        if not (0.0 <= u <= 1.0):
            raise ProtocolError("bad_action", f"{name}={u} outside [0, 1]")
    return TWO_PI * u_theta, config.d_move_max * u_d


def encode_action(theta: float, d: float, config: WorldConfig) -> tuple[float, float]:
    """Inverse of decode_action for in-range (heading, distance) pairs."""
    return theta / TWO_PI, d / config.d_move_max


def spec_message(config: WorldConfig) -> dict:
    return {
        "obs_dim": observation_dim(config),
        "n_agents": len(AGENTS),
        "agents": list(AGENTS),
        "action_dim": 2,
        "action_low": [0.0, 0.0],
        "action_high": [1.0, 1.0],
    }


class Session:
    """One sequential request/response session owning one WorldState."""

    def __init__(self, config: WorldConfig):
        self.config = config
        self.world: WorldState | None = None
        self.closed = False

    def handle_line(self, line: bytes | str) -> dict:
        """Parse one request line and produce the response object.

        Never raises on bad input: every failure becomes an error response
        and the session stays usable.
        """
        if isinstance(line, bytes):
            line = line.decode("utf-8", errors="replace")
        try:
            msg = json.loads(line)
        except (json.JSONDecodeError, UnicodeDecodeError, RecursionError) as exc:
            return {"error": f"malformed message: {exc}", "code": "parse_error"}
        if not isinstance(msg, dict):
            return {"error": "message must be a JSON object", "code": "parse_error"}
        try:
            return self._dispatch(msg)
        except ProtocolError as exc:
            return {"error": str(exc), "code": exc.code}
        except Exception as exc:  # defensive: a session must never die
            return {"error": f"internal error: {exc}", "code": "internal"}

    def _dispatch(self, msg: dict) -> dict:
        cmd = msg.get("cmd")
        if cmd == "spec":
            return spec_message(self.config)
        if cmd == "reset":
            seed = msg.get("seed", self.config.seed)
            if not isinstance(seed, int) or isinstance(seed, bool):
                raise ProtocolError("bad_request", f"seed must be an integer, got {seed!r}")
            self.world = WorldState(self.config, seed)
            return {"obs": encode_observation(self.world).tolist(), "t": 0}
        if cmd == "step":
            return self._step(msg)
        if cmd == "close":
            self.closed = True
            return {"ok": True}
        raise ProtocolError("unknown_command", f"unknown cmd {cmd!r}")

    def _step(self, msg: dict) -> dict:
        if self.world is None:
            raise ProtocolError("no_episode", "step before reset")
        if self.world.done:
            raise ProtocolError("episode_done", "episode finished; send reset")
        actions_raw = msg.get("actions")
        if not isinstance(actions_raw, dict):
            raise ProtocolError("bad_request", "step needs an 'actions' object")
        decoded = {}
        for name in AGENTS:
            pair = actions_raw.get(name)
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ProtocolError(
                    "bad_action", f"actions[{name!r}] must be a [u_theta, u_d] pair"
                )
            decoded[name] = decode_action((pair[0], pair[1]), self.config)
        try:
            metrics = self.world.step(decoded)
        except EpisodeDoneError as exc:
            raise ProtocolError("episode_done", str(exc))
        except ActionRangeError as exc:
            raise ProtocolError("bad_action", str(exc))
        return {
            "obs": encode_observation(self.world).tolist(),
            "rewards": metrics.rewards,
            "done": self.world.done,
            "t": metrics.t,
            "info": {
                "f1": metrics.f1_per_agent,
                "f2": metrics.f2_per_agent,
                "f3": metrics.f3,
                "alive": metrics.alive_count,
                "battery": metrics.battery,
            },
        }


def serve_stdio(config: WorldConfig, stdin=None, stdout=None) -> None:
    """Serve one session over standard streams until EOF or close."""
    stdin = stdin if stdin is not None else sys.stdin.buffer
    stdout = stdout if stdout is not None else sys.stdout.buffer
    session = Session(config)
    for line in stdin:
        if not line.strip():
            continue
        response = session.handle_line(line)
        stdout.write(json.dumps(response).encode() + b"\n")
        stdout.flush()
        if session.closed:
            break


def serve_tcp(config: WorldConfig, host: str = "127.0.0.1", port: int = 0, announce=None):
    """Serve one independent session per TCP connection.

    Binds (host, port) — port 0 picks an ephemeral port — announces the bound
    address as a JSON line, then serves until interrupted.
    """

    class Handler(socketserver.StreamRequestHandler):
        def handle(self):
            session = Session(config)
            for line in self.rfile:
                if not line.strip():
                    continue
                response = session.handle_line(line)
                try:
                    self.wfile.write(json.dumps(response).encode() + b"\n")
                except BrokenPipeError:
                    return
                if session.closed:
                    return

    class Server(socketserver.ThreadingTCPServer):
        allow_reuse_address = True
        daemon_threads = True

    server = Server((host, port), Handler)
    bound_host, bound_port = server.server_address[:2]
    announce = announce if announce is not None else sys.stdout
    announce.write(json.dumps({"event": "listening", "host": bound_host, "port": bound_port}) + "\n")
    announce.flush()
    try:
        server.serve_forever()
    finally:
        server.server_close()
