"""Client for the simulator's newline-delimited JSON protocol.

The environment is an external process: either spawned over stdio or reached
via TCP. This module is the only place the trainer touches the simulator.
"""

from __future__ import annotations

import json
import socket
import subprocess
from dataclasses import dataclass

import numpy as np


class EnvError(RuntimeError):
    """Error response from the environment (or a dead transport)."""

    def __init__(self, code: str, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code


@dataclass
class StepResult:
    obs: np.ndarray
    rewards: dict[str, float]
    done: bool
    t: int
    info: dict


class EnvClient:
    """One protocol session over a pair of line-oriented streams."""

    def __init__(self, reader, writer, proc: subprocess.Popen | None = None, sock=None):
        self._reader = reader
        self._writer = writer
        self._proc = proc
        self._sock = sock
        self._spec = None

    @classmethod
    def spawn(cls, cmd: list[str]) -> "EnvClient":
        proc = subprocess.Popen(cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE)
        return cls(proc.stdout, proc.stdin, proc=proc)

    @classmethod
    def connect(cls, host: str, port: int, timeout: float = 10.0) -> "EnvClient":
        sock = socket.create_connection((host, port), timeout=timeout)
        fh = sock.makefile("rwb")
        return cls(fh, fh, sock=sock)

    def _request(self, payload: dict) -> dict:
        self._writer.write(json.dumps(payload).encode() + b"\n")
        self._writer.flush()
        line = self._reader.readline()
        if not line:
            raise EnvError("transport", "environment closed the stream")
        response = json.loads(line)
        if "error" in response:
            raise EnvError(response.get("code", "unknown"), response["error"])
        return response

    def spec(self) -> dict:
        if self._spec is None:
            self._spec = self._request({"cmd": "spec"})
        return self._spec

    def reset(self, seed: int) -> np.ndarray:
        response = self._request({"cmd": "reset", "seed": int(seed)})
        return np.asarray(response["obs"], dtype=np.float64)

    def step(self, actions: dict[str, tuple[float, float]]) -> StepResult:
        payload = {"cmd": "step", "actions": {k: [float(v[0]), float(v[1])] for k, v in actions.items()}}
        response = self._request(payload)
        return StepResult(
            obs=np.asarray(response["obs"], dtype=np.float64),
            rewards=response["rewards"],
            done=response["done"],
            t=response["t"],
            info=response["info"],
        )

    def close(self) -> None:
        try:
            self._request({"cmd": "close"})
        except (EnvError, BrokenPipeError, OSError):
            pass
        if self._sock is not None:
            self._sock.close()
        if self._proc is not None:
            self._proc.stdin.close()
            try:
                self._proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
