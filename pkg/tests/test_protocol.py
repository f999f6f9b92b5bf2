import json
import math
import socket
import threading

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wrsnsim.protocol import (
    ProtocolError,
    Session,
    decode_action,
    encode_action,
    encode_observation,
    observation_dim,
    serve_tcp,
    spec_message,
)
from wrsnsim.world import WorldConfig, WorldState, reset

from conftest import small_config


class TestObservation:
    def test_default_dimension_is_305(self):
        assert observation_dim(WorldConfig()) == 305
        assert encode_observation(reset(WorldConfig(), 0)).shape == (305,)

    def test_sensor_triplet_normalization(self):
        config = small_config(n_sensors=1, x_max=100.0, y_max=100.0)
        world = reset(config, 0)
        world.xs[0], world.ys[0] = 50.0, 50.0
        world.energy[0] = 1.0
        obs = encode_observation(world)
        assert tuple(obs[:3]) == (0.5, 0.5, 0.5)

    def test_dead_sensor_energy_component_zero(self, tiny_config):
        world = reset(tiny_config, 0)
        world.alive[2] = False
        world.energy[2] = 1.5  # stale storage must not leak into the obs
        obs = encode_observation(world)
        assert obs[2 * 3 + 2] == 0.0

    def test_charger_block_layout(self):
        config = small_config(n_sensors=2, x_max=40.0, y_max=40.0)
        world = reset(config, 0)
        aav, sv = world.chargers["aav"], world.chargers["sv"]
        obs = encode_observation(world)
        n3 = 3 * config.n_sensors
        assert obs[n3] == aav.x / 40.0
        assert obs[n3 + 1] == aav.y / 40.0
        assert obs[n3 + 2] == aav.altitude / 40.0
        assert obs[n3 + 3] == sv.x / 40.0
        assert obs[n3 + 4] == sv.y / 40.0

    def test_observation_bounded_over_episode(self, tiny_config):
        world = reset(tiny_config, 8)
        rng = np.random.default_rng(8)
        while not world.done:
            obs = encode_observation(world)
            assert np.all(np.isfinite(obs))
            assert obs.min() >= 0.0 and obs.max() <= 1.0
            world.step(
                {
                    name: (float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(0, 10)))
                    for name in ("aav", "sv")
                }
            )


class TestDecodeAction:
    def test_zero_pair(self, tiny_config):
        assert decode_action((0.0, 0.0), tiny_config) == (0.0, 0.0)

    def test_linear_scaling(self, tiny_config):
        theta, d = decode_action((0.5, 1.0), tiny_config)
        assert theta == pytest.approx(math.pi, rel=1e-15)
        assert d == tiny_config.d_move_max

    @pytest.mark.parametrize("raw", [(1.1, 0.2), (-0.01, 0.5), (0.5, 2.0), (float("nan"), 0.1)])
    def test_out_of_range_rejected(self, raw, tiny_config):
        with pytest.raises(ProtocolError) as exc:
            decode_action(raw, tiny_config)
        assert exc.value.code == "bad_action"

    @given(
        st.floats(min_value=0.0, max_value=2.0 * math.pi),
        st.floats(min_value=0.0, max_value=10.0),
    )
    def test_round_trip(self, theta, d):
        config = WorldConfig()
        theta2, d2 = decode_action(encode_action(theta, d, config), config)
        assert abs(theta2 - theta) < 1e-12
        assert abs(d2 - d) < 1e-12


class TestSession:
    def make_session(self):
        return Session(small_config())

    def test_spec_contract(self):
        session = self.make_session()
        out = session.handle_line(json.dumps({"cmd": "spec"}))
        assert out == {
            "obs_dim": 3 * 12 + 5,
            "n_agents": 2,
            "agents": ["aav", "sv"],
            "action_dim": 2,
            "action_low": [0.0, 0.0],
            "action_high": [1.0, 1.0],
        }

    def test_reset_contract(self):
        session = self.make_session()
        out = session.handle_line('{"cmd":"reset","seed":7}')
        assert out["t"] == 0
        assert len(out["obs"]) == 41
        again = session.handle_line('{"cmd":"reset","seed":7}')
        assert again["obs"] == out["obs"]

    def test_step_contract(self):
        session = self.make_session()
        session.handle_line('{"cmd":"reset","seed":7}')
        out = session.handle_line(
            json.dumps({"cmd": "step", "actions": {"aav": [0.5, 0.1], "sv": [0.25, 0.0]}})
        )
        assert set(out) == {"obs", "rewards", "done", "t", "info"}
        assert set(out["rewards"]) == {"aav", "sv"}
        assert set(out["info"]) == {"f1", "f2", "f3", "alive", "battery"}
        assert out["done"] is False
        assert out["t"] == 1

    def test_step_before_reset(self):
        session = self.make_session()
        out = session.handle_line('{"cmd":"step","actions":{"aav":[0,0],"sv":[0,0]}}')
        assert out["code"] == "no_episode"

    def test_step_after_done(self):
        session = self.make_session()
        session.handle_line('{"cmd":"reset","seed":0}')
        line = '{"cmd":"step","actions":{"aav":[0,0],"sv":[0,0]}}'
        out = session.handle_line(line)
        while not out.get("done"):
            out = session.handle_line(line)
        out = session.handle_line(line)
        assert out["code"] == "episode_done"
        # the session recovers with a fresh reset
        assert session.handle_line('{"cmd":"reset","seed":1}')["t"] == 0

    def test_bad_action_reported_session_continues(self):
        session = self.make_session()
        session.handle_line('{"cmd":"reset","seed":0}')
        out = session.handle_line('{"cmd":"step","actions":{"aav":[2.0,0],"sv":[0,0]}}')
        assert out["code"] == "bad_action"
        ok = session.handle_line('{"cmd":"step","actions":{"aav":[0,0],"sv":[0,0]}}')
        assert "rewards" in ok

    def test_malformed_lines(self):
        session = self.make_session()
        for line in (b"not json", b"[1,2,3]", b"\xff\xfe\x00garbage", b'{"cmd":"warp"}'):
            out = session.handle_line(line)
            assert "error" in out and "code" in out

    def test_close(self):
        session = self.make_session()
        assert session.handle_line('{"cmd":"close"}') == {"ok": True}
        assert session.closed

    def test_fuzz_lines_never_crash(self):
        session = self.make_session()
        rng = np.random.default_rng(123)
        for _ in range(1000):
            n = int(rng.integers(0, 80))
            line = bytes(rng.integers(0, 256, n, dtype=np.uint8))
            out = session.handle_line(line)
            assert isinstance(out, dict)
            json.dumps(out)  # responses stay serializable
        assert "obs_dim" in session.handle_line('{"cmd":"spec"}')


class TestTcpServer:
    def test_round_trip_over_socket(self, tiny_config):
        ready = {}

        class Announce:
            def write(self, line):
                ready.update(json.loads(line))

            def flush(self):
                pass

        thread = threading.Thread(
            target=serve_tcp, args=(tiny_config,), kwargs={"port": 0, "announce": Announce()}, daemon=True
        )
        thread.start()
        for _ in range(100):
            if "port" in ready:
                break
            import time

            time.sleep(0.01)
        assert "port" in ready
        with socket.create_connection(("127.0.0.1", ready["port"]), timeout=5) as sock:
            fh = sock.makefile("rwb")
            fh.write(b'{"cmd":"spec"}\n')
            fh.flush()
            spec = json.loads(fh.readline())
            assert spec == spec_message(tiny_config)
            fh.write(b'{"cmd":"reset","seed":3}\n')
            fh.flush()
            assert json.loads(fh.readline())["t"] == 0
            fh.write(b'{"cmd":"step","actions":{"aav":[0.1,0.5],"sv":[0.9,0.5]}}\n')
            fh.flush()
            step = json.loads(fh.readline())
            assert "rewards" in step
            fh.write(b'{"cmd":"close"}\n')
            fh.flush()
            assert json.loads(fh.readline()) == {"ok": True}
