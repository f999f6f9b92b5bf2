import numpy as np
import pytest
import torch

from wrsntrainer.gae import gae_advantages, normalize


def brute_force_gae(rewards, values, dones, gamma, lam):
    """Independent oracle: A_t = sum_k (gamma*lam)^k delta_{t+k}, the sum
    stopping at the first done at or after t."""
    T = len(rewards)
    deltas = []
    for t in range(T):
        next_v = 0.0 if (dones[t] or t == T - 1) else values[t + 1]
        deltas.append(rewards[t] + gamma * next_v - values[t])
    out = []
    for t in range(T):
        acc = 0.0
        power = 1.0
        for k in range(t, T):
            acc += power * deltas[k]
            if dones[k]:
                break
            power *= gamma * lam
        out.append(acc)
    return np.array(out)


def as_t(x, dtype=torch.float64):
    return torch.as_tensor(x, dtype=dtype)


class TestGae:
    def test_single_terminal_step(self):
        adv = gae_advantages(as_t([1.0]), as_t([0.5]), torch.tensor([True]), 0.96, 0.98)
        assert float(adv[0]) == pytest.approx(0.5, abs=1e-15)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(0)
        for trial in range(50):
            T = int(rng.integers(1, 40))
            rewards = rng.normal(size=T)
            values = rng.normal(size=T)
            dones = rng.uniform(size=T) < 0.15
            dones[-1] = bool(rng.uniform() < 0.7)  # truncation happens too
            gamma = float(rng.uniform(0.5, 0.999))
            lam = float(rng.uniform(0.5, 0.999))
            got = gae_advantages(as_t(rewards), as_t(values), torch.as_tensor(dones), gamma, lam)
            want = brute_force_gae(rewards, values, dones, gamma, lam)
            np.testing.assert_allclose(got.numpy(), want, atol=1e-10)

    def test_gamma_equals_lambda_case(self):
        rng = np.random.default_rng(7)
        T = 25
        rewards, values = rng.normal(size=T), rng.normal(size=T)
        dones = np.zeros(T, dtype=bool)
        got = gae_advantages(as_t(rewards), as_t(values), torch.as_tensor(dones), 0.9, 0.9)
        want = brute_force_gae(rewards, values, dones, 0.9, 0.9)
        np.testing.assert_allclose(got.numpy(), want, atol=1e-10)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            gae_advantages(as_t([1.0, 2.0]), as_t([0.0]), torch.tensor([False]), 0.9, 0.9)

    def test_truncation_bootstraps_zero(self):
        # non-done final step still treats the next value as 0
        adv = gae_advantages(as_t([1.0]), as_t([0.0]), torch.tensor([False]), 0.96, 0.98)
        assert float(adv[0]) == pytest.approx(1.0, abs=1e-15)


class TestNormalize:
    def test_zero_mean_unit_variance(self):
        rng = np.random.default_rng(3)
        adv = as_t(rng.normal(3.0, 10.0, size=500))
        normed = normalize(adv)
        assert abs(float(normed.mean())) < 1e-6
        assert abs(float(normed.std(unbiased=False)) - 1.0) < 1e-6

    def test_constant_input_does_not_blow_up(self):
        normed = normalize(as_t([2.0, 2.0, 2.0]))
        assert torch.isfinite(normed).all()
        assert float(normed.abs().max()) == 0.0
