"""Generalized advantage estimation with zero bootstrap at episode ends."""

from __future__ import annotations

import torch


def gae_advantages(
    rewards: torch.Tensor,
    values: torch.Tensor,
    dones: torch.Tensor,
    gamma: float,
    lam: float,
) -> torch.Tensor:
    """Recursive GAE over one trajectory.

    rewards/values/dones are aligned length-T sequences; values[t] estimates
    V(s_t). The bootstrap value after step t is values[t+1], or 0 when
    dones[t] is set or t is the last step (episode truncation bootstraps 0 as
    well).
    """
    if not (rewards.shape == values.shape == dones.shape) or rewards.dim() != 1:
        raise ValueError(
            f"aligned 1-d sequences required, got {tuple(rewards.shape)}, "
            f"{tuple(values.shape)}, {tuple(dones.shape)}"
        )
    T = rewards.shape[0]
    advantages = torch.zeros_like(rewards)
    running = 0.0
    for t in range(T - 1, -1, -1):
        terminal = bool(dones[t]) or t == T - 1
        next_value = 0.0 if bool(dones[t]) else (0.0 if t == T - 1 else float(values[t + 1]))
        delta = float(rewards[t]) + gamma * next_value - float(values[t])
        running = delta if terminal else delta + gamma * lam * running
        advantages[t] = running
    return advantages


def normalize(advantages: torch.Tensor, eps: float = 1e-8) -> torch.Tensor:
    """Batch-normalize to zero mean, unit variance."""
    return (advantages - advantages.mean()) / (advantages.std(unbiased=False) + eps)
