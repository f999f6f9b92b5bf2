"""Actor-critic networks: entity-token encoder with one self-attention
block, mean pooling, a two-layer MLP trunk, and Beta (default) or diagonal
Gaussian (ablation) policy heads.

The observation layout is the environment's: n sensor triplets, an aerial
charger triple, a ground charger pair. Each entity becomes one token.
"""

from __future__ import annotations

import math

import torch
from torch import nn

from .betadist import (
    CLAMP_EPS,
    beta_entropy,
    beta_kl,
    beta_log_prob,
    beta_mean,
    beta_sample,
    gaussian_entropy,
    gaussian_kl,
    gaussian_log_prob,
)


class AttentionBlock(nn.Module):
    """Scaled dot-product self-attention: softmax(Q K^T / sqrt(d_k)) V."""

    def __init__(self, dim: int):
        super().__init__()
        self.dim = dim
        self.q = nn.Linear(dim, dim, bias=False)
        self.k = nn.Linear(dim, dim, bias=False)
        self.v = nn.Linear(dim, dim, bias=False)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        q, k, v = self.q(tokens), self.k(tokens), self.v(tokens)
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.dim)
        return torch.softmax(scores, dim=-1) @ v


class TokenEncoder(nn.Module):
    """Tokenize the flat observation, attend, and mean-pool to one vector."""

    def __init__(self, n_sensors: int, embed_dim: int = 64, use_attention: bool = True):
        super().__init__()
        self.n_sensors = n_sensors
        self.obs_dim = 3 * n_sensors + 5
        self.sensor_embed = nn.Linear(3, embed_dim)
        self.aav_embed = nn.Linear(3, embed_dim)
        self.sv_embed = nn.Linear(2, embed_dim)
        self.attention = AttentionBlock(embed_dim) if use_attention else None

    def forward(self, obs: torch.Tensor) -> torch.Tensor:
        if obs.dim() == 1:
            obs = obs.unsqueeze(0)
        if obs.shape[-1] != self.obs_dim:
            raise ValueError(f"expected obs dim {self.obs_dim}, got {obs.shape[-1]}")
        n = self.n_sensors
        sensors = obs[:, : 3 * n].reshape(-1, n, 3)
        aav = obs[:, 3 * n : 3 * n + 3]
        sv = obs[:, 3 * n + 3 :]
        tokens = torch.cat(
            [
                self.sensor_embed(sensors),
                self.aav_embed(aav).unsqueeze(1),
                self.sv_embed(sv).unsqueeze(1),
            ],
            dim=1,
        )
        if self.attention is not None:
            tokens = self.attention(tokens)
        return tokens.mean(dim=1)


def _trunk(embed_dim: int, hidden_dim: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Linear(embed_dim, hidden_dim),
        nn.Tanh(),
        nn.Linear(hidden_dim, hidden_dim),
        nn.Tanh(),
    )


class Actor(nn.Module):
    """Policy network emitting Beta shape parameters (or Gaussian moments).

    For the Beta policy both shape parameters go through softplus(.)+1, so
    the per-dimension densities are unimodal and samples never need clipping.
    """

    def __init__(
        self,
        n_sensors: int,
        action_dim: int = 2,
        embed_dim: int = 64,
        hidden_dim: int = 256,
        use_attention: bool = True,
        policy: str = "beta",
    ):
        super().__init__()
        if policy not in ("beta", "gaussian"):
            raise ValueError(f"policy must be beta or gaussian, got {policy!r}")
        self.policy = policy
        self.action_dim = action_dim
        self.encoder = TokenEncoder(n_sensors, embed_dim, use_attention)
        self.trunk = _trunk(embed_dim, hidden_dim)
        self.head_a = nn.Linear(hidden_dim, action_dim)
        self.head_b = nn.Linear(hidden_dim, action_dim)
        if policy == "gaussian":
            self.log_std = nn.Parameter(torch.full((action_dim,), -1.0))

    def dist_params(self, obs: torch.Tensor):
        h = self.trunk(self.encoder(obs))
        if self.policy == "beta":
            alpha = nn.functional.softplus(self.head_a(h)) + 1.0
            beta = nn.functional.softplus(self.head_b(h)) + 1.0
            return alpha, beta
        mean = torch.sigmoid(self.head_a(h))
        log_std = self.log_std.clamp(-5.0, 2.0).expand_as(mean)
        return mean, log_std

    def log_prob(self, params, u: torch.Tensor) -> torch.Tensor:
        if self.policy == "beta":
            return beta_log_prob(u, *params)
        return gaussian_log_prob(u, *params)

    def entropy(self, params) -> torch.Tensor:
        if self.policy == "beta":
            return beta_entropy(*params)
        return gaussian_entropy(*params)

    def kl(self, params_old, params_new) -> torch.Tensor:
        if self.policy == "beta":
            return beta_kl(params_old[0], params_old[1], params_new[0], params_new[1])
        return gaussian_kl(params_old[0], params_old[1], params_new[0], params_new[1])

    def sample(self, params):
        """Draw raw actions; returns (u in [eps, 1-eps], out-of-range count).

        The count is how many components fell outside the valid action range
        before clamping: always 0 for the Beta policy, routinely positive for
        the Gaussian ablation.
        """
        if self.policy == "beta":
            raw = beta_sample(*params)
        else:
            mean, log_std = params
            raw = torch.normal(mean, torch.exp(log_std))
        clipped = int(((raw <= 0.0) | (raw >= 1.0)).sum())
        return raw.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS), clipped

    def mean_action(self, params) -> torch.Tensor:
        if self.policy == "beta":
            return beta_mean(*params)
        return params[0].clamp(CLAMP_EPS, 1.0 - CLAMP_EPS)


class Critic(nn.Module):
    """Value network: same encoder topology, scalar head."""

    def __init__(
        self,
        n_sensors: int,
        embed_dim: int = 64,
        hidden_dim: int = 256,
        use_attention: bool = True,
    ):
        super().__init__()
        self.encoder = TokenEncoder(n_sensors, embed_dim, use_attention)
        self.trunk = _trunk(embed_dim, hidden_dim)
        self.head = nn.Linear(hidden_dim, 1)

    def forward(self, obs: torch.Tensor) -> torch.Tensor:
        return self.head(self.trunk(self.encoder(obs))).squeeze(-1)
