"""Beta and diagonal-Gaussian policy densities in the log domain.

The Beta density keeps every sample strictly inside (0,1) (no clipping);
the Gaussian variant exists as an ablation and must be clipped, which is
exactly the boundary bias it demonstrates. All functions sum over the last
(action) dimension and are differentiable through the shape parameters.
"""

from __future__ import annotations

import math

import torch

CLAMP_EPS = 1e-6


def beta_log_prob(u: torch.Tensor, alpha: torch.Tensor, beta: torch.Tensor) -> torch.Tensor:
    """log Beta(u; alpha, beta), summed over the last dim.

    u on the closed boundary is clamped to [eps, 1-eps] before evaluation.
    """
    u = u.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS)
    log_norm = torch.lgamma(alpha + beta) - torch.lgamma(alpha) - torch.lgamma(beta)
    log_pdf = (alpha - 1.0) * torch.log(u) + (beta - 1.0) * torch.log1p(-u) + log_norm
    return log_pdf.sum(dim=-1)


def beta_entropy(alpha: torch.Tensor, beta: torch.Tensor) -> torch.Tensor:
    """Differential entropy of Beta(alpha, beta), summed over the last dim."""
    log_b = torch.lgamma(alpha) + torch.lgamma(beta) - torch.lgamma(alpha + beta)
    ent = (
        log_b
        - (alpha - 1.0) * torch.digamma(alpha)
        - (beta - 1.0) * torch.digamma(beta)
        + (alpha + beta - 2.0) * torch.digamma(alpha + beta)
    )
    return ent.sum(dim=-1)


def beta_kl(a1: torch.Tensor, b1: torch.Tensor, a2: torch.Tensor, b2: torch.Tensor) -> torch.Tensor:
    """KL(Beta(a1,b1) || Beta(a2,b2)) in closed form, summed over the last dim."""
    log_b1 = torch.lgamma(a1) + torch.lgamma(b1) - torch.lgamma(a1 + b1)
    log_b2 = torch.lgamma(a2) + torch.lgamma(b2) - torch.lgamma(a2 + b2)
    kl = (
        log_b2
        - log_b1
        + (a1 - a2) * torch.digamma(a1)
        + (b1 - b2) * torch.digamma(b1)
        + (a2 - a1 + b2 - b1) * torch.digamma(a1 + b1)
    )
    return kl.sum(dim=-1)


def beta_sample(alpha: torch.Tensor, beta: torch.Tensor) -> torch.Tensor:
    """Draw from Beta(alpha, beta) using torch's global generator."""
    return torch.distributions.Beta(alpha, beta).sample()


def beta_mean(alpha: torch.Tensor, beta: torch.Tensor) -> torch.Tensor:
    return alpha / (alpha + beta)


_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def gaussian_log_prob(u: torch.Tensor, mean: torch.Tensor, log_std: torch.Tensor) -> torch.Tensor:
    """Diagonal-Gaussian log density, summed over the last dim."""
    var = torch.exp(2.0 * log_std)
    log_pdf = -0.5 * (u - mean) ** 2 / var - log_std - _LOG_SQRT_2PI
    return log_pdf.sum(dim=-1)


def gaussian_entropy(mean: torch.Tensor, log_std: torch.Tensor) -> torch.Tensor:
    ent = log_std + 0.5 + _LOG_SQRT_2PI
    return ent.expand_as(mean).sum(dim=-1) if ent.shape != mean.shape else ent.sum(dim=-1)


def gaussian_kl(m1: torch.Tensor, ls1: torch.Tensor, m2: torch.Tensor, ls2: torch.Tensor) -> torch.Tensor:
    """KL(N(m1, s1) || N(m2, s2)) diagonal, summed over the last dim."""
    v1 = torch.exp(2.0 * ls1)
    v2 = torch.exp(2.0 * ls2)
    kl = ls2 - ls1 + (v1 + (m1 - m2) ** 2) / (2.0 * v2) - 0.5
    return kl.sum(dim=-1)
