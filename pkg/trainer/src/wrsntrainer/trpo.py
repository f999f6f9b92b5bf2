"""Trust-region policy update: surrogate objective, mean KL, Hessian-vector
products and the backtracking line search."""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .cg import conjugate_gradient


def flat_params(module: torch.nn.Module) -> torch.Tensor:
    return torch.cat([p.detach().reshape(-1) for p in module.parameters()])


def set_flat_params(module: torch.nn.Module, vec: torch.Tensor) -> None:
    total = sum(p.numel() for p in module.parameters())
    if vec.numel() != total:
        raise ValueError(f"parameter vector length {vec.numel()} != model size {total}")
    offset = 0
    for p in module.parameters():
        n = p.numel()
        p.data.copy_(vec[offset : offset + n].reshape(p.shape))
        offset += n


def flat_grad(output: torch.Tensor, module: torch.nn.Module, create_graph: bool = False,
              retain_graph: bool = None) -> torch.Tensor:
    grads = torch.autograd.grad(
        output,
        list(module.parameters()),
        create_graph=create_graph,
        retain_graph=retain_graph,
        allow_unused=True,
    )
    flat = []
    for g, p in zip(grads, module.parameters()):
        flat.append(torch.zeros_like(p).reshape(-1) if g is None else g.reshape(-1))
    return torch.cat(flat)


def surrogate(actor, obs, actions, behavior_log_probs, advantages, entropy_coef: float) -> torch.Tensor:
    """Importance-sampled policy objective plus entropy bonus (a scalar to
    maximize)."""
    params = actor.dist_params(obs)
    log_probs = actor.log_prob(params, actions)
    ratio = torch.exp(log_probs - behavior_log_probs)
    bonus = entropy_coef * actor.entropy(params).mean()
    return (ratio * advantages).mean() + bonus


def kl_mean(actor, obs, old_params) -> torch.Tensor:
    """Mean KL(old || current) over the batch states; old_params detached."""
    new_params = actor.dist_params(obs)
    return actor.kl(old_params, new_params).mean()


@dataclass
class UpdateResult:
    accepted: bool
    kl: float
    improvement: float
    backtracks: int
    skipped: str | None = None


def trpo_update(
    actor,
    obs: torch.Tensor,
    actions: torch.Tensor,
    behavior_log_probs: torch.Tensor,
    advantages: torch.Tensor,
    kl_threshold: float,
    entropy_coef: float = 0.01,
    cg_iters: int = 10,
    cg_damping: float = 1e-2,
    backtrack_coef: float = 0.5,
    max_backtracks: int = 10,
) -> UpdateResult:
    """One trust-region step: natural gradient via CG, then a backtracking
    line search accepting the first candidate with KL <= threshold and a
    positive surrogate improvement. The actor is left unchanged when no
    candidate qualifies."""
    theta_old = flat_params(actor)
    with torch.no_grad():
        old_params = tuple(p.detach() for p in actor.dist_params(obs))

    loss_old_t = surrogate(actor, obs, actions, behavior_log_probs, advantages, entropy_coef)
    g = flat_grad(loss_old_t, actor)
    loss_old = float(loss_old_t.detach())
    if not torch.isfinite(g).all():
        set_flat_params(actor, theta_old)
        return UpdateResult(False, 0.0, 0.0, 0, skipped="non-finite gradient")
    if float(g.norm()) < 1e-12:
        return UpdateResult(False, 0.0, 0.0, 0, skipped="zero gradient")

    # one KL graph reused across every Hessian-vector product
    kl0 = kl_mean(actor, obs, old_params)
    grad_kl = flat_grad(kl0, actor, create_graph=True)

    def hvp(v: torch.Tensor) -> torch.Tensor:
        hv = flat_grad(torch.dot(grad_kl, v), actor, retain_graph=True)
        return hv + cg_damping * v

    direction, _ = conjugate_gradient(hvp, g, iters=cg_iters)
    ghg = float(torch.dot(g, direction))
    if ghg <= 0.0:
        return UpdateResult(False, 0.0, 0.0, 0, skipped=f"non-positive curvature gHg={ghg:.3e}")

    full_step = torch.sqrt(torch.tensor(2.0 * kl_threshold / ghg, dtype=g.dtype)) * direction
    for j in range(max_backtracks):
        candidate = theta_old + (backtrack_coef**j) * full_step
        set_flat_params(actor, candidate)
        with torch.no_grad():
            kl = float(kl_mean(actor, obs, old_params))
            loss_new = float(
                surrogate(actor, obs, actions, behavior_log_probs, advantages, entropy_coef)
            )
        improvement = loss_new - loss_old
        if kl <= kl_threshold and improvement > 0.0:
            assert kl <= kl_threshold, "accepted step violates the trust region"
            return UpdateResult(True, kl, improvement, j)
    set_flat_params(actor, theta_old)
    return UpdateResult(False, 0.0, 0.0, max_backtracks, skipped="line search exhausted")
