"""Conjugate gradient for the natural-gradient direction H^-1 g."""

from __future__ import annotations

import torch


def conjugate_gradient(hvp, g: torch.Tensor, iters: int = 10, tol: float = 1e-10):
    """Approximately solve H x = g with a symmetric PD operator ``hvp``.

    Returns (x, residual_norms); residual_norms[k] is ||g - H x_k||. Aborts
    on non-finite intermediates (an unusable curvature estimate).
    """
    x = torch.zeros_like(g)
    r = g.clone()
    p = g.clone()
    rs = torch.dot(r, r)
    residuals = [float(rs.sqrt())]
    for _ in range(iters):
        if residuals[-1] < tol:
            break
        hp = hvp(p)
        if not torch.isfinite(hp).all():
            raise FloatingPointError("non-finite Hessian-vector product in conjugate gradient")
        p_hp = torch.dot(p, hp)
        if p_hp <= 0:
            # curvature lost to numerics; keep the best iterate so far
            break
        step = rs / p_hp
        x = x + step * p
        r = r - step * hp
        rs_new = torch.dot(r, r)
        residuals.append(float(rs_new.sqrt()))
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x, residuals
