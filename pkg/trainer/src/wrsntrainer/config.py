"""Trainer configuration with the reference hyperparameters."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields


@dataclass(frozen=True)
class TrainerConfig:
    """Hyperparameters; defaults are the tuned reference values.

    kl_threshold is the trust-region radius delta; backtrack_coef/max_backtracks
    drive the line search; cg_iters/cg_damping the natural-gradient solve.
    """

    episodes: int = 300
    gamma: float = 0.96
    gae_lambda: float = 0.98
    kl_threshold: float = 5e-5
    backtrack_coef: float = 0.5
    max_backtracks: int = 10
    cg_iters: int = 10
    cg_damping: float = 1e-2
    critic_lr: float = 5e-5
    critic_epochs: int = 25
    entropy_coef: float = 0.01
    embed_dim: int = 64
    hidden_dim: int = 256
    no_attention: bool = False
    gaussian_policy: bool = False
    compound_ratios: bool = False
    seed: int = 0
    env_seed_base: int = 0
    eval_episodes: int = 20
    eval_seed_base: int = 10_000
    eval_every: int = 0
    checkpoint_every: int = 0
    dtype: str = "float64"

    def __post_init__(self):
        if self.kl_threshold <= 0:
            raise ValueError("kl_threshold must be > 0")
        if not (0.0 < self.backtrack_coef < 1.0):
            raise ValueError("backtrack_coef must be in (0, 1)")
        if not (0.0 < self.gamma < 1.0) or not (0.0 < self.gae_lambda < 1.0):
            raise ValueError("gamma and gae_lambda must be in (0, 1)")
        if self.episodes < 1 or self.cg_iters < 1 or self.max_backtracks < 1:
            raise ValueError("episodes, cg_iters and max_backtracks must be >= 1")
        if self.critic_lr <= 0 or self.cg_damping < 0 or self.critic_epochs < 1:
            raise ValueError("invalid critic/damping settings")
        if self.dtype not in ("float32", "float64"):
            raise ValueError("dtype must be float32 or float64")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dicts(cls, *docs: dict) -> "TrainerConfig":
        """Merge plain dicts onto the defaults (later docs win); unknown keys
        are rejected to catch typos in config files."""
        known = {f.name for f in fields(cls)}
        merged = {}
        for doc in docs:
            if not doc:
                continue
            unknown = set(doc) - known
            if unknown:
                raise ValueError(f"unknown trainer config keys: {sorted(unknown)}")
            merged.update(doc)
        return cls(**merged)
