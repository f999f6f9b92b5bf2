"""Trust-region multi-agent trainer for the charging simulator: attention
token encoder, Beta policy heads, GAE, and KL-constrained natural-gradient
updates, driving the environment over its wire protocol."""

from .config import TrainerConfig
from .envclient import EnvClient
from .trainer import Trainer

__version__ = "0.1.0"

__all__ = ["EnvClient", "Trainer", "TrainerConfig"]
