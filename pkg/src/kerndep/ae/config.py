"""Training configuration for the autoencoder harness."""

from __future__ import annotations

from dataclasses import dataclass, fields

from ..errors import ConfigError

TASK_RECONSTRUCT = "reconstruct"
TASK_PREDICT = "predict"
TASKS = (TASK_RECONSTRUCT, TASK_PREDICT)


@dataclass(frozen=True)
class AeConfig:
    """Everything that determines a training run, including its seed.

    Two runs with equal configs on equal data produce bitwise identical
    models and traces; that property is load-bearing and tested.
    """

    input_dim: int
    hidden_dims: tuple[int, ...]
    latent_dim: int
    task: str = TASK_RECONSTRUCT
    horizon: int | None = None
    beta: float = 0.0
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    epochs: int = 10
    batch_size: int = 64
    seed: int = 0
    hsic_subsample: int = 256

    def __post_init__(self):
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))
        if self.input_dim < 1 or self.latent_dim < 1:
            raise ConfigError("input_dim and latent_dim must be positive")
        if any(h < 1 for h in self.hidden_dims):
            raise ConfigError("hidden layer widths must be positive")
        if self.latent_dim >= self.input_dim:
            raise ConfigError(
                f"latent_dim {self.latent_dim} must be smaller than "
                f"input_dim {self.input_dim}: the bottleneck is the point"
            )
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.task == TASK_PREDICT:
            if self.horizon is None or int(self.horizon) < 1:
                raise ConfigError("prediction needs a horizon >= 1")
            object.__setattr__(self, "horizon", int(self.horizon))
        elif self.horizon is not None:
            raise ConfigError("horizon only applies to the predict task")
        if self.beta < 0:
            raise ConfigError("beta must be nonnegative")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if not (0 <= self.adam_beta1 < 1 and 0 <= self.adam_beta2 < 1):
            raise ConfigError("adam betas must lie in [0, 1)")
        if self.adam_eps <= 0:
            raise ConfigError("adam_eps must be positive")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if not 0 <= int(self.seed) < 2**63:
            raise ConfigError("seed must be a nonnegative 63-bit integer")
        if self.hsic_subsample < 2:
            raise ConfigError("hsic_subsample must be >= 2")

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, obj) -> "AeConfig":
        if not isinstance(obj, dict):
            raise ConfigError(f"config must be a JSON object, got {type(obj).__name__}")
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"input_dim", "hidden_dims", "latent_dim"} - set(obj)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        try:
            return cls(**obj)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
