"""Training configuration."""

from dataclasses import asdict, dataclass, fields

from .errors import ConfigError


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 2000
    learning_rate: float = 0.1
    k_init: int = 1
    k_max: int = 8
    grow_interval: int = 500
    lambda_sym: float = 1e-2
    lambda_l1: float = 1e-4
    lambda_l2: float = 1e-4
    seed: int = 42
    precision: float = 0.01
    prune_threshold: float = 1e-3
    prune_relative: bool = True
    patience: int = 200
    val_fraction: float = 0.1
    enable_symbolic_loss: bool = True
    clip_norm: float = 1.0
    checkpoint_every: int = 500

    def __post_init__(self):
        checks = [
            ("epochs", self.epochs >= 1, "must be >= 1"),
            ("learning_rate", self.learning_rate > 0, "must be > 0"),
            ("k_init", self.k_init >= 1, "must be >= 1"),
            ("k_max", self.k_max >= self.k_init, "must be >= k_init"),
            ("grow_interval", self.grow_interval >= 1, "must be >= 1"),
            ("lambda_sym", self.lambda_sym >= 0, "must be >= 0"),
            ("lambda_l1", self.lambda_l1 >= 0, "must be >= 0"),
            ("lambda_l2", self.lambda_l2 >= 0, "must be >= 0"),
            ("precision", self.precision > 0, "must be > 0"),
            ("prune_threshold", self.prune_threshold >= 0, "must be >= 0"),
            ("patience", self.patience >= 1, "must be >= 1"),
            ("val_fraction", 0.0 <= self.val_fraction < 1.0, "must lie in [0, 1)"),
            ("clip_norm", self.clip_norm > 0, "must be > 0"),
            ("checkpoint_every", self.checkpoint_every >= 0, "must be >= 0"),
        ]
        for key, ok, msg in checks:
            if not ok:
                raise ConfigError(key, msg)

    @property
    def effective_lambda_sym(self):
        return self.lambda_sym if self.enable_symbolic_loss else 0.0

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, value in d.items():
            if key not in known:
                raise ConfigError(key, "unknown training option")
            expected = known[key].type
            if expected in ("int", int) and (isinstance(value, bool) or not isinstance(value, int)):
                raise ConfigError(key, f"expected an integer, got {value!r}")
            if expected in ("float", float) and (isinstance(value, bool) or not isinstance(value, (int, float))):
                raise ConfigError(key, f"expected a number, got {value!r}")
            if expected in ("bool", bool) and not isinstance(value, bool):
                raise ConfigError(key, f"expected true/false, got {value!r}")
            kwargs[key] = float(value) if expected in ("float", float) else value
        return cls(**kwargs)
