"""
Training domain value objects: the run configuration and its groups.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional, Tuple

from src.domain.data.value_objects import Protocol
from src.domain.losses.value_objects import LossConfig
from src.domain.model.value_objects import ModelConfig
from src.domain.ppr.value_objects import PPRConfig
from src.domain.shared.entities import ValueObject
from src.domain.shared.exceptions import ConfigurationError, InvalidValueError


class SamplingStrategy(str, Enum):
    UNIFORM = "uniform"
    PPR = "ppr"


class StopDecision(str, Enum):
    CONTINUE = "continue"
    STOP = "stop"


@dataclass(frozen=True)
class DatasetConfig(ValueObject):
    path: str = ""
    rating_threshold: Optional[float] = None
    min_interactions: int = 1

    def __post_init__(self):
        if self.min_interactions < 1:
            raise InvalidValueError(f"min_interactions must be >= 1, got {self.min_interactions}")


@dataclass(frozen=True)
class SplitConfig(ValueObject):
    """`rho` applies to the interaction split, `mu` and `eta` to the user split."""

    protocol: Protocol = Protocol.TRANSDUCTIVE
    rho: float = 0.8
    mu: float = 0.8
    eta: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        for name in ("rho", "mu", "eta"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise InvalidValueError(f"{name} must lie in (0, 1), got {value}")


@dataclass(frozen=True)
class SamplingConfig(ValueObject):
    """
    Per-user sample sizes. `top_t` and `scale` shape the PPR sampler; `cache_path`
    points at a precomputed cache (default: inside the run directory).
    """

    strategy: SamplingStrategy = SamplingStrategy.UNIFORM
    n_pos: int = 5
    n_neg: int = 200
    top_t: Optional[int] = 1000
    scale: float = 1.0
    cache_path: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "strategy", SamplingStrategy(self.strategy))
        if self.n_pos < 1 or self.n_neg < 1:
            raise InvalidValueError(f"n_pos and n_neg must be >= 1, got {self.n_pos}, {self.n_neg}")
        if self.top_t is not None and self.top_t < 1:
            raise InvalidValueError(f"top_t must be >= 1, got {self.top_t}")


@dataclass(frozen=True)
class OptimizerConfig(ValueObject):
    lr: float = 0.001
    l2: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.lr < 0 or self.l2 < 0:
            raise InvalidValueError(f"lr and l2 must be >= 0, got {self.lr}, {self.l2}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise InvalidValueError("Adam betas must lie in [0, 1)")


@dataclass(frozen=True)
class TrainingConfig(ValueObject):
    """
    Epoch budget and validation cadence. Early stopping tracks NDCG@`target_k`.
    """

    batch_users: int = 512
    max_epochs: int = 200
    eval_every: int = 5
    patience: int = 10
    ks: Tuple[int, ...] = (10, 20)
    target_k: int = 20
    n_jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ks", tuple(sorted(set(int(k) for k in self.ks) | {self.target_k})))
        if self.batch_users < 1:
            raise InvalidValueError(f"batch_users must be >= 1, got {self.batch_users}")
        if self.max_epochs < 1 or self.eval_every < 1 or self.patience < 1:
            raise InvalidValueError("max_epochs, eval_every and patience must be >= 1")
        if min(self.ks) < 1:
            raise InvalidValueError(f"Cut-offs must be >= 1, got {self.ks}")


@dataclass(frozen=True)
class RunConfig(ValueObject):
    """
    Everything a run depends on. The model mode always follows the split protocol.
    """

    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    ppr: PPRConfig = field(default_factory=PPRConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    seed: int = 0

    def __post_init__(self):
        if self.model.mode is not self.split.protocol:
            raise ConfigurationError(
                f"Model mode '{self.model.mode.value}' does not match protocol '{self.split.protocol.value}'",
                details={"model": self.model.mode.value, "protocol": self.split.protocol.value},
            )
        if self.seed < 0:
            raise InvalidValueError(f"seed must be >= 0, got {self.seed}")

    @property
    def protocol(self) -> Protocol:
        return self.split.protocol

    def to_dict(self) -> dict:
        return json.loads(json.dumps(asdict(self), default=_enum_value))

    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _enum_value(value):
    if isinstance(value, Enum):
        return value.value
    raise TypeError(f"Cannot serialize {type(value).__name__}")
