"""
Model domain value objects.
"""

from dataclasses import dataclass
from enum import Enum

from src.domain.data.value_objects import Protocol
from src.domain.shared.entities import ValueObject
from src.domain.shared.exceptions import InvalidValueError


class Pooling(str, Enum):
    MEAN = "mean"
    SUM = "sum"


@dataclass(frozen=True)
class ModelConfig(ValueObject):
    """
    Propagation backbone configuration.
    """

    layers: int = 3
    pooling: Pooling = Pooling.MEAN
    mode: Protocol = Protocol.TRANSDUCTIVE
    dim: int = 64
    init_std: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "pooling", Pooling(self.pooling))
        object.__setattr__(self, "mode", Protocol(self.mode))

        if self.layers < 0:
            raise InvalidValueError(f"layers must be >= 0, got {self.layers}")
        if self.dim < 1:
            raise InvalidValueError(f"dim must be >= 1, got {self.dim}")
        if self.init_std <= 0:
            raise InvalidValueError(f"init_std must be > 0, got {self.init_std}")
        if self.mode is Protocol.INDUCTIVE and self.layers == 0:
            raise InvalidValueError("Inductive users need at least one propagation layer")

    @property
    def inductive(self) -> bool:
        return self.mode is Protocol.INDUCTIVE
