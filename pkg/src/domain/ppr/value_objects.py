"""
PPR domain value objects.
"""

from dataclasses import dataclass

from src.domain.shared.entities import ValueObject
from src.domain.shared.exceptions import InvalidValueError


@dataclass(frozen=True)
class PPRConfig(ValueObject):
    """
    Power-iteration settings. `alpha` is the teleport probability.
    """

    alpha: float = 0.15
    tol: float = 1e-9
    max_iter: int = 1000

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.tol <= 0:
            raise InvalidValueError(f"tol must be > 0, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidValueError(f"max_iter must be >= 1, got {self.max_iter}")
