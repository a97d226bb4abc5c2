"""
Loss domain value objects.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.domain.shared.entities import ValueObject
from src.domain.shared.exceptions import InvalidValueError


class LossVariant(str, Enum):
    NDCG = "ndcg"
    AP = "ap"
    RECALL_AT_K = "recall_at_k"
    BPR = "bpr"


@dataclass(frozen=True)
class LossConfig(ValueObject):
    """
    `tau` is the sigmoid temperature of the smooth rank, `tau_star` the second
    temperature of the R@k loss (defaults to `tau`).
    """

    variant: LossVariant = LossVariant.NDCG
    tau: float = 1.0
    tau_star: Optional[float] = None
    recall_levels: Tuple[int, ...] = (10, 20)
    negatives_only: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "variant", LossVariant(self.variant))
        except ValueError:
            raise InvalidValueError(f"Unknown loss variant '{self.variant}'", details={"variant": self.variant})
        if self.tau_star is None:
            object.__setattr__(self, "tau_star", self.tau)
        object.__setattr__(self, "recall_levels", tuple(sorted(int(k) for k in self.recall_levels)))

        if self.tau <= 0 or self.tau_star <= 0:
            raise InvalidValueError(f"Temperatures must be > 0, got tau={self.tau}, tau_star={self.tau_star}")
        if self.variant is LossVariant.RECALL_AT_K and not self.recall_levels:
            raise InvalidValueError("recall_at_k needs at least one recall level")
        if any(k < 1 for k in self.recall_levels):
            raise InvalidValueError(f"Recall levels must be positive, got {self.recall_levels}")


@dataclass(frozen=True, eq=False)
class BatchScores(ValueObject):
    """Scores of one user's sampled positives and negatives."""

    pos_scores: np.ndarray
    neg_scores: np.ndarray

    def __post_init__(self):
        pos = np.atleast_1d(np.asarray(self.pos_scores, dtype=np.float64))
        neg = np.atleast_1d(np.asarray(self.neg_scores, dtype=np.float64))
        object.__setattr__(self, "pos_scores", pos)
        object.__setattr__(self, "neg_scores", neg)

        if pos.size == 0:
            raise InvalidValueError("A batch needs at least one positive score")
        if not (np.isfinite(pos).all() and np.isfinite(neg).all()):
            raise InvalidValueError("Batch scores must be finite")

    @property
    def num_pos(self) -> int:
        return self.pos_scores.size

    @property
    def all_scores(self) -> np.ndarray:
        return np.concatenate([self.pos_scores, self.neg_scores])
