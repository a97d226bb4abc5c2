"""
PPR domain entities.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from src.domain.ppr.value_objects import PPRConfig


@dataclass(frozen=True, eq=False)
class PPRVector:
    """
    PageRank mass of one source user over graph nodes.

    Nodes are global ids: users first (0..U-1), then items (U..U+I-1).
    """

    user: int
    num_users: int
    nodes: np.ndarray
    mass: np.ndarray
    residual: float = 0.0
    iterations: int = 0
    converged: bool = True

    @property
    def item_ids(self) -> np.ndarray:
        return self.nodes[self.nodes >= self.num_users] - self.num_users

    @property
    def item_mass(self) -> np.ndarray:
        return self.mass[self.nodes >= self.num_users]

    def total(self) -> float:
        return float(self.mass.sum())

    def item_scores(self, num_items: int) -> np.ndarray:
        """Dense item vector, zero where the walk left no mass."""
        scores = np.zeros(num_items)
        scores[self.item_ids] = self.item_mass
        return scores


@dataclass(frozen=True, eq=False)
class NegativeSampler:
    """
    Sampling distribution of one user over its negative candidates, with the
    cumulative table used for O(log n) draws.
    """

    user: int
    candidate_items: np.ndarray
    probs: np.ndarray
    cumulative: np.ndarray

    def probability_of(self, item: int) -> float:
        position = np.searchsorted(self.candidate_items, item)
        if position < self.candidate_items.size and self.candidate_items[position] == item:
            return float(self.probs[position])
        return 0.0


@dataclass(eq=False)
class PPRCache:
    """
    Truncated per-user PPR item vectors together with the settings that produced them.
    """

    config: PPRConfig
    num_users: int
    num_items: int
    graph_fingerprint: str
    top_t: Optional[int] = None
    scale: float = 1.0
    vectors: Dict[int, PPRVector] = field(default_factory=dict)

    def header(self) -> dict:
        return {
            "alpha": self.config.alpha,
            "tol": self.config.tol,
            "max_iter": self.config.max_iter,
            "T": self.top_t,
            "scale": self.scale,
            "graph_hash": self.graph_fingerprint,
            "num_users": self.num_users,
            "num_items": self.num_items,
            "records": len(self.vectors),
        }
