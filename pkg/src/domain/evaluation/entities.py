"""
Evaluation domain entities.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class RankingResult:
    """
    Candidate items of one user sorted by descending score, ties by ascending
    item id, with the parallel 0/1 relevance vector.
    """

    user: int
    ranked_items: np.ndarray
    relevance: np.ndarray
    scores: Optional[np.ndarray] = None

    @property
    def num_relevant(self) -> int:
        return int(self.relevance.sum())


@dataclass(frozen=True)
class UserMetrics:
    user: int
    ndcg: Dict[int, float]
    recall: Dict[int, float]
    ap: float
    num_positives: int


@dataclass
class MetricReport:
    """
    Per-user metric table with unweighted macro-averages.

    Users without positives in the evaluated part are listed in `users_skipped`
    and left out of the averages.
    """

    ks: Tuple[int, ...]
    part: str
    per_user: List[UserMetrics] = field(default_factory=list)
    users_skipped: List[int] = field(default_factory=list)
    config_hash: Optional[str] = None

    @property
    def users_evaluated(self) -> int:
        return len(self.per_user)

    def _mean(self, values: List[float]) -> float:
        return float(np.mean(values)) if values else 0.0

    @property
    def ndcg(self) -> Dict[int, float]:
        return {k: self._mean([row.ndcg[k] for row in self.per_user]) for k in self.ks}

    @property
    def recall(self) -> Dict[int, float]:
        return {k: self._mean([row.recall[k] for row in self.per_user]) for k in self.ks}

    @property
    def ap(self) -> float:
        return self._mean([row.ap for row in self.per_user])

    def ndcg_at(self, k: int) -> float:
        return self.ndcg[k]

    def summary(self) -> dict:
        """Averages only, as stored in the training history."""
        return {
            "ndcg": {str(k): v for k, v in self.ndcg.items()},
            "recall": {str(k): v for k, v in self.recall.items()},
            "ap": self.ap,
        }

    def to_dict(self, include_users: bool = True) -> dict:
        data = {
            "k": list(self.ks),
            "part": self.part,
            **self.summary(),
            "users_evaluated": self.users_evaluated,
            "users_skipped": len(self.users_skipped),
            "config_hash": self.config_hash,
        }
        if include_users:
            data["per_user"] = [
                {
                    "user": row.user,
                    "ndcg": {str(k): v for k, v in row.ndcg.items()},
                    "recall": {str(k): v for k, v in row.recall.items()},
                    "ap": row.ap,
                    "positives": row.num_positives,
                }
                for row in self.per_user
            ]
            data["skipped"] = list(self.users_skipped)
        return data


@dataclass(frozen=True)
class Recommendation:
    """One entry of a qualitative top-k dump."""

    rank: int
    item: int
    label: str
    score: float
