"""
Data Transfer Objects (DTOs) for the application layer.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional


@dataclass
class DatasetSummaryDTO:
    """DTO for a loaded and filtered dataset."""

    num_users: int
    num_items: int
    num_interactions: int


@dataclass
class SplitResultDTO:
    """DTO for a split written to disk."""

    protocol: str
    seed: int
    path: str
    dataset: DatasetSummaryDTO
    counts: Dict[str, int] = field(default_factory=dict)
    dropped: Dict[str, int] = field(default_factory=dict)


@dataclass
class PPRResultDTO:
    """DTO for a precomputed PPR cache."""

    path: str
    num_users: int
    not_converged: int
    top_t: Optional[int]
    scale: float
    seconds: float


@dataclass
class EvaluationResultDTO:
    """DTO for one metric report."""

    part: str
    path: str
    users_evaluated: int
    users_skipped: int
    ndcg: Dict[str, float] = field(default_factory=dict)
    recall: Dict[str, float] = field(default_factory=dict)
    ap: float = 0.0


@dataclass
class TrainingResultDTO:
    """DTO for a finished training run."""

    run_id: str
    run_dir: str
    checkpoint_path: str
    best_epoch: Optional[int]
    stop_reason: str
    epochs: int
    validation: Optional[EvaluationResultDTO] = None
    test: Optional[EvaluationResultDTO] = None


@dataclass
class RecommendationDTO:
    rank: int
    item: str
    score: float


@dataclass
class TopKResultDTO:
    """DTO for a qualitative top-k dump."""

    path: str
    k: int
    lists: Dict[str, List[RecommendationDTO]] = field(default_factory=dict)
