"""
Training domain entities.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from src.domain.evaluation.entities import MetricReport
from src.domain.model.entities import EmbeddingTable
from src.domain.shared.entities import DomainEntity
from src.domain.training.value_objects import RunConfig


@dataclass(frozen=True, eq=False)
class TrainingBatch:
    """
    Row b holds the sampled positives and negatives of `users[b]`.
    """

    users: np.ndarray
    positives: np.ndarray
    negatives: np.ndarray
    skipped: int = 0

    def __len__(self) -> int:
        return int(self.users.size)

    @property
    def n_pos(self) -> int:
        return self.positives.shape[1]

    @property
    def items(self) -> np.ndarray:
        """Positives then negatives, shape (B, n_pos + n_neg)."""
        return np.hstack([self.positives, self.negatives])


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss: float
    seconds: float
    users: int
    skipped: int = 0


@dataclass(frozen=True)
class ValidationRecord:
    epoch: int
    target: float
    metrics: Dict[str, object]
    seconds: float


@dataclass(kw_only=True, eq=False)
class TrainingRun(DomainEntity):
    """
    Aggregate of one training run: loss and validation history, best state and outcome.
    """

    config: RunConfig
    epochs: List[EpochRecord] = field(default_factory=list)
    validations: List[ValidationRecord] = field(default_factory=list)
    best_epoch: Optional[int] = None
    best_table: Optional[EmbeddingTable] = field(default=None, repr=False)
    stop_reason: Optional[str] = None
    validation_report: Optional[MetricReport] = field(default=None, repr=False)
    test_report: Optional[MetricReport] = field(default=None, repr=False)

    def record_epoch(self, record: EpochRecord) -> None:
        self.epochs.append(record)
        self.touch()

    def record_validation(self, epoch: int, report: MetricReport, seconds: float, table: EmbeddingTable) -> bool:
        """Append a validation result; keep `table` when it is the best so far."""
        target = report.ndcg_at(self.config.training.target_k)
        improved = self.best_epoch is None or target > self.best_target
        self.validations.append(ValidationRecord(epoch=epoch, target=target, metrics=report.summary(), seconds=seconds))
        if improved:
            self.best_epoch = epoch
            self.best_table = table
            self.validation_report = report
        self.touch()
        return improved

    @property
    def target_history(self) -> List[float]:
        return [record.target for record in self.validations]

    @property
    def best_target(self) -> float:
        return max(self.target_history) if self.validations else float("-inf")

    def finish(self, reason: str) -> None:
        self.stop_reason = reason
        self.touch()

    def history(self) -> dict:
        return {
            "run_id": self.id,
            "config_hash": self.config.config_hash(),
            "target": f"ndcg@{self.config.training.target_k}",
            "best_epoch": self.best_epoch,
            "stop_reason": self.stop_reason,
            "epochs": [
                {
                    "epoch": record.epoch,
                    "loss": record.loss,
                    "seconds": record.seconds,
                    "users": record.users,
                    "skipped": record.skipped,
                }
                for record in self.epochs
            ],
            "validations": [
                {"epoch": record.epoch, "seconds": record.seconds, **record.metrics} for record in self.validations
            ],
        }
