"""
Training domain events.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

from src.domain.shared.events import DomainEvent


@dataclass
class EpochCompletedEvent(DomainEvent):
    epoch: int
    loss: float
    seconds: float


@dataclass
class ValidationCompletedEvent(DomainEvent):
    epoch: int
    target: float
    improved: bool
    metrics: Dict[str, object] = field(default_factory=dict)


@dataclass
class CheckpointSavedEvent(DomainEvent):
    path: str
    epoch: Optional[int]


@dataclass
class TrainingFinishedEvent(DomainEvent):
    """Event raised when a run stops, for any reason."""

    reason: str
    best_epoch: Optional[int]
    epochs: int
