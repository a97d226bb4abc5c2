"""
Data domain events.
"""

from dataclasses import dataclass, field
from typing import Dict

from src.domain.shared.events import DomainEvent


@dataclass
class DatasetPreparedEvent(DomainEvent):
    """Event raised when a dataset has been loaded and filtered."""

    num_users: int
    num_items: int
    num_interactions: int


@dataclass
class SplitCreatedEvent(DomainEvent):
    """Event raised when a split has been produced."""

    protocol: str
    seed: int
    counts: Dict[str, int] = field(default_factory=dict)
    dropped: Dict[str, int] = field(default_factory=dict)


@dataclass
class CoverageRepairedEvent(DomainEvent):
    """
    Event raised when held-out interactions on items unseen in train were moved into
    train (interaction split) or dropped (user split).
    """

    protocol: str
    moved_to_train: int = 0
    dropped_interactions: int = 0
    dropped_users: int = 0
