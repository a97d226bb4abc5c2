"""
Domain events: facts about splits, PPR caches and training runs.
"""

import uuid
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional


@dataclass
class DomainEvent(ABC):
    """
    `aggregate_id` names the run or artifact the event belongs to.
    """

    aggregate_id: Optional[str] = field(default=None, kw_only=True)
    event_id: str = field(default_factory=lambda: uuid.uuid4().hex, kw_only=True)
    occurred_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc), kw_only=True)

    @property
    def name(self) -> str:
        return type(self).__name__


class DomainEventPublisher(ABC):
    """Port through which use cases announce events."""

    @abstractmethod
    def publish(self, event: DomainEvent) -> None:
        pass
