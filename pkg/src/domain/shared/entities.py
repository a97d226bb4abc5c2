"""
Base types of the domain layer: aggregates with identity and frozen value objects.
"""

from abc import ABC
from dataclasses import dataclass, field
from datetime import datetime, timezone


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(kw_only=True, eq=False)
class DomainEntity(ABC):
    """
    Aggregate root (a trained model, a training run). Two aggregates are the same when
    their ids match, whatever state they carry.
    """

    id: str
    created_at: datetime = field(default_factory=_utcnow)
    updated_at: datetime = field(default_factory=_utcnow)

    def touch(self) -> None:
        self.updated_at = _utcnow()

    @property
    def elapsed_seconds(self) -> float:
        """Wall-clock time between creation and the last change."""
        return (self.updated_at - self.created_at).total_seconds()

    def __eq__(self, other):
        return isinstance(other, DomainEntity) and type(self) is type(other) and self.id == other.id

    def __hash__(self):
        return hash((type(self).__name__, self.id))


@dataclass(frozen=True)
class ValueObject(ABC):
    """Immutable configuration or result type, compared by value."""
