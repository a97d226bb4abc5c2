"""
PPR domain events.
"""

from dataclasses import dataclass
from typing import Optional

from src.domain.shared.events import DomainEvent


@dataclass
class PPRComputedEvent(DomainEvent):
    """Event raised when the PPR cache of the training users is ready."""

    num_users: int
    not_converged: int
    top_t: Optional[int]
    scale: float
