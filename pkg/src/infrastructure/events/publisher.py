"""
In-memory domain event publisher.
"""

import logging
from collections import defaultdict, deque
from typing import Callable, DefaultDict, Deque, List, Optional, Type, TypeVar

from src.domain.shared.events import DomainEvent, DomainEventPublisher

logger = logging.getLogger(__name__)

Handler = Callable[[DomainEvent], None]
E = TypeVar("E", bound=DomainEvent)


class InMemoryEventPublisher(DomainEventPublisher):
    """
    Dispatches each event to the handlers of its type, then to catch-all handlers.
    The last `history` events are kept for inspection (one entry per epoch in long runs).
    """

    def __init__(self, history: int = 1000):
        self._recent: Deque[DomainEvent] = deque(maxlen=history)
        self._handlers: DefaultDict[Type[DomainEvent], List[Handler]] = defaultdict(list)
        self._catch_all: List[Handler] = []

    def publish(self, event: DomainEvent) -> None:
        self._recent.append(event)
        for handler in [*self._handlers.get(type(event), []), *self._catch_all]:
            try:
                handler(event)
            except Exception:
                logger.exception(f"Handler {getattr(handler, '__name__', handler)!r} failed on {event.name}")

    def subscribe(self, handler: Handler, event_type: Optional[Type[DomainEvent]] = None) -> None:
        """
        Subscribe `handler` to `event_type`, or to every event when no type is given.
        """
        if event_type is None:
            self._catch_all.append(handler)
        else:
            self._handlers[event_type].append(handler)

    def events_of(self, event_type: Type[E], aggregate_id: Optional[str] = None) -> List[E]:
        return [
            event
            for event in self._recent
            if isinstance(event, event_type) and (aggregate_id is None or event.aggregate_id == aggregate_id)
        ]
