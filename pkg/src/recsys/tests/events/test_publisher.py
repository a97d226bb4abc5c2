import unittest

from src.domain.data.events import SplitCreatedEvent
from src.domain.training.events import EpochCompletedEvent
from src.infrastructure.events.publisher import InMemoryEventPublisher


class InMemoryEventPublisherTests(unittest.TestCase):
    def setUp(self):
        self.publisher = InMemoryEventPublisher(history=3)

    def test_handlers_receive_their_event_type(self):
        epochs, everything = [], []
        self.publisher.subscribe(epochs.append, event_type=EpochCompletedEvent)
        self.publisher.subscribe(everything.append)

        epoch = EpochCompletedEvent(aggregate_id="run", epoch=1, loss=0.5, seconds=0.1)
        split = SplitCreatedEvent(aggregate_id="run", protocol="transductive", seed=0)
        self.publisher.publish(epoch)
        self.publisher.publish(split)

        self.assertEqual([epoch], epochs)
        self.assertEqual([epoch, split], everything)

    def test_failing_handler_does_not_stop_the_others(self):
        received = []

        def broken(event):
            raise RuntimeError("handler bug")

        self.publisher.subscribe(broken, event_type=EpochCompletedEvent)
        self.publisher.subscribe(received.append, event_type=EpochCompletedEvent)

        with self.assertLogs("src.infrastructure.events.publisher", level="ERROR"):
            self.publisher.publish(EpochCompletedEvent(epoch=1, loss=0.5, seconds=0.1))

        self.assertEqual(1, len(received))

    def test_recent_events_are_bounded_and_filterable(self):
        for epoch in range(1, 5):
            event = EpochCompletedEvent(aggregate_id=f"run-{epoch % 2}", epoch=epoch, loss=1.0, seconds=0)
            self.publisher.publish(event)

        self.assertEqual([2, 3, 4], [event.epoch for event in self.publisher.events_of(EpochCompletedEvent)])
        self.assertEqual([2, 4], [event.epoch for event in self.publisher.events_of(EpochCompletedEvent, "run-0")])
        self.assertEqual([], self.publisher.events_of(SplitCreatedEvent))

    def test_event_metadata(self):
        first = EpochCompletedEvent(epoch=1, loss=0.5, seconds=0.1)
        second = EpochCompletedEvent(epoch=1, loss=0.5, seconds=0.1)

        self.assertEqual("EpochCompletedEvent", first.name)
        self.assertNotEqual(first.event_id, second.event_id)
        self.assertIsNotNone(first.occurred_at.tzinfo)
