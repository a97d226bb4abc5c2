"""
Event handlers - subscribe to domain events and log them.
"""

import logging

from src.domain.data.events import CoverageRepairedEvent, DatasetPreparedEvent, SplitCreatedEvent
from src.domain.ppr.events import PPRComputedEvent
from src.domain.training.events import (
    CheckpointSavedEvent,
    EpochCompletedEvent,
    TrainingFinishedEvent,
    ValidationCompletedEvent,
)

logger = logging.getLogger(__name__)


def handle_dataset_prepared(event: DatasetPreparedEvent):
    logger.info(
        f"Dataset ready: {event.num_users} users, {event.num_items} items, {event.num_interactions} interactions"
    )


def handle_split_created(event: SplitCreatedEvent):
    logger.info(f"Created {event.protocol} split (seed {event.seed}): {event.counts}, dropped {event.dropped}")


def handle_coverage_repaired(event: CoverageRepairedEvent):
    if event.moved_to_train:
        logger.warning(f"Moved {event.moved_to_train} held-out interaction(s) on items unseen in train into train")
    if event.dropped_interactions:
        logger.warning(
            f"Dropped {event.dropped_interactions} held-out interaction(s) on items unseen in train"
            f" ({event.dropped_users} user(s) left without held-out items)"
        )


def handle_ppr_computed(event: PPRComputedEvent):
    logger.info(f"PPR cache ready for {event.num_users} users (T={event.top_t}, scale={event.scale})")
    if event.not_converged:
        logger.warning(f"{event.not_converged} PPR vector(s) stopped at max_iter")


def handle_epoch_completed(event: EpochCompletedEvent):
    logger.info(f"Epoch {event.epoch}: loss {event.loss:.6f} ({event.seconds:.1f}s)")


def handle_validation_completed(event: ValidationCompletedEvent):
    marker = " (best)" if event.improved else ""
    logger.info(f"Validation after epoch {event.epoch}: target {event.target:.4f}{marker}")


def handle_checkpoint_saved(event: CheckpointSavedEvent):
    logger.info(f"Checkpoint of epoch {event.epoch} written to {event.path}")


def handle_training_finished(event: TrainingFinishedEvent):
    logger.info(f"Training stopped ({event.reason}) after {event.epochs} epoch(s); best epoch {event.best_epoch}")
