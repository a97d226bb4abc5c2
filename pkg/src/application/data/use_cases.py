import logging
from pathlib import Path
from typing import Optional, Union

from src.application.shared.dtos import DatasetSummaryDTO, SplitResultDTO
from src.application.shared.exceptions import NotFoundError, domain_errors
from src.domain.data.entities import Dataset, InductiveSplit, TransductiveSplit
from src.domain.data.events import CoverageRepairedEvent, DatasetPreparedEvent, SplitCreatedEvent
from src.domain.data.repositories import InteractionReader, SplitRepository
from src.domain.data.services import (
    assert_item_coverage,
    filter_min_interactions,
    split_inductive,
    split_transductive,
)
from src.domain.data.value_objects import Protocol
from src.domain.shared.events import DomainEventPublisher
from src.domain.training.repositories import RunRepository
from src.domain.training.value_objects import DatasetConfig, RunConfig

Split = Union[TransductiveSplit, InductiveSplit]

logger = logging.getLogger(__name__)


class PrepareDatasetUseCase:
    """
    Use case for loading an interaction file: rating threshold first, then the
    min-interaction fixpoint.
    """

    def __init__(self, reader: InteractionReader, event_publisher: Optional[DomainEventPublisher] = None):
        self._reader = reader
        self._event_publisher = event_publisher

    def execute(self, config: DatasetConfig) -> Dataset:
        """
        Raises:
            NotFoundError: If the file does not exist
            ValidationError: If a row cannot be parsed or nothing is left after filtering
        """
        if not config.path:
            raise NotFoundError("No dataset path configured", extra={"field": "dataset.path"})
        with domain_errors():
            dataset = self._reader.read(Path(config.path), config.rating_threshold)
            dataset = filter_min_interactions(dataset, config.min_interactions)

        if self._event_publisher:
            self._event_publisher.publish(
                DatasetPreparedEvent(
                    num_users=dataset.num_users, num_items=dataset.num_items, num_interactions=len(dataset)
                )
            )
        return dataset


class CreateSplitUseCase:
    """
    Use case for producing and storing the split of a run.
    """

    def __init__(
        self,
        prepare_dataset_use_case: PrepareDatasetUseCase,
        split_repository: SplitRepository,
        event_publisher: Optional[DomainEventPublisher] = None,
    ):
        self._prepare_dataset = prepare_dataset_use_case
        self._split_repository = split_repository
        self._event_publisher = event_publisher

    def build(self, config: RunConfig) -> Split:
        dataset = self._prepare_dataset.execute(config.dataset)
        params = config.split
        with domain_errors():
            if params.protocol is Protocol.TRANSDUCTIVE:
                split = split_transductive(dataset, params.rho, config.seed)
            else:
                split = split_inductive(dataset, params.mu, params.eta, config.seed)
            assert_item_coverage(split)
        return split

    def execute(self, config: RunConfig, runs: RunRepository) -> SplitResultDTO:
        split = self.build(config)
        runs.write_json(RunRepository.CONFIG, config.to_dict())
        path = self._split_repository.save(split, runs.split_path())
        counts, dropped = _split_counts(split)

        if self._event_publisher:
            self._event_publisher.publish(
                SplitCreatedEvent(
                    aggregate_id=str(runs.run_dir()),
                    protocol=split.protocol.value,
                    seed=split.seed,
                    counts=counts,
                    dropped=dropped,
                )
            )
            repair = _coverage_repair(split, aggregate_id=str(runs.run_dir()))
            if repair is not None:
                self._event_publisher.publish(repair)

        if isinstance(split, InductiveSplit):
            source, total = split.dataset, len(split.dataset)
        else:
            source, total = split.train, len(split.train) + len(split.validation) + len(split.test)
        return SplitResultDTO(
            protocol=split.protocol.value,
            seed=split.seed,
            path=str(path),
            dataset=DatasetSummaryDTO(
                num_users=source.num_users,
                num_items=source.num_items,
                num_interactions=total,
            ),
            counts=counts,
            dropped=dropped,
        )


class LoadSplitUseCase:
    """
    Use case for reading the split stored in a run directory.
    """

    def __init__(self, split_repository: SplitRepository):
        self._split_repository = split_repository

    def execute(self, runs: RunRepository) -> Split:
        path = runs.split_path()
        if not self._split_repository.exists(path):
            raise NotFoundError(
                f"No split found in {runs.run_dir()}; run the split command first", extra={"path": str(path)}
            )
        with domain_errors():
            return self._split_repository.load(path)


def _split_counts(split: Split):
    if isinstance(split, TransductiveSplit):
        counts = {"train": len(split.train), "validation": len(split.validation), "test": len(split.test)}
        return counts, {"moved_to_train": split.moved_to_train}
    counts = {
        "train_users": int(split.train_users.size),
        "validation_users": int(split.val_users.size),
        "test_users": int(split.test_users.size),
        "train": len(split.train),
        "fold_in": int(sum(items.size for items in split.fold_in.values())),
        "fold_out": int(sum(items.size for items in split.fold_out.values())),
    }
    return counts, {"interactions": split.dropped_interactions, "users": split.dropped_users}


def _coverage_repair(split: Split, aggregate_id: str) -> Optional[CoverageRepairedEvent]:
    if isinstance(split, TransductiveSplit):
        if not split.moved_to_train:
            return None
        return CoverageRepairedEvent(
            aggregate_id=aggregate_id, protocol=split.protocol.value, moved_to_train=split.moved_to_train
        )
    if not split.dropped_interactions:
        return None
    return CoverageRepairedEvent(
        aggregate_id=aggregate_id,
        protocol=split.protocol.value,
        dropped_interactions=split.dropped_interactions,
        dropped_users=split.dropped_users,
    )


def ensure_split(
    config: RunConfig, runs: RunRepository, create_split: CreateSplitUseCase, load_split: LoadSplitUseCase
) -> Split:
    """The split stored in `runs`, created first when the run directory has none."""
    if not runs.split_path().exists():
        logger.info(f"No split in {runs.run_dir()}, creating it")
        create_split.execute(config, runs)
    return load_split.execute(runs)
