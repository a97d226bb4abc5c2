"""
Dependency injection container.
Provides instances of repositories, the event publisher and use cases.
"""

from pathlib import Path

from src.application.data.use_cases import CreateSplitUseCase, LoadSplitUseCase, PrepareDatasetUseCase
from src.application.evaluation.use_cases import EvaluateUseCase, LoadTrainedModelUseCase, TopKUseCase
from src.application.ppr.use_cases import LoadPPRCacheUseCase, PrecomputePPRUseCase
from src.application.training.use_cases import TrainModelUseCase
from src.domain.data.events import CoverageRepairedEvent, DatasetPreparedEvent, SplitCreatedEvent
from src.domain.data.repositories import InteractionReader, SplitRepository
from src.domain.model.repositories import CheckpointRepository
from src.domain.ppr.events import PPRComputedEvent
from src.domain.ppr.repositories import PPRCacheRepository
from src.domain.training.events import (
    CheckpointSavedEvent,
    EpochCompletedEvent,
    TrainingFinishedEvent,
    ValidationCompletedEvent,
)
from src.domain.training.repositories import RunRepository
from src.infrastructure.events.handlers import (
    handle_checkpoint_saved,
    handle_coverage_repaired,
    handle_dataset_prepared,
    handle_epoch_completed,
    handle_ppr_computed,
    handle_split_created,
    handle_training_finished,
    handle_validation_completed,
)
from src.infrastructure.events.publisher import InMemoryEventPublisher
from src.infrastructure.persistence.checkpoint_repository import FileCheckpointRepository
from src.infrastructure.persistence.interaction_reader import PandasInteractionReader
from src.infrastructure.persistence.ppr_cache_repository import FilePPRCacheRepository
from src.infrastructure.persistence.run_repository import FileRunRepository
from src.infrastructure.persistence.split_repository import FileSplitRepository
from src.infrastructure.run_log import run_log_file


class ServiceContainer:
    """
    Simple dependency injection container.
    """

    def __init__(self):
        # Infrastructure layer
        self._reader: InteractionReader = PandasInteractionReader()
        self._split_repository: SplitRepository = FileSplitRepository()
        self._checkpoint_repository: CheckpointRepository = FileCheckpointRepository()
        self._ppr_cache_repository: PPRCacheRepository = FilePPRCacheRepository()
        self._event_publisher = InMemoryEventPublisher()

        self._event_publisher.subscribe(handle_dataset_prepared, event_type=DatasetPreparedEvent)
        self._event_publisher.subscribe(handle_split_created, event_type=SplitCreatedEvent)
        self._event_publisher.subscribe(handle_coverage_repaired, event_type=CoverageRepairedEvent)
        self._event_publisher.subscribe(handle_ppr_computed, event_type=PPRComputedEvent)
        self._event_publisher.subscribe(handle_epoch_completed, event_type=EpochCompletedEvent)
        self._event_publisher.subscribe(handle_validation_completed, event_type=ValidationCompletedEvent)
        self._event_publisher.subscribe(handle_checkpoint_saved, event_type=CheckpointSavedEvent)
        self._event_publisher.subscribe(handle_training_finished, event_type=TrainingFinishedEvent)

        # Application use cases
        self._prepare_dataset_use_case = PrepareDatasetUseCase(
            reader=self._reader, event_publisher=self._event_publisher
        )
        self._create_split_use_case = CreateSplitUseCase(
            prepare_dataset_use_case=self._prepare_dataset_use_case,
            split_repository=self._split_repository,
            event_publisher=self._event_publisher,
        )
        self._load_split_use_case = LoadSplitUseCase(split_repository=self._split_repository)
        self._precompute_ppr_use_case = PrecomputePPRUseCase(
            cache_repository=self._ppr_cache_repository,
            event_publisher=self._event_publisher,
            create_split_use_case=self._create_split_use_case,
            load_split_use_case=self._load_split_use_case,
        )
        self._load_ppr_cache_use_case = LoadPPRCacheUseCase(cache_repository=self._ppr_cache_repository)
        self._train_model_use_case = TrainModelUseCase(
            create_split_use_case=self._create_split_use_case,
            load_split_use_case=self._load_split_use_case,
            load_ppr_cache_use_case=self._load_ppr_cache_use_case,
            checkpoint_repository=self._checkpoint_repository,
            event_publisher=self._event_publisher,
            run_log=run_log_file,
        )
        self._load_trained_model_use_case = LoadTrainedModelUseCase(
            load_split_use_case=self._load_split_use_case, checkpoint_repository=self._checkpoint_repository
        )
        self._evaluate_use_case = EvaluateUseCase(load_trained_model_use_case=self._load_trained_model_use_case)
        self._top_k_use_case = TopKUseCase(load_trained_model_use_case=self._load_trained_model_use_case)

    def run_repository(self, out_dir: Path) -> RunRepository:
        return FileRunRepository(out_dir)

    @property
    def event_publisher(self) -> InMemoryEventPublisher:
        return self._event_publisher

    @property
    def prepare_dataset_use_case(self) -> PrepareDatasetUseCase:
        return self._prepare_dataset_use_case

    @property
    def create_split_use_case(self) -> CreateSplitUseCase:
        return self._create_split_use_case

    @property
    def load_split_use_case(self) -> LoadSplitUseCase:
        return self._load_split_use_case

    @property
    def precompute_ppr_use_case(self) -> PrecomputePPRUseCase:
        return self._precompute_ppr_use_case

    @property
    def load_ppr_cache_use_case(self) -> LoadPPRCacheUseCase:
        return self._load_ppr_cache_use_case

    @property
    def train_model_use_case(self) -> TrainModelUseCase:
        return self._train_model_use_case

    @property
    def evaluate_use_case(self) -> EvaluateUseCase:
        return self._evaluate_use_case

    @property
    def top_k_use_case(self) -> TopKUseCase:
        return self._top_k_use_case


# Global container instance
_container: ServiceContainer = None


def get_container() -> ServiceContainer:
    """Get the global service container instance."""
    global _container
    if _container is None:
        _container = ServiceContainer()
    return _container
