import logging
import time
import uuid
from contextlib import nullcontext
from pathlib import Path
from typing import Callable, ContextManager, Optional

from src.application.data.use_cases import CreateSplitUseCase, LoadSplitUseCase, Split, ensure_split
from src.application.evaluation.use_cases import report_dto
from src.application.ppr.use_cases import LoadPPRCacheUseCase
from src.application.shared.dtos import TrainingResultDTO
from src.application.shared.exceptions import TrainingAbortedError, domain_errors
from src.domain.evaluation.services import evaluate
from src.domain.model.entities import BipartiteGraph, Checkpoint, GraphRecommender
from src.domain.model.repositories import CheckpointRepository
from src.domain.model.services import build_graph, init_embeddings
from src.domain.ppr.services import NegativeSamplerProvider, UniformSamplerProvider
from src.domain.shared.events import DomainEventPublisher
from src.domain.shared.exceptions import NumericalError
from src.domain.training.entities import TrainingRun
from src.domain.training.events import (
    CheckpointSavedEvent,
    EpochCompletedEvent,
    TrainingFinishedEvent,
    ValidationCompletedEvent,
)
from src.domain.training.repositories import RunRepository
from src.domain.training.services import adam_state_for, early_stop, rng_stream, run_epoch
from src.domain.training.value_objects import RunConfig, SamplingStrategy, StopDecision

logger = logging.getLogger(__name__)


class TrainModelUseCase:
    """
    Use case for a full training run: split, sampler, epochs with periodic validation
    and early stopping, best checkpoint and final reports.
    """

    def __init__(
        self,
        create_split_use_case: CreateSplitUseCase,
        load_split_use_case: LoadSplitUseCase,
        load_ppr_cache_use_case: LoadPPRCacheUseCase,
        checkpoint_repository: CheckpointRepository,
        event_publisher: Optional[DomainEventPublisher] = None,
        run_log: Optional[Callable[[Path], ContextManager]] = None,
    ):
        self._create_split = create_split_use_case
        self._load_split = load_split_use_case
        self._load_ppr_cache = load_ppr_cache_use_case
        self._checkpoint_repository = checkpoint_repository
        self._event_publisher = event_publisher
        self._run_log = run_log or (lambda path: nullcontext())

    def execute(self, config: RunConfig, runs: RunRepository) -> TrainingResultDTO:
        """
        Raises:
            NotFoundError: If the dataset or a configured PPR cache is missing
            ValidationError: If the configuration cannot be honoured for the data
            TrainingAbortedError: If the loss became non-finite
        """
        with self._run_log(runs.log_path()):
            runs.write_json(RunRepository.CONFIG, config.to_dict())
            split = ensure_split(config, runs, self._create_split, self._load_split)
            with domain_errors():
                graph = build_graph(split.train)
                model = GraphRecommender(
                    id=str(uuid.uuid4()),
                    config=config.model,
                    graph=graph,
                    embeddings=init_embeddings(
                        graph.num_users, graph.num_items, config.model, rng_stream(config.seed, "init")
                    ),
                )
            sampler = self._sampler(config, graph, split, runs)
            run = TrainingRun(id=model.id, config=config)
            logger.info(
                f"Training {config.loss.variant.value} loss, {config.sampling.strategy.value} negatives, "
                f"{graph.num_users} users x {graph.num_items} items, config {config.config_hash()[:12]}"
            )
            with domain_errors():
                self._train(run, model, split, sampler, runs)
            return self._finish(run, model, split, runs)

    def _sampler(
        self, config: RunConfig, graph: BipartiteGraph, split: Split, runs: RunRepository
    ) -> NegativeSamplerProvider:
        if config.sampling.strategy is SamplingStrategy.UNIFORM:
            return UniformSamplerProvider(graph.num_items)
        path = Path(config.sampling.cache_path) if config.sampling.cache_path else runs.ppr_cache_path()
        return self._load_ppr_cache.sampler(path, graph, split.train.active_users(), scale=config.sampling.scale)

    def _train(
        self,
        run: TrainingRun,
        model: GraphRecommender,
        split: Split,
        sampler: NegativeSamplerProvider,
        runs: RunRepository,
    ) -> None:
        config = run.config
        state = adam_state_for(config.optimizer)
        rng = rng_stream(config.seed, "batches")
        training = config.training

        for epoch in range(1, training.max_epochs + 1):
            try:
                record = run_epoch(epoch, model, split.train, sampler, config, state, rng)
            except NumericalError as e:
                self._abort(run, runs, epoch, e)
            run.record_epoch(record)
            self._publish(
                EpochCompletedEvent(aggregate_id=run.id, epoch=epoch, loss=record.loss, seconds=record.seconds)
            )

            if epoch % training.eval_every and epoch != training.max_epochs:
                continue
            if self._validate(run, model, split, runs, epoch) is StopDecision.STOP:
                run.finish("early_stop")
                break
        else:
            run.finish("max_epochs")

    def _validate(
        self, run: TrainingRun, model: GraphRecommender, split: Split, runs: RunRepository, epoch: int
    ) -> StopDecision:
        training = run.config.training
        started = time.perf_counter()
        # validation sees the parameters at checkpoint precision
        table = model.embeddings.quantized()
        with domain_errors():
            report = evaluate(split, model, ks=training.ks, part="validation", n_jobs=training.n_jobs, table=table)
        report.config_hash = run.config.config_hash()
        improved = run.record_validation(epoch, report, time.perf_counter() - started, table)
        self._publish(
            ValidationCompletedEvent(
                aggregate_id=run.id,
                epoch=epoch,
                target=run.validations[-1].target,
                improved=improved,
                metrics=report.summary(),
            )
        )
        if improved:
            self._save_checkpoint(run, model, runs)
        return early_stop(run.target_history, training.patience)

    def _save_checkpoint(self, run: TrainingRun, model: GraphRecommender, runs: RunRepository) -> None:
        checkpoint = Checkpoint(
            config=model.config,
            table=run.best_table,
            num_users=model.graph.num_users,
            num_items=model.graph.num_items,
            seed=run.config.seed,
            graph_fingerprint=model.graph.fingerprint,
            epoch=run.best_epoch,
            metrics=run.validation_report.summary(),
        )
        path = self._checkpoint_repository.save(checkpoint, runs.checkpoint_path())
        self._publish(CheckpointSavedEvent(aggregate_id=run.id, path=str(path), epoch=run.best_epoch))

    def _abort(self, run: TrainingRun, runs: RunRepository, epoch: int, error: NumericalError):
        run.finish("diverged")
        diagnostics = {"epoch": epoch, "message": error.message, **error.details}
        path = runs.write_json(RunRepository.DIAGNOSTICS, diagnostics)
        runs.write_json(RunRepository.HISTORY, run.history())
        self._publish(
            TrainingFinishedEvent(aggregate_id=run.id, reason="diverged", best_epoch=run.best_epoch, epochs=epoch)
        )
        logger.error(f"Training diverged in epoch {epoch} ({error.message}); diagnostics in {path}")
        raise TrainingAbortedError(
            f"Training diverged in epoch {epoch}: {error.message}",
            extra={"diagnostics": str(path), "block": error.block, "epoch": epoch},
        ) from error

    def _finish(
        self, run: TrainingRun, model: GraphRecommender, split: Split, runs: RunRepository
    ) -> TrainingResultDTO:
        config = run.config
        training = config.training
        with domain_errors():
            test_report = evaluate(
                split, model, ks=training.ks, part="test", n_jobs=training.n_jobs, table=run.best_table
            )
        test_report.config_hash = config.config_hash()
        run.test_report = test_report

        validation_path = runs.write_json(RunRepository.report_name("validation"), run.validation_report.to_dict())
        test_path = runs.write_json(RunRepository.report_name("test"), test_report.to_dict())
        runs.write_json(RunRepository.HISTORY, run.history())
        runs.write_json(
            RunRepository.SUMMARY,
            {
                "run_id": run.id,
                "config_hash": config.config_hash(),
                "best_epoch": run.best_epoch,
                "stop_reason": run.stop_reason,
                "epochs": len(run.epochs),
                "wall_seconds": run.elapsed_seconds,
                "validation": run.validation_report.to_dict(include_users=False),
                "test": test_report.to_dict(include_users=False),
            },
        )
        self._publish(
            TrainingFinishedEvent(
                aggregate_id=run.id, reason=run.stop_reason, best_epoch=run.best_epoch, epochs=len(run.epochs)
            )
        )
        return TrainingResultDTO(
            run_id=run.id,
            run_dir=str(runs.run_dir()),
            checkpoint_path=str(runs.checkpoint_path()),
            best_epoch=run.best_epoch,
            stop_reason=run.stop_reason,
            epochs=len(run.epochs),
            validation=report_dto(run.validation_report, validation_path),
            test=report_dto(test_report, test_path),
        )

    def _publish(self, event) -> None:
        if self._event_publisher:
            self._event_publisher.publish(event)
