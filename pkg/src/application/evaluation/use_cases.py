from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.application.data.use_cases import LoadSplitUseCase, Split
from src.application.shared.dtos import EvaluationResultDTO, RecommendationDTO, TopKResultDTO
from src.application.shared.exceptions import ConflictError, NotFoundError, ValidationError, domain_errors
from src.domain.data.value_objects import Protocol
from src.domain.evaluation.entities import MetricReport
from src.domain.evaluation.services import evaluate, top_k
from src.domain.model.entities import GraphRecommender
from src.domain.model.repositories import CheckpointRepository
from src.domain.model.services import build_graph
from src.domain.training.repositories import RunRepository
from src.domain.training.value_objects import RunConfig


def report_dto(report: MetricReport, path: Path) -> EvaluationResultDTO:
    summary = report.summary()
    return EvaluationResultDTO(
        part=report.part,
        path=str(path),
        users_evaluated=report.users_evaluated,
        users_skipped=len(report.users_skipped),
        ndcg=summary["ndcg"],
        recall=summary["recall"],
        ap=summary["ap"],
    )


class LoadTrainedModelUseCase:
    """
    Use case for rebuilding a trained model from a run directory.
    """

    def __init__(self, load_split_use_case: LoadSplitUseCase, checkpoint_repository: CheckpointRepository):
        self._load_split = load_split_use_case
        self._checkpoint_repository = checkpoint_repository

    def execute(self, runs: RunRepository, checkpoint_path: Optional[Path] = None) -> Tuple[Split, GraphRecommender]:
        """
        Raises:
            NotFoundError: If the split or the checkpoint is missing
            ConflictError: If the checkpoint does not belong to the split's training graph
        """
        split = self._load_split.execute(runs)
        path = Path(checkpoint_path) if checkpoint_path else runs.checkpoint_path()
        if not self._checkpoint_repository.exists(path):
            raise NotFoundError(f"No checkpoint at {path}; run the train command first", extra={"path": str(path)})

        with domain_errors():
            checkpoint = self._checkpoint_repository.load(path)
            graph = build_graph(split.train)

        if checkpoint.graph_fingerprint != graph.fingerprint:
            raise ConflictError(
                f"Checkpoint {path} was trained on a different graph",
                extra={"checkpoint": checkpoint.graph_fingerprint, "graph": graph.fingerprint},
            )
        model = GraphRecommender(id=str(path), config=checkpoint.config, graph=graph, embeddings=checkpoint.table)
        return split, model


class EvaluateUseCase:
    """
    Use case for all-ranking reports of a trained run.
    """

    def __init__(self, load_trained_model_use_case: LoadTrainedModelUseCase):
        self._load_model = load_trained_model_use_case

    def execute(
        self,
        config: RunConfig,
        runs: RunRepository,
        parts: Sequence[str] = ("validation", "test"),
        checkpoint_path: Optional[Path] = None,
        n_jobs: Optional[int] = None,
    ) -> List[EvaluationResultDTO]:
        split, model = self._load_model.execute(runs, checkpoint_path)
        results = []
        for part in parts:
            with domain_errors():
                report = evaluate(
                    split, model, ks=config.training.ks, part=part, n_jobs=n_jobs or config.training.n_jobs
                )
            report.config_hash = config.config_hash()
            path = runs.write_json(RunRepository.report_name(part), report.to_dict())
            results.append(report_dto(report, path))
        return results


class TopKUseCase:
    """
    Use case for dumping ranked top-k lists of some users, in raw ids.
    """

    def __init__(self, load_trained_model_use_case: LoadTrainedModelUseCase):
        self._load_model = load_trained_model_use_case

    def execute(
        self,
        runs: RunRepository,
        users: Optional[Iterable[str]] = None,
        k: int = 20,
        part: str = "test",
        limit: int = 10,
    ) -> TopKResultDTO:
        """
        `users` are raw user ids; by default the first `limit` users of `part` are listed.
        """
        split, model = self._load_model.execute(runs)
        ids = self._resolve(split, users, part, limit)
        with domain_errors():
            lists = top_k(split, model, ids, k=k, part=part)

        dataset = split.train
        payload = {
            dataset.user_label(user): [
                RecommendationDTO(rank=entry.rank, item=entry.label, score=entry.score) for entry in entries
            ]
            for user, entries in lists
        }
        users_json = {
            user: [{"rank": r.rank, "item": r.item, "score": r.score} for r in entries]
            for user, entries in payload.items()
        }
        path = runs.write_json(RunRepository.TOPK, {"k": k, "part": part, "users": users_json})
        return TopKResultDTO(path=str(path), k=k, lists=payload)

    @staticmethod
    def _resolve(split: Split, users: Optional[Iterable[str]], part: str, limit: int) -> np.ndarray:
        dataset = split.train
        if users is None:
            if split.protocol is Protocol.TRANSDUCTIVE:
                candidates = dataset.active_users()
            else:
                candidates = split.users_of(part)
            return np.asarray(candidates[:limit], dtype=np.int64)

        users = [str(user) for user in users]
        labels = {dataset.user_label(u): u for u in range(dataset.num_users)}
        unknown = [user for user in users if user not in labels]
        if unknown:
            raise ValidationError(f"Unknown user id(s): {unknown[:10]}", extra={"users": unknown})
        return np.asarray([labels[user] for user in users], dtype=np.int64)
