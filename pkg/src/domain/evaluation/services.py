"""
Evaluation domain services: all-ranking, exact metrics and the evaluation harness.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from src.domain.data.entities import InductiveSplit, TransductiveSplit
from src.domain.data.value_objects import Protocol
from src.domain.evaluation.entities import MetricReport, RankingResult, Recommendation, UserMetrics
from src.domain.losses.services import ideal_dcg
from src.domain.model.entities import EmbeddingTable, GraphRecommender
from src.domain.model.services import infer_users, item_layers_of, layer_weights, pool, propagate
from src.domain.shared.exceptions import ConfigurationError, InvalidValueError

logger = logging.getLogger(__name__)

Split = Union[TransductiveSplit, InductiveSplit]
# observer(user, item ids the user's representation and exclusions were built from)
Observer = Callable[[int, np.ndarray], None]

PARTS = ("validation", "test")


def rank_all_items(
    user_vec: np.ndarray,
    item_embs: np.ndarray,
    exclusions: Sequence[int],
    positives: Sequence[int] = (),
    user: int = -1,
) -> RankingResult:
    """
    Score every item not in `exclusions` and sort by descending score, ties by
    ascending item id. `positives` only sets the relevance vector.
    """
    scores = item_embs @ user_vec
    candidate_mask = np.ones(item_embs.shape[0], dtype=bool)
    candidate_mask[np.asarray(exclusions, dtype=np.int64)] = False
    candidates = np.flatnonzero(candidate_mask)
    if candidates.size == 0:
        raise InvalidValueError(f"User {user} has no candidate item left to rank", details={"user": user})

    candidate_scores = scores[candidates]
    order = np.lexsort((candidates, -candidate_scores))
    ranked = candidates[order]
    relevance = np.isin(ranked, np.asarray(positives, dtype=np.int64)).astype(np.int8)
    return RankingResult(user=user, ranked_items=ranked, relevance=relevance, scores=candidate_scores[order])


def _check_k(k: int) -> None:
    if k < 1:
        raise InvalidValueError(f"k must be >= 1, got {k}")


def ndcg_at_k(result: RankingResult, k: int) -> float:
    _check_k(k)
    n_relevant = result.num_relevant
    if n_relevant == 0:
        return 0.0
    top = result.relevance[:k]
    dcg = float((top / np.log2(np.arange(2, top.size + 2))).sum())
    return dcg / ideal_dcg(min(n_relevant, k))


def recall_at_k(result: RankingResult, k: int) -> float:
    _check_k(k)
    n_relevant = result.num_relevant
    if n_relevant == 0:
        return 0.0
    return float(result.relevance[:k].sum()) / min(n_relevant, k)


def average_precision(result: RankingResult) -> float:
    """Mean over positives of (positives at or above p) / rank(p) on the full ranking."""
    positions = np.flatnonzero(result.relevance) + 1
    if positions.size == 0:
        return 0.0
    return float(np.mean(np.arange(1, positions.size + 1) / positions))


@dataclass(frozen=True)
class _Query:
    user: int
    vector: np.ndarray
    exclusions: np.ndarray
    positives: np.ndarray


def _check_mode(split: Split, model: GraphRecommender) -> None:
    if split.protocol is not model.config.mode:
        raise ConfigurationError(
            f"Split protocol '{split.protocol.value}' does not match model mode '{model.config.mode.value}'",
            details={"split": split.protocol.value, "model": model.config.mode.value},
        )


def _check_part(part: str) -> None:
    if part not in PARTS:
        raise InvalidValueError(f"Unknown evaluation part '{part}'", details={"part": part})


def _representations(
    split: Split, model: GraphRecommender, users: np.ndarray, table: Optional[EmbeddingTable]
) -> Tuple[np.ndarray, np.ndarray, List[np.ndarray]]:
    """User vectors, pooled item table and per-user exclusions for `users`."""
    config = model.config
    table = table or model.embeddings
    if split.protocol is Protocol.TRANSDUCTIVE:
        pooled = pool(propagate(model.graph, table, config.layers), config.pooling)
        exclusions = [split.train.items_of(u) for u in users]
        return pooled.user_emb[users], pooled.item_emb, exclusions

    item_layers = item_layers_of(model, table)
    _, item_weights = layer_weights(len(item_layers), config.pooling, inductive=True)
    item_embs = sum(w * layer for w, layer in zip(item_weights, item_layers))
    fold_ins = [split.fold_in[int(u)] for u in users]
    if not fold_ins:
        return np.zeros((0, table.dim)), item_embs, []
    return infer_users(fold_ins, item_layers, model.graph, config), item_embs, fold_ins


def _positives(split: Split, user: int, part: str) -> np.ndarray:
    if split.protocol is Protocol.TRANSDUCTIVE:
        return getattr(split, part).items_of(user)
    return split.fold_out.get(int(user), np.empty(0, dtype=np.int64))


def _score_query(query: _Query, item_embs: np.ndarray, ks: Tuple[int, ...]) -> UserMetrics:
    result = rank_all_items(query.vector, item_embs, query.exclusions, query.positives, user=query.user)
    return UserMetrics(
        user=query.user,
        ndcg={k: ndcg_at_k(result, k) for k in ks},
        recall={k: recall_at_k(result, k) for k in ks},
        ap=average_precision(result),
        num_positives=result.num_relevant,
    )


def _score_chunk(queries: List[_Query], item_embs: np.ndarray, ks: Tuple[int, ...]) -> List[UserMetrics]:
    return [_score_query(query, item_embs, ks) for query in queries]


def evaluate(
    split: Split,
    model: GraphRecommender,
    ks: Sequence[int] = (20,),
    part: str = "test",
    n_jobs: int = 1,
    observer: Optional[Observer] = None,
    table: Optional[EmbeddingTable] = None,
    chunk_size: int = 256,
) -> MetricReport:
    """
    All-ranking evaluation of `model` on the validation or test part of `split`.

    Transductive users are represented by their trained embedding and exclude their
    training items; inductive users are inferred from their fold-in items, which are
    also excluded. `table` overrides the model parameters (e.g. the stored precision).
    """
    _check_mode(split, model)
    _check_part(part)
    ks = tuple(sorted(set(int(k) for k in ks)))
    for k in ks:
        _check_k(k)

    if split.protocol is Protocol.TRANSDUCTIVE:
        users = split.train.active_users()
    else:
        users = split.users_of(part)

    report = MetricReport(ks=ks, part=part)
    positives = {int(u): _positives(split, u, part) for u in users}
    evaluated = np.asarray([u for u in users if positives[int(u)].size > 0], dtype=np.int64)
    report.users_skipped = [int(u) for u in users if positives[int(u)].size == 0]
    if report.users_skipped:
        logger.info(f"Skipped {len(report.users_skipped)} {part} user(s) without positives")

    vectors, item_embs, exclusions = _representations(split, model, evaluated, table)
    queries = []
    for row, user in enumerate(evaluated):
        if observer is not None:
            observer(int(user), exclusions[row])
        queries.append(_Query(int(user), vectors[row], exclusions[row], positives[int(user)]))

    chunks = [queries[start : start + chunk_size] for start in range(0, len(queries), chunk_size)]
    if n_jobs == 1:
        results = [_score_chunk(chunk, item_embs, ks) for chunk in chunks]
    else:
        results = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_score_chunk)(chunk, item_embs, ks) for chunk in chunks
        )
    report.per_user = [row for chunk in results for row in chunk]
    return report


def top_k(
    split: Split,
    model: GraphRecommender,
    users: Sequence[int],
    k: int = 20,
    part: str = "test",
    table: Optional[EmbeddingTable] = None,
) -> List[Tuple[int, List[Recommendation]]]:
    """
    Ranked top-k lists for `users`, excluding their training (or fold-in) items.
    """
    _check_mode(split, model)
    _check_part(part)
    _check_k(k)

    users = np.asarray(users, dtype=np.int64)
    if split.protocol is Protocol.INDUCTIVE:
        unknown = [int(u) for u in users if int(u) not in split.fold_in]
        if unknown:
            raise InvalidValueError(f"Users {unknown[:10]} have no fold-in part", details={"users": unknown})
    vectors, item_embs, exclusions = _representations(split, model, users, table)

    dataset = split.train
    lists = []
    for row, user in enumerate(users):
        result = rank_all_items(vectors[row], item_embs, exclusions[row], user=int(user))
        lists.append(
            (
                int(user),
                [
                    Recommendation(rank=rank, item=int(item), label=dataset.item_label(int(item)), score=float(value))
                    for rank, (item, value) in enumerate(zip(result.ranked_items[:k], result.scores[:k]), start=1)
                ],
            )
        )
    return lists
