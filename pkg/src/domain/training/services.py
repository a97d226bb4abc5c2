"""
Training domain services: batch construction, loss and gradients of a batch,
the optimizer step, epochs and early stopping.
"""

import logging
import time
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.domain.data.entities import Dataset
from src.domain.losses.services import loss_and_grad
from src.domain.losses.value_objects import BatchScores, LossConfig
from src.domain.model.entities import EmbeddingTable, GraphRecommender
from src.domain.model.optimizer import AdamState, adam_step
from src.domain.model.services import backward, forward
from src.domain.ppr.services import NegativeSamplerProvider, sample_negatives
from src.domain.shared.exceptions import InvalidValueError, NumericalError
from src.domain.training.entities import EpochRecord, TrainingBatch
from src.domain.training.value_objects import OptimizerConfig, RunConfig, StopDecision

logger = logging.getLogger(__name__)


def build_batch(
    users: Sequence[int],
    train: Dataset,
    sampler: NegativeSamplerProvider,
    n_pos: int,
    n_neg: int,
    rng: np.random.Generator,
) -> TrainingBatch:
    """
    Sample n_pos training items (without replacement when the user has enough) and
    n_neg negatives from the user's sampler. Users without training items are skipped.
    """
    if n_pos < 1 or n_neg < 1:
        raise InvalidValueError(f"n_pos and n_neg must be >= 1, got {n_pos}, {n_neg}")

    kept, positives, negatives = [], [], []
    skipped = 0
    for user in users:
        items = train.items_of(int(user))
        if items.size == 0:
            skipped += 1
            continue
        positives.append(rng.choice(items, size=n_pos, replace=items.size < n_pos))
        negatives.append(sample_negatives(sampler.sampler_for(int(user), items), n_neg, rng))
        kept.append(int(user))

    if skipped:
        logger.debug(f"Skipped {skipped} user(s) without training items")
    return TrainingBatch(
        users=np.asarray(kept, dtype=np.int64),
        positives=np.asarray(positives, dtype=np.int64).reshape(len(kept), n_pos),
        negatives=np.asarray(negatives, dtype=np.int64).reshape(len(kept), n_neg),
        skipped=skipped,
    )


def parameter_norms(table: EmbeddingTable) -> Dict[str, float]:
    return {name: float(np.linalg.norm(block)) for name, block in table.parameters().items()}


def _diagnostics(model: GraphRecommender, batch: TrainingBatch, scores: np.ndarray) -> dict:
    return {
        "users": batch.users.tolist(),
        "positives": batch.positives.tolist(),
        "negatives": batch.negatives.tolist(),
        "scores": np.where(np.isfinite(scores), scores, np.nan).tolist(),
        "parameter_norms": parameter_norms(model.embeddings),
    }


def batch_loss_and_grads(
    model: GraphRecommender, batch: TrainingBatch, loss_config: LossConfig, l2: float = 0.0
) -> Tuple[float, Dict[str, np.ndarray]]:
    """
    Mean loss over the users of `batch` plus 0.5 * l2 * ||theta||^2, and its exact
    gradient on every trainable block.
    """
    pooled = forward(model)
    items = batch.items
    scores = np.einsum("bd,bnd->bn", pooled.user_emb[batch.users], pooled.item_emb[items])
    if not np.isfinite(scores).all():
        raise NumericalError("Non-finite scores in batch", block="scores", details=_diagnostics(model, batch, scores))

    n_pos = batch.n_pos
    size = len(batch)
    total = 0.0
    score_grads = np.empty_like(scores)
    for row in range(size):
        value, (grad_pos, grad_neg) = loss_and_grad(
            loss_config.variant, BatchScores(scores[row, :n_pos], scores[row, n_pos:]), loss_config
        )
        total += value
        score_grads[row, :n_pos] = grad_pos / size
        score_grads[row, n_pos:] = grad_neg / size

    loss = total / size
    grads = backward(model, batch.users, items, score_grads)
    if l2 > 0:
        for name, block in model.embeddings.parameters().items():
            loss += 0.5 * l2 * float(np.sum(block * block))
            grads[name] = grads[name] + l2 * block

    if not np.isfinite(loss):
        raise NumericalError(f"Non-finite loss {loss}", block="loss", details=_diagnostics(model, batch, scores))
    return loss, grads


def train_step(
    model: GraphRecommender, batch: TrainingBatch, loss_config: LossConfig, l2: float, state: AdamState
) -> float:
    """One Adam update on `model` from `batch`; returns the batch loss before the update."""
    loss, grads = batch_loss_and_grads(model, batch, loss_config, l2)
    adam_step(model.embeddings.parameters(), grads, state)
    model.invalidate()
    model.embeddings.assert_finite()
    return loss


def adam_state_for(config: OptimizerConfig) -> AdamState:
    return AdamState(lr=config.lr, beta1=config.beta1, beta2=config.beta2, eps=config.eps)


def user_batches(users: np.ndarray, batch_users: int, rng: np.random.Generator) -> List[np.ndarray]:
    """Shuffled partition of `users` into chunks of `batch_users`."""
    shuffled = rng.permutation(users)
    return [shuffled[start : start + batch_users] for start in range(0, shuffled.size, batch_users)]


def run_epoch(
    epoch: int,
    model: GraphRecommender,
    train: Dataset,
    sampler: NegativeSamplerProvider,
    config: RunConfig,
    state: AdamState,
    rng: np.random.Generator,
) -> EpochRecord:
    """One pass over every training user."""
    started = time.perf_counter()
    weighted_loss, seen, skipped = 0.0, 0, 0
    for users in user_batches(train.active_users(), config.training.batch_users, rng):
        batch = build_batch(users, train, sampler, config.sampling.n_pos, config.sampling.n_neg, rng)
        skipped += batch.skipped
        if len(batch) == 0:
            continue
        loss = train_step(model, batch, config.loss, config.optimizer.l2, state)
        weighted_loss += loss * len(batch)
        seen += len(batch)

    return EpochRecord(
        epoch=epoch,
        loss=weighted_loss / seen if seen else 0.0,
        seconds=time.perf_counter() - started,
        users=seen,
        skipped=skipped,
    )


def early_stop(history: Sequence[float], patience: int) -> StopDecision:
    """
    Stop once the best value (first occurrence) is `patience` or more evaluations old.
    """
    if patience < 1:
        raise InvalidValueError(f"patience must be >= 1, got {patience}")
    if not len(history):
        return StopDecision.CONTINUE
    best = int(np.argmax(history))
    if len(history) - 1 - best >= patience:
        return StopDecision.STOP
    return StopDecision.CONTINUE


_STREAMS = ("init", "batches")


def rng_stream(seed: int, name: str) -> np.random.Generator:
    """Independent named RNG stream derived from the run seed."""
    if name not in _STREAMS:
        raise InvalidValueError(f"Unknown RNG stream '{name}'")
    children = np.random.SeedSequence(seed).spawn(len(_STREAMS))
    return np.random.default_rng(children[_STREAMS.index(name)])
