"""
Loss domain services.

Every smooth loss is a function of the smooth ranks of the positives. With
D[p, j] = sigmoid((s_j - s_p) / tau) and S = D (1 - D) / tau, a loss L with
c_p = dL/drank_p has dL/ds_j = sum_p c_p S[p, j] and an extra
-c_p sum_j S[p, j] on the positive's own score.
"""

from typing import Tuple, Union

import numpy as np
from scipy.special import expit

from src.domain.losses.value_objects import BatchScores, LossConfig, LossVariant
from src.domain.shared.exceptions import InvalidValueError

Gradients = Tuple[np.ndarray, np.ndarray]


def sigmoid_temp(x: Union[float, np.ndarray], tau: float) -> Union[float, np.ndarray]:
    """Temperature sigmoid 1 / (1 + exp(-x / tau)); saturates to 0/1 without overflow."""
    if tau <= 0:
        raise InvalidValueError(f"tau must be > 0, got {tau}")
    out = expit(np.asarray(x, dtype=np.float64) / tau)
    return float(out) if np.ndim(out) == 0 else out


def _pairwise(batch: BatchScores, tau: float, negatives_only: bool = False) -> np.ndarray:
    """D[p, j] over positives p and all batch items j, self terms excluded."""
    num_pos = batch.num_pos
    diff = batch.all_scores[None, :] - batch.pos_scores[:, None]
    pairwise = expit(diff / tau)
    pairwise[np.arange(num_pos), np.arange(num_pos)] = 0.0
    if negatives_only:
        pairwise[:, :num_pos] = 0.0
    return pairwise


def _chain(pairwise: np.ndarray, rank_grad: np.ndarray, tau: float) -> np.ndarray:
    """Push dL/drank through the smooth rank onto every score."""
    slope = pairwise * (1.0 - pairwise) / tau
    grad = rank_grad @ slope
    grad[: rank_grad.size] -= rank_grad * slope.sum(axis=1)
    return grad


def _split(grad: np.ndarray, num_pos: int) -> Gradients:
    return grad[:num_pos], grad[num_pos:]


def smooth_ranks(batch: BatchScores, tau: float, negatives_only: bool = False) -> np.ndarray:
    return 1.0 + _pairwise(batch, tau, negatives_only).sum(axis=1)


def smooth_rank(p_index: int, batch: BatchScores, tau: float, negatives_only: bool = False) -> float:
    """1 + sum over the other batch items of sigmoid((s_j - s_p) / tau)."""
    if not 0 <= p_index < batch.num_pos:
        raise InvalidValueError(f"p_index {p_index} does not address a positive")
    return float(smooth_ranks(batch, tau, negatives_only)[p_index])


def smooth_ranks_pos(batch: BatchScores, tau: float) -> np.ndarray:
    return 1.0 + _pairwise(batch, tau)[:, : batch.num_pos].sum(axis=1)


def smooth_rank_pos(p_index: int, batch: BatchScores, tau: float) -> float:
    """Smooth rank among the positives only."""
    if not 0 <= p_index < batch.num_pos:
        raise InvalidValueError(f"p_index {p_index} does not address a positive")
    return float(smooth_ranks_pos(batch, tau)[p_index])


def ideal_dcg(num_relevant: int) -> float:
    return float((1.0 / np.log2(np.arange(2, num_relevant + 2))).sum())


def _ndcg(batch: BatchScores, config: LossConfig) -> Tuple[float, np.ndarray]:
    pairwise = _pairwise(batch, config.tau, config.negatives_only)
    ranks = 1.0 + pairwise.sum(axis=1)
    idcg = ideal_dcg(batch.num_pos)

    loss = 1.0 - (1.0 / np.log2(1.0 + ranks)).sum() / idcg
    rank_grad = np.log(2.0) / ((1.0 + ranks) * np.log1p(ranks) ** 2) / idcg
    return float(loss), _chain(pairwise, rank_grad, config.tau)


def _ap(batch: BatchScores, config: LossConfig) -> Tuple[float, np.ndarray]:
    # rank+ <= rank only holds with the full rank, so negatives_only does not apply here
    num_pos = batch.num_pos
    pairwise = _pairwise(batch, config.tau)
    ranks = 1.0 + pairwise.sum(axis=1)
    ranks_pos = 1.0 + pairwise[:, :num_pos].sum(axis=1)

    loss = 1.0 - (ranks_pos / ranks).mean()
    grad = _chain(pairwise, ranks_pos / ranks**2 / num_pos, config.tau)

    positives_block = np.zeros_like(pairwise)
    positives_block[:, :num_pos] = pairwise[:, :num_pos]
    grad += _chain(positives_block, -1.0 / ranks / num_pos, config.tau)
    return float(loss), grad


def _recall_at_k(batch: BatchScores, config: LossConfig) -> Tuple[float, np.ndarray]:
    pairwise = _pairwise(batch, config.tau, config.negatives_only)
    ranks = 1.0 + pairwise.sum(axis=1)
    levels = np.asarray(config.recall_levels, dtype=np.float64)
    denominators = np.minimum(batch.num_pos, levels)

    hits = expit((levels[None, :] - ranks[:, None]) / config.tau_star)
    loss = 1.0 - (hits.sum(axis=0) / denominators).mean()
    rank_grad = (hits * (1.0 - hits) / config.tau_star / denominators).sum(axis=1) / levels.size
    return float(loss), _chain(pairwise, rank_grad, config.tau)


def _bpr(batch: BatchScores, config: LossConfig) -> Tuple[float, np.ndarray]:
    if batch.neg_scores.size == 0:
        raise InvalidValueError("BPR needs at least one negative score")
    margins = batch.pos_scores[:, None] - batch.neg_scores[None, :]
    pairs = margins.size

    loss = np.logaddexp(0.0, -margins).mean()
    weights = expit(-margins) / pairs
    grad = np.concatenate([-weights.sum(axis=1), weights.sum(axis=0)])
    return float(loss), grad


_LOSSES = {
    LossVariant.NDCG: _ndcg,
    LossVariant.AP: _ap,
    LossVariant.RECALL_AT_K: _recall_at_k,
    LossVariant.BPR: _bpr,
}


def loss_ndcg(batch: BatchScores, tau: float, negatives_only: bool = False) -> float:
    """1 - DCG_s / iDCG with the exact, untruncated iDCG of the sampled positives."""
    return _ndcg(batch, LossConfig(variant=LossVariant.NDCG, tau=tau, negatives_only=negatives_only))[0]


def loss_ap(batch: BatchScores, tau: float) -> float:
    return _ap(batch, LossConfig(variant=LossVariant.AP, tau=tau))[0]


def loss_recall_at_k(batch: BatchScores, tau: float, tau_star: float, recall_levels) -> float:
    """Lies in [0, 1] when every level is at least the number of positives; below that it can go negative."""
    config = LossConfig(variant=LossVariant.RECALL_AT_K, tau=tau, tau_star=tau_star, recall_levels=tuple(recall_levels))
    return _recall_at_k(batch, config)[0]


def loss_bpr(s_p: float, s_j: float) -> float:
    """-ln sigmoid(s_p - s_j)."""
    return float(np.logaddexp(0.0, -(s_p - s_j)))


def loss_and_grad(variant: LossVariant, batch: BatchScores, config: LossConfig) -> Tuple[float, Gradients]:
    try:
        compute = _LOSSES[LossVariant(variant)]
    except ValueError:
        raise InvalidValueError(f"Unknown loss variant '{variant}'", details={"variant": str(variant)})
    loss, grad = compute(batch, config)
    return loss, _split(grad, batch.num_pos)


def loss_value(variant: LossVariant, batch: BatchScores, config: LossConfig) -> float:
    return loss_and_grad(variant, batch, config)[0]


def loss_grad(variant: LossVariant, batch: BatchScores, config: LossConfig) -> Gradients:
    """Exact gradient of the chosen loss on (pos_scores, neg_scores)."""
    return loss_and_grad(variant, batch, config)[1]
