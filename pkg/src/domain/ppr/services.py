"""
PPR domain services: block power iteration, truncation and samplers.
"""

import logging
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import softmax

from src.domain.model.entities import BipartiteGraph
from src.domain.ppr.entities import NegativeSampler, PPRCache, PPRVector
from src.domain.ppr.value_objects import PPRConfig
from src.domain.shared.exceptions import ConfigurationError, EntityNotFoundError, InvalidValueError

logger = logging.getLogger(__name__)


def _binary_adjacency(graph: BipartiteGraph):
    adj = graph.user_adj.copy()
    adj.data[:] = 1.0
    return adj, adj.transpose().tocsr()


def _safe_inverse(degree: np.ndarray) -> np.ndarray:
    inverse = np.zeros_like(degree, dtype=np.float64)
    np.divide(1.0, degree, out=inverse, where=degree > 0)
    return inverse


def compute_ppr_block(graph: BipartiteGraph, users: Sequence[int], config: PPRConfig) -> List[PPRVector]:
    """
    Personalized PageRank of several source users at once.

    Iterates p <- alpha * e_u + (1 - alpha) * W p with W the column-stochastic walk
    operator of the bipartite graph. Each column stops on its own once its L1 change
    drops below `config.tol`, so results do not depend on how users are blocked.
    """
    users = np.asarray(users, dtype=np.int64)
    for user in users:
        if not 0 <= user < graph.num_users:
            raise EntityNotFoundError(f"User {user} is not part of the graph", details={"user": int(user)})
        if graph.user_degree[user] == 0:
            raise ConfigurationError(f"User {user} is isolated in the training graph", details={"user": int(user)})

    adj, adj_t = _binary_adjacency(graph)
    inv_user_degree = _safe_inverse(graph.user_degree)[:, None]
    inv_item_degree = _safe_inverse(graph.item_degree)[:, None]
    alpha = config.alpha

    block = users.size
    user_mass = np.zeros((graph.num_users, block))
    user_mass[users, np.arange(block)] = 1.0
    item_mass = np.zeros((graph.num_items, block))

    active = np.ones(block, dtype=bool)
    residual = np.full(block, np.inf)
    iterations = np.zeros(block, dtype=np.int64)
    for iteration in range(1, config.max_iter + 1):
        cols = np.flatnonzero(active)
        if cols.size == 0:
            break
        walked_users = (1.0 - alpha) * (adj @ (item_mass[:, cols] * inv_item_degree))
        walked_users[users[cols], np.arange(cols.size)] += alpha
        walked_items = (1.0 - alpha) * (adj_t @ (user_mass[:, cols] * inv_user_degree))

        change = np.abs(walked_users - user_mass[:, cols]).sum(axis=0)
        change += np.abs(walked_items - item_mass[:, cols]).sum(axis=0)
        user_mass[:, cols] = walked_users
        item_mass[:, cols] = walked_items
        residual[cols] = change
        iterations[cols] = iteration
        active[cols[change < config.tol]] = False

    vectors = []
    for col, user in enumerate(users):
        converged = not active[col]
        if not converged:
            logger.warning(
                f"PPR for user {user} did not reach tol={config.tol} in {config.max_iter} iterations "
                f"(residual {residual[col]:.3e})"
            )
        user_nodes = np.flatnonzero(user_mass[:, col])
        item_nodes = np.flatnonzero(item_mass[:, col])
        vectors.append(
            PPRVector(
                user=int(user),
                num_users=graph.num_users,
                nodes=np.concatenate([user_nodes, item_nodes + graph.num_users]),
                mass=np.concatenate([user_mass[user_nodes, col], item_mass[item_nodes, col]]),
                residual=float(residual[col]),
                iterations=int(iterations[col]),
                converged=converged,
            )
        )
    return vectors


def compute_ppr(graph: BipartiteGraph, user: int, config: PPRConfig) -> PPRVector:
    return compute_ppr_block(graph, [user], config)[0]


def truncate(vector: PPRVector, top_t: Optional[int]) -> PPRVector:
    """
    Keep the `top_t` item entries with the largest mass (ties by item id); user
    entries are dropped. `top_t=None` keeps every item entry.
    """
    items, mass = vector.item_ids, vector.item_mass
    if top_t is not None:
        if top_t < 1:
            raise InvalidValueError(f"top_t must be >= 1, got {top_t}")
        order = np.lexsort((items, -mass))[:top_t]
        order = order[np.argsort(items[order])]
        items, mass = items[order], mass[order]
    return PPRVector(
        user=vector.user,
        num_users=vector.num_users,
        nodes=items + vector.num_users,
        mass=mass,
        residual=vector.residual,
        iterations=vector.iterations,
        converged=vector.converged,
    )


def quantize(vector: PPRVector) -> PPRVector:
    """Round masses through float32, the precision of the cache file."""
    return PPRVector(
        user=vector.user,
        num_users=vector.num_users,
        nodes=vector.nodes,
        mass=vector.mass.astype(np.float32).astype(np.float64),
        residual=vector.residual,
        iterations=vector.iterations,
        converged=vector.converged,
    )


def _candidates(user: int, positives: np.ndarray, num_items: int) -> np.ndarray:
    candidates = np.setdiff1d(np.arange(num_items), positives)
    if candidates.size == 0:
        raise ConfigurationError(f"User {user} has no negative candidate item", details={"user": user})
    return candidates


def _sampler(user: int, candidates: np.ndarray, probs: np.ndarray) -> NegativeSampler:
    cumulative = np.cumsum(probs)
    cumulative[-1] = 1.0
    return NegativeSampler(user=user, candidate_items=candidates, probs=probs, cumulative=cumulative)


def build_sampler(ppr: PPRVector, positives: np.ndarray, scale: float, num_items: int) -> NegativeSampler:
    """
    Softmax of scale * ppr over the user's negatives. Items the walk never reached
    get weight exp(0); positives get no weight at all.
    """
    candidates = _candidates(ppr.user, np.asarray(positives, dtype=np.int64), num_items)
    logits = scale * ppr.item_scores(num_items)[candidates]
    return _sampler(ppr.user, candidates, softmax(logits))


def uniform_sampler(user: int, positives: np.ndarray, num_items: int) -> NegativeSampler:
    candidates = _candidates(user, np.asarray(positives, dtype=np.int64), num_items)
    return _sampler(user, candidates, np.full(candidates.size, 1.0 / candidates.size))


def sample_negatives(sampler: NegativeSampler, n: int, rng: np.random.Generator) -> np.ndarray:
    """`n` i.i.d. draws with replacement."""
    if n < 1:
        raise InvalidValueError(f"n must be >= 1, got {n}")
    positions = np.searchsorted(sampler.cumulative, rng.random(n), side="right")
    return sampler.candidate_items[np.minimum(positions, sampler.candidate_items.size - 1)]


class NegativeSamplerProvider(ABC):
    """
    Builds a user's sampler on demand.
    """

    def __init__(self, num_items: int):
        self._num_items = num_items

    @abstractmethod
    def sampler_for(self, user: int, positives: np.ndarray) -> NegativeSampler:
        pass


class UniformSamplerProvider(NegativeSamplerProvider):
    def sampler_for(self, user: int, positives: np.ndarray) -> NegativeSampler:
        return uniform_sampler(user, positives, self._num_items)


class PPRSamplerProvider(NegativeSamplerProvider):
    def __init__(self, cache: PPRCache, scale: Optional[float] = None):
        super().__init__(cache.num_items)
        self._cache = cache
        self._scale = cache.scale if scale is None else scale

    @property
    def scale(self) -> float:
        return self._scale

    def sampler_for(self, user: int, positives: np.ndarray) -> NegativeSampler:
        vector = self._cache.vectors.get(int(user))
        if vector is None:
            raise EntityNotFoundError(f"PPR cache has no record for user {user}", details={"user": int(user)})
        return build_sampler(vector, positives, self._scale, self._num_items)
