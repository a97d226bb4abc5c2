"""
Graph model entities.
"""

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional

import numpy as np
import scipy.sparse as sp

from src.domain.model.value_objects import ModelConfig
from src.domain.shared.entities import DomainEntity
from src.domain.shared.exceptions import EntityNotFoundError, NumericalError


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """
    Users x items adjacency in CSR form. The stored values are the symmetric
    normalization coefficients 1 / sqrt(deg(u) * deg(i)).
    """

    user_adj: sp.csr_matrix
    item_adj: sp.csr_matrix
    user_degree: np.ndarray
    item_degree: np.ndarray

    @property
    def num_users(self) -> int:
        return self.user_adj.shape[0]

    @property
    def num_items(self) -> int:
        return self.user_adj.shape[1]

    @property
    def num_edges(self) -> int:
        return int(self.user_adj.nnz)

    def neighbors_of_user(self, user: int) -> np.ndarray:
        self._check_user(user)
        return self.user_adj.indices[self.user_adj.indptr[user] : self.user_adj.indptr[user + 1]]

    def norm_coeff(self, user: int, item: int) -> float:
        self._check_user(user)
        return float(self.user_adj[user, item])

    @cached_property
    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(np.asarray(self.user_adj.shape, dtype="<i8").tobytes())
        digest.update(self.user_adj.indptr.astype("<i8").tobytes())
        digest.update(self.user_adj.indices.astype("<i8").tobytes())
        return digest.hexdigest()

    def _check_user(self, user: int) -> None:
        if not 0 <= user < self.num_users:
            raise EntityNotFoundError(f"User {user} is not part of the graph", details={"user": user})


@dataclass
class EmbeddingTable:
    """
    Dense per-node vectors. `user_emb` is None when users are not trainable.
    """

    item_emb: np.ndarray
    user_emb: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.item_emb.shape[1]

    def parameters(self) -> Dict[str, np.ndarray]:
        """Trainable blocks by name."""
        params = {"item_emb": self.item_emb}
        if self.user_emb is not None:
            params["user_emb"] = self.user_emb
        return params

    def assert_finite(self) -> None:
        for name, block in self.parameters().items():
            if not np.isfinite(block).all():
                raise NumericalError(f"Non-finite entries in {name}", block=name)

    def quantized(self) -> "EmbeddingTable":
        """The table as stored on disk: rounded through float32."""
        return EmbeddingTable(
            item_emb=self.item_emb.astype(np.float32).astype(np.float64),
            user_emb=None if self.user_emb is None else self.user_emb.astype(np.float32).astype(np.float64),
        )

    def copy(self) -> "EmbeddingTable":
        return EmbeddingTable(
            item_emb=self.item_emb.copy(),
            user_emb=None if self.user_emb is None else self.user_emb.copy(),
        )


@dataclass
class ForwardCache:
    """Artifacts of the last forward pass, consumed by backward."""

    layers: List[EmbeddingTable]
    pooled: EmbeddingTable
    user_weights: np.ndarray
    item_weights: np.ndarray


@dataclass(kw_only=True, eq=False)
class GraphRecommender(DomainEntity):
    """
    Model aggregate: the training graph, its configuration and the trainable table.
    """

    config: ModelConfig
    graph: BipartiteGraph
    embeddings: EmbeddingTable
    cache: Optional[ForwardCache] = field(default=None, repr=False)

    def invalidate(self) -> None:
        """Drop the forward cache after the parameters changed."""
        self.cache = None


@dataclass(eq=False)
class Checkpoint:
    """
    Stored parameters with what is needed to rebuild the model around them.
    """

    config: ModelConfig
    table: EmbeddingTable
    num_users: int
    num_items: int
    seed: int
    graph_fingerprint: str
    epoch: Optional[int] = None
    metrics: Dict[str, object] = field(default_factory=dict)

    def header(self) -> dict:
        return {
            "dim": self.config.dim,
            "L": self.config.layers,
            "pooling": self.config.pooling.value,
            "mode": self.config.mode.value,
            "init_std": self.config.init_std,
            "counts": {"users": self.num_users, "items": self.num_items},
            "seed": self.seed,
            "graph_hash": self.graph_fingerprint,
            "epoch": self.epoch,
            "metrics": self.metrics,
        }
