"""
Model domain services: graph construction, propagation, pooling, scoring,
inductive inference and the exact backward pass.

Propagation is linear, so with M the symmetric normalized adjacency over
users and items and D_k the per-node pooling weights of layer k, the pooled
output is sum_k D_k M^k X and its gradient is sum_k M^k D_k G.
"""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from src.domain.data.entities import Dataset
from src.domain.model.entities import BipartiteGraph, EmbeddingTable, ForwardCache, GraphRecommender
from src.domain.model.value_objects import ModelConfig, Pooling
from src.domain.shared.exceptions import (
    ConfigurationError,
    InferenceError,
    InvalidValueError,
    ShapeError,
    StateError,
)

# Users per chunk when scattering score gradients.
_SCATTER_CHUNK = 64


def build_graph(train: Dataset) -> BipartiteGraph:
    """Build the normalized CSR adjacency of the training interactions."""
    if len(train) == 0:
        raise InvalidValueError("Cannot build a graph from an empty dataset")

    user_degree = np.bincount(train.users, minlength=train.num_users).astype(np.float64)
    item_degree = np.bincount(train.items, minlength=train.num_items).astype(np.float64)
    coeff = 1.0 / np.sqrt(user_degree[train.users] * item_degree[train.items])

    user_adj = sp.csr_matrix((coeff, (train.users, train.items)), shape=(train.num_users, train.num_items))
    user_adj.sort_indices()
    item_adj = user_adj.transpose().tocsr()
    item_adj.sort_indices()
    return BipartiteGraph(user_adj=user_adj, item_adj=item_adj, user_degree=user_degree, item_degree=item_degree)


def init_embeddings(num_users: int, num_items: int, config: ModelConfig, rng: np.random.Generator) -> EmbeddingTable:
    """Gaussian initialization; inductive models carry no user table."""
    item_emb = rng.normal(0.0, config.init_std, size=(num_items, config.dim))
    user_emb = None if config.inductive else rng.normal(0.0, config.init_std, size=(num_users, config.dim))
    return EmbeddingTable(item_emb=item_emb, user_emb=user_emb)


def propagate(
    graph: BipartiteGraph, table: EmbeddingTable, layers: int, inductive: bool = False
) -> List[EmbeddingTable]:
    """
    Return the L+1 per-layer tables; layer 0 is the input. Inductive users start
    from the zero matrix and only receive messages from items.
    """
    if layers < 0:
        raise InvalidValueError(f"layers must be >= 0, got {layers}")
    if table.item_emb.shape[0] != graph.num_items:
        raise ShapeError(f"item_emb has {table.item_emb.shape[0]} rows, graph has {graph.num_items} items")

    if inductive or table.user_emb is None:
        users = np.zeros((graph.num_users, table.dim))
    else:
        if table.user_emb.shape != (graph.num_users, table.dim):
            raise ShapeError(f"user_emb shape {table.user_emb.shape} != ({graph.num_users}, {table.dim})")
        users = table.user_emb

    out = [EmbeddingTable(item_emb=table.item_emb, user_emb=users)]
    for _ in range(layers):
        previous = out[-1]
        out.append(
            EmbeddingTable(
                item_emb=graph.item_adj @ previous.user_emb,
                user_emb=graph.user_adj @ previous.item_emb,
            )
        )
    return out


def layer_weights(num_layers: int, pooling: Pooling, inductive: bool) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pooling weights of each of `num_layers` tables for users and items.
    The zero user layer of inductive models is left out of the user mean.
    """
    if num_layers < 1:
        raise InvalidValueError("Pooling needs at least one layer")

    pooling = Pooling(pooling)
    item_weights = np.ones(num_layers)
    user_weights = np.ones(num_layers)
    if inductive:
        if num_layers == 1:
            raise InvalidValueError("Inductive pooling needs at least one propagated layer")
        user_weights[0] = 0.0
    if pooling is Pooling.MEAN:
        item_weights /= item_weights.sum()
        user_weights /= user_weights.sum()
    return user_weights, item_weights


def pool(layers: Sequence[EmbeddingTable], pooling: Pooling, inductive: bool = False) -> EmbeddingTable:
    """Mean or sum of the per-layer tables."""
    if not layers:
        raise InvalidValueError("Cannot pool an empty layer list")

    user_weights, item_weights = layer_weights(len(layers), pooling, inductive)
    items = sum(w * layer.item_emb for w, layer in zip(item_weights, layers))
    users = None
    if all(layer.user_emb is not None for layer in layers):
        users = sum(w * layer.user_emb for w, layer in zip(user_weights, layers))
    return EmbeddingTable(item_emb=items, user_emb=users)


def score(user_row: np.ndarray, item_rows: np.ndarray) -> np.ndarray:
    """Dot product of one user vector with each item row."""
    item_rows = np.atleast_2d(item_rows)
    if user_row.ndim != 1 or item_rows.shape[1] != user_row.shape[0]:
        raise ShapeError(f"Cannot score user of shape {user_row.shape} against items of shape {item_rows.shape}")
    return item_rows @ user_row


def forward(model: GraphRecommender) -> EmbeddingTable:
    """Propagate and pool the current parameters, caching the pass on the model."""
    config = model.config
    layers = propagate(model.graph, model.embeddings, config.layers, inductive=config.inductive)
    user_weights, item_weights = layer_weights(len(layers), config.pooling, config.inductive)
    pooled = pool(layers, config.pooling, inductive=config.inductive)
    model.cache = ForwardCache(layers=layers, pooled=pooled, user_weights=user_weights, item_weights=item_weights)
    return pooled


def backward(
    model: GraphRecommender, users: np.ndarray, items: np.ndarray, score_grads: np.ndarray
) -> Dict[str, np.ndarray]:
    """
    Gradients on the trainable blocks given dL/ds for s[b, j] = pooled_user[users[b]] . pooled_item[items[b, j]].
    """
    cache = model.cache
    if cache is None:
        raise StateError("backward called without a forward pass on the current parameters")

    items = np.asarray(items)
    score_grads = np.asarray(score_grads, dtype=np.float64)
    if items.shape != score_grads.shape or items.shape[0] != len(users):
        raise ShapeError(f"items {items.shape}, score_grads {score_grads.shape} and {len(users)} users disagree")

    pooled_users, pooled_items = cache.pooled.user_emb, cache.pooled.item_emb
    grad_users = np.zeros_like(pooled_users)
    grad_items = np.zeros_like(pooled_items)
    for start in range(0, len(users), _SCATTER_CHUNK):
        chunk = slice(start, start + _SCATTER_CHUNK)
        chunk_users = np.asarray(users[chunk])
        chunk_items = items[chunk]
        chunk_grads = score_grads[chunk]
        # dL/dP_u = sum_j g_j P_i(j), dL/dP_i(j) += g_j P_u
        np.add.at(grad_users, chunk_users, np.einsum("bn,bnd->bd", chunk_grads, pooled_items[chunk_items]))
        contrib = chunk_grads[:, :, None] * pooled_users[chunk_users][:, None, :]
        np.add.at(grad_items, chunk_items.ravel(), contrib.reshape(-1, contrib.shape[-1]))

    return backward_pooled(model, grad_users, grad_items)


def backward_pooled(model: GraphRecommender, grad_users: np.ndarray, grad_items: np.ndarray) -> Dict[str, np.ndarray]:
    """Transpose of propagate+pool applied to gradients on the pooled tables."""
    cache = model.cache
    if cache is None:
        raise StateError("backward called without a forward pass on the current parameters")

    graph = model.graph
    user_weights, item_weights = cache.user_weights, cache.item_weights
    last = len(user_weights) - 1

    # Horner form of sum_k M^k D_k G
    acc_users = user_weights[last] * grad_users
    acc_items = item_weights[last] * grad_items
    for k in range(last - 1, -1, -1):
        acc_users, acc_items = (
            graph.user_adj @ acc_items + user_weights[k] * grad_users,
            graph.item_adj @ acc_users + item_weights[k] * grad_items,
        )

    grads = {"item_emb": acc_items}
    if not model.config.inductive:
        grads["user_emb"] = acc_users
    return grads


def infer_users(
    fold_ins: Sequence[np.ndarray],
    item_layers: Sequence[np.ndarray],
    graph: BipartiteGraph,
    config: ModelConfig,
) -> np.ndarray:
    """
    Represent unseen users by message passing only.

    Each user is attached to its fold-in items with coefficient
    1 / sqrt(|fold-in| * deg_train(i)); its layer k is read from the item layer k-1
    of the training graph, and layers 1..L are pooled like training-time inductive users.
    """
    if not config.inductive:
        raise ConfigurationError("Fold-in inference requires an inductive model")
    if len(item_layers) != config.layers + 1:
        raise ShapeError(f"Expected {config.layers + 1} item layers, got {len(item_layers)}")

    rows, cols, coeffs = [], [], []
    for row, fold_in in enumerate(fold_ins):
        fold_in = np.asarray(fold_in, dtype=np.int64)
        if fold_in.size == 0:
            raise InferenceError(f"Empty fold-in for inferred user #{row}", details={"row": row})
        if fold_in.min() < 0 or fold_in.max() >= graph.num_items:
            raise InferenceError(f"Fold-in of user #{row} references unknown items", details={"row": row})
        degree = graph.item_degree[fold_in]
        if (degree == 0).any():
            raise InferenceError(
                f"Fold-in of user #{row} contains items absent from the training graph",
                details={"row": row, "items": fold_in[degree == 0].tolist()},
            )
        rows.append(np.full(fold_in.size, row))
        cols.append(fold_in)
        coeffs.append(1.0 / np.sqrt(fold_in.size * degree))

    attach = sp.csr_matrix(
        (np.concatenate(coeffs), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(fold_ins), graph.num_items),
    )
    user_weights, _ = layer_weights(config.layers + 1, config.pooling, inductive=True)
    out = np.zeros((len(fold_ins), item_layers[0].shape[1]))
    for k in range(1, config.layers + 1):
        out += user_weights[k] * (attach @ item_layers[k - 1])
    return out


def infer_user(
    fold_in: np.ndarray,
    item_layers: Sequence[np.ndarray],
    graph: BipartiteGraph,
    config: ModelConfig,
) -> np.ndarray:
    return infer_users([fold_in], item_layers, graph, config)[0]


def item_layers_of(model: GraphRecommender, table: Optional[EmbeddingTable] = None) -> List[np.ndarray]:
    """Per-layer item tables of the training graph for `table` (default: the model parameters)."""
    layers = propagate(model.graph, table or model.embeddings, model.config.layers, inductive=model.config.inductive)
    return [layer.item_emb for layer in layers]
