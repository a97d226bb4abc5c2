"""
Data domain services: reindexing, implicit-feedback filtering and splitting.
"""

import logging
import math
from typing import Dict, Sequence

import numpy as np

from src.domain.data.entities import Dataset, InductiveSplit, TransductiveSplit
from src.domain.shared.exceptions import ConfigurationError, EmptyDatasetError, InvalidValueError

logger = logging.getLogger(__name__)

# Guards floor(fraction * n) against 0.29 * 100 == 28.999...
_ROUNDING_SLACK = 1e-9


def dataset_from_labels(user_labels: Sequence, item_labels: Sequence) -> Dataset:
    """
    Build a dataset from raw (user, item) labels.
    Duplicates are collapsed and ids are reindexed densely in sorted label order.
    """
    user_raw = np.asarray([str(label) for label in user_labels])
    item_raw = np.asarray([str(label) for label in item_labels])
    if user_raw.size == 0:
        raise EmptyDatasetError("No interactions to build a dataset from")

    user_uniques, users = np.unique(user_raw, return_inverse=True)
    item_uniques, items = np.unique(item_raw, return_inverse=True)

    keys = np.unique(users.astype(np.int64) * item_uniques.size + items)
    return Dataset(
        users=keys // item_uniques.size,
        items=keys % item_uniques.size,
        num_users=int(user_uniques.size),
        num_items=int(item_uniques.size),
        user_labels=tuple(user_uniques.tolist()),
        item_labels=tuple(item_uniques.tolist()),
    )


def compact(dataset: Dataset, users: np.ndarray, items: np.ndarray) -> Dataset:
    """Re-densify ids after interactions have been removed, carrying labels along."""
    kept_users, new_users = np.unique(users, return_inverse=True)
    kept_items, new_items = np.unique(items, return_inverse=True)
    return Dataset(
        users=new_users,
        items=new_items,
        num_users=int(kept_users.size),
        num_items=int(kept_items.size),
        user_labels=tuple(dataset.user_labels[u] for u in kept_users) if dataset.user_labels else None,
        item_labels=tuple(dataset.item_labels[i] for i in kept_items) if dataset.item_labels else None,
    )


def filter_min_interactions(dataset: Dataset, min_n: int) -> Dataset:
    """
    Remove users with fewer than `min_n` interactions until nothing changes.
    Items left without interactions disappear with the re-densification.
    """
    if min_n < 1:
        raise InvalidValueError(f"min_n must be >= 1, got {min_n}")

    users, items = dataset.users, dataset.items
    rounds = 0
    while users.size:
        counts = np.bincount(users, minlength=dataset.num_users)
        keep = counts[users] >= min_n
        if keep.all():
            break
        users, items = users[keep], items[keep]
        rounds += 1

    if users.size == 0:
        raise EmptyDatasetError(
            f"No user has at least {min_n} interactions", details={"min_interactions": min_n}
        )

    filtered = compact(dataset, users, items)
    logger.info(
        f"Filtered to users with >= {min_n} interactions in {rounds} round(s): "
        f"{filtered.num_users} users, {filtered.num_items} items, {len(filtered)} interactions"
    )
    return filtered


def _check_fraction(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise InvalidValueError(f"{name} must lie in (0, 1), got {value}", details={name: value})


def _head_count(fraction: float, n: int) -> int:
    return max(1, math.floor(fraction * n + _ROUNDING_SLACK))


def split_transductive(dataset: Dataset, rho: float, seed: int) -> TransductiveSplit:
    """
    Per-user random interaction split.

    floor(rho * n) interactions (at least one) go to train, the held-out rest is halved
    into validation and test, test taking the odd one. Held-out items unseen in train are
    moved to train, one interaction per item.
    """
    _check_fraction("rho", rho)
    rng = np.random.default_rng(seed)

    parts: Dict[str, list] = {"train": [], "validation": [], "test": []}
    for user in range(dataset.num_users):
        items = dataset.items_of(user)
        n = items.size
        if n == 0:
            continue
        shuffled = rng.permutation(items)
        n_train = _head_count(rho, n)
        if n_train >= n:
            raise ConfigurationError(
                f"rho={rho} leaves no held-out interaction for user {dataset.user_label(user)} ({n} interactions)",
                details={"user": user, "interactions": n, "rho": rho},
            )
        held = shuffled[n_train:]
        n_val = held.size // 2
        parts["train"].append((user, shuffled[:n_train]))
        parts["validation"].append((user, held[:n_val]))
        parts["test"].append((user, held[n_val:]))

    train_u, train_i = _flatten(parts["train"])
    val_u, val_i = _flatten(parts["validation"])
    test_u, test_i = _flatten(parts["test"])

    covered = np.zeros(dataset.num_items, dtype=bool)
    covered[train_i] = True
    held_u = np.concatenate([val_u, test_u])
    held_i = np.concatenate([val_i, test_i])
    uncovered = np.flatnonzero(~covered[held_i])

    moved = np.zeros(held_u.size, dtype=bool)
    if uncovered.size:
        # first held-out interaction of each uncovered item, in (item, user) order
        order = uncovered[np.lexsort((held_u[uncovered], held_i[uncovered]))]
        _, first = np.unique(held_i[order], return_index=True)
        moved[order[first]] = True
        logger.info(f"Item coverage: moved {int(moved.sum())} held-out interaction(s) into train")

    n_val_rows = val_u.size
    train = dataset.with_pairs(
        np.concatenate([train_u, held_u[moved]]), np.concatenate([train_i, held_i[moved]])
    )
    keep_val = ~moved[:n_val_rows]
    keep_test = ~moved[n_val_rows:]

    return TransductiveSplit(
        train=train,
        validation=dataset.with_pairs(val_u[keep_val], val_i[keep_val]),
        test=dataset.with_pairs(test_u[keep_test], test_i[keep_test]),
        rho=rho,
        seed=seed,
        moved_to_train=int(moved.sum()),
    )


def split_inductive(dataset: Dataset, mu: float, eta: float, seed: int) -> InductiveSplit:
    """
    User split into train / validation / test users (mu, then halves of the rest),
    with fold-in / fold-out parts of size floor(eta * n) / remainder for held-out users.
    """
    _check_fraction("mu", mu)
    _check_fraction("eta", eta)
    rng = np.random.default_rng(seed)

    users = dataset.active_users()
    order = rng.permutation(users)
    n_train = _head_count(mu, users.size)
    if n_train >= users.size:
        raise ConfigurationError(
            f"mu={mu} leaves no evaluation user among {users.size} users", details={"mu": mu, "users": int(users.size)}
        )
    rest = order[n_train:]
    n_val = rest.size // 2
    train_users = np.sort(order[:n_train])
    val_users = np.sort(rest[:n_val])
    test_users = np.sort(rest[n_val:])

    covered = np.zeros(dataset.num_items, dtype=bool)
    covered[dataset.restrict_to_users(train_users).items] = True

    fold_in: Dict[int, np.ndarray] = {}
    fold_out: Dict[int, np.ndarray] = {}
    dropped_interactions = 0
    dropped = set()
    for user in np.sort(rest):
        items = dataset.items_of(user)
        kept = items[covered[items]]
        dropped_interactions += int(items.size - kept.size)
        if kept.size == 0:
            dropped.add(int(user))
            continue
        shuffled = rng.permutation(kept)
        n_in = _head_count(eta, kept.size)
        if n_in >= kept.size:
            dropped.add(int(user))
            continue
        fold_in[int(user)] = np.sort(shuffled[:n_in])
        fold_out[int(user)] = np.sort(shuffled[n_in:])

    if dropped_interactions:
        logger.info(f"Item coverage: dropped {dropped_interactions} held-out interaction(s) on items unseen in train")
    if dropped:
        logger.warning(f"Dropped {len(dropped)} held-out user(s) left without a fold-out part")

    dropped_ids = np.asarray(sorted(dropped), dtype=np.int64)
    return InductiveSplit(
        dataset=dataset,
        train_users=train_users,
        val_users=np.setdiff1d(val_users, dropped_ids),
        test_users=np.setdiff1d(test_users, dropped_ids),
        mu=mu,
        eta=eta,
        seed=seed,
        fold_in=fold_in,
        fold_out=fold_out,
        dropped_interactions=dropped_interactions,
        dropped_users=len(dropped),
    )


def assert_item_coverage(split) -> None:
    """Raise when an evaluation item is absent from the training graph."""
    covered = np.zeros(split.num_items, dtype=bool)
    covered[split.train.items] = True
    if isinstance(split, TransductiveSplit):
        held = np.concatenate([split.validation.items, split.test.items])
    else:
        held_parts = [split.fold_in[u] for u in split.fold_in] + [split.fold_out[u] for u in split.fold_out]
        held = np.concatenate(held_parts) if held_parts else np.empty(0, dtype=np.int64)
    missing = np.unique(held[~covered[held]])
    if missing.size:
        raise ConfigurationError(
            f"{missing.size} evaluation item(s) missing from the training graph",
            details={"items": missing[:20].tolist()},
        )


def _flatten(rows: list):
    if not rows:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    users = np.concatenate([np.full(items.size, user, dtype=np.int64) for user, items in rows])
    items = np.concatenate([items for _, items in rows]).astype(np.int64)
    return users, items
