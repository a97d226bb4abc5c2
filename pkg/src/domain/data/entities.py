"""
Interaction datasets and split containers.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.domain.data.value_objects import Protocol
from src.domain.shared.entities import ValueObject
from src.domain.shared.exceptions import InvalidValueError


@dataclass(frozen=True)
class Interaction(ValueObject):
    """
    A single implicit-feedback edge between a user and an item.
    """

    user_id: int
    item_id: int
    rating: Optional[float] = None

    def __post_init__(self):
        if self.user_id < 0 or self.item_id < 0:
            raise InvalidValueError(
                f"Interaction ids must be non-negative, got ({self.user_id}, {self.item_id})",
                details={"user_id": self.user_id, "item_id": self.item_id},
            )


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Deduplicated interactions over dense ids, stored column-wise.

    `users[k]`, `items[k]` is the k-th interaction. Labels map dense ids back to the
    ids found in the source file.
    """

    users: np.ndarray
    items: np.ndarray
    num_users: int
    num_items: int
    user_labels: Optional[Tuple[str, ...]] = None
    item_labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        users = np.asarray(self.users, dtype=np.int64)
        items = np.asarray(self.items, dtype=np.int64)
        object.__setattr__(self, "users", users)
        object.__setattr__(self, "items", items)

        if users.shape != items.shape or users.ndim != 1:
            raise InvalidValueError("users and items must be 1-D arrays of equal length")
        if users.size and (users.min() < 0 or users.max() >= self.num_users):
            raise InvalidValueError(f"user id out of range [0, {self.num_users})")
        if items.size and (items.min() < 0 or items.max() >= self.num_items):
            raise InvalidValueError(f"item id out of range [0, {self.num_items})")
        if np.unique(self.keys).size != self.keys.size:
            raise InvalidValueError("Dataset contains duplicate (user, item) pairs")

    def __len__(self) -> int:
        return int(self.users.size)

    @property
    def keys(self) -> np.ndarray:
        """One integer per interaction, unique per (user, item) pair."""
        return self.users * max(self.num_items, 1) + self.items

    @property
    def interactions(self) -> List[Interaction]:
        return [Interaction(int(u), int(i)) for u, i in zip(self.users, self.items)]

    @cached_property
    def _user_index(self) -> Tuple[np.ndarray, np.ndarray]:
        order = np.lexsort((self.items, self.users))
        counts = np.bincount(self.users, minlength=self.num_users)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return indptr, self.items[order]

    def items_of(self, user: int) -> np.ndarray:
        """Sorted item ids of `user`."""
        indptr, items = self._user_index
        return items[indptr[user] : indptr[user + 1]]

    def user_degrees(self) -> np.ndarray:
        return np.bincount(self.users, minlength=self.num_users)

    def item_degrees(self) -> np.ndarray:
        return np.bincount(self.items, minlength=self.num_items)

    def active_users(self) -> np.ndarray:
        return np.flatnonzero(self.user_degrees() > 0)

    def with_pairs(self, users: np.ndarray, items: np.ndarray) -> "Dataset":
        """A dataset over the same id space holding the given pairs."""
        return Dataset(
            users=users,
            items=items,
            num_users=self.num_users,
            num_items=self.num_items,
            user_labels=self.user_labels,
            item_labels=self.item_labels,
        )

    def restrict_to_users(self, users: np.ndarray) -> "Dataset":
        mask = np.isin(self.users, users)
        return self.with_pairs(self.users[mask], self.items[mask])

    def user_label(self, user: int) -> str:
        return self.user_labels[user] if self.user_labels else str(user)

    def item_label(self, item: int) -> str:
        return self.item_labels[item] if self.item_labels else str(item)


@dataclass(frozen=True, eq=False)
class TransductiveSplit:
    """
    Interaction split: every user appears in train, validation and test.
    """

    train: Dataset
    validation: Dataset
    test: Dataset
    rho: float
    seed: int
    moved_to_train: int = 0

    protocol = Protocol.TRANSDUCTIVE

    @property
    def num_users(self) -> int:
        return self.train.num_users

    @property
    def num_items(self) -> int:
        return self.train.num_items


@dataclass(frozen=True, eq=False)
class InductiveSplit:
    """
    User split: training users keep their full history, evaluation users are
    represented by a fold-in part and scored on the fold-out part.
    """

    dataset: Dataset
    train_users: np.ndarray
    val_users: np.ndarray
    test_users: np.ndarray
    mu: float
    eta: float
    seed: int
    fold_in: Dict[int, np.ndarray] = field(default_factory=dict)
    fold_out: Dict[int, np.ndarray] = field(default_factory=dict)
    dropped_interactions: int = 0
    dropped_users: int = 0

    protocol = Protocol.INDUCTIVE

    @cached_property
    def train(self) -> Dataset:
        return self.dataset.restrict_to_users(self.train_users)

    @property
    def num_users(self) -> int:
        return self.dataset.num_users

    @property
    def num_items(self) -> int:
        return self.dataset.num_items

    def users_of(self, part: str) -> np.ndarray:
        if part == "validation":
            return self.val_users
        if part == "test":
            return self.test_users
        raise InvalidValueError(f"Unknown evaluation part '{part}'")
