import math
import unittest

import numpy as np

from src.common.factories import DatasetFactory
from src.domain.data.entities import Dataset, Interaction
from src.domain.data.services import (
    assert_item_coverage,
    dataset_from_labels,
    filter_min_interactions,
    split_inductive,
    split_transductive,
)
from src.domain.shared.exceptions import ConfigurationError, EmptyDatasetError, InvalidValueError


def pair_set(dataset: Dataset):
    return set(zip(dataset.users.tolist(), dataset.items.tolist()))


def brute_force_fixpoint(pairs, min_n):
    pairs = set(pairs)
    while True:
        counts = {}
        for user, _ in pairs:
            counts[user] = counts.get(user, 0) + 1
        kept = {(user, item) for user, item in pairs if counts[user] >= min_n}
        if kept == pairs:
            return kept
        pairs = kept


class DatasetFromLabelsTests(unittest.TestCase):
    def test_duplicates_collapse_and_ids_follow_label_order(self):
        dataset = dataset_from_labels(["b", "a", "b", "a"], ["y", "x", "y", "y"])

        self.assertEqual(3, len(dataset))
        self.assertEqual(("a", "b"), dataset.user_labels)
        self.assertEqual(("x", "y"), dataset.item_labels)
        self.assertEqual({(0, 0), (0, 1), (1, 1)}, pair_set(dataset))

    def test_interactions_view(self):
        dataset = dataset_from_labels(["b", "a", "b"], ["y", "x", "x"])

        self.assertEqual([Interaction(0, 0), Interaction(1, 0), Interaction(1, 1)], dataset.interactions)

        with self.subTest("negative ids"):
            with self.assertRaises(InvalidValueError):
                Interaction(-1, 0)

    def test_no_labels_is_an_empty_dataset(self):
        with self.assertRaises(EmptyDatasetError):
            dataset_from_labels([], [])


class FilterMinInteractionsTests(unittest.TestCase):
    def test_sparse_users_and_their_orphan_items_are_removed(self):
        dataset = dataset_from_labels(
            ["u1", "u1", "u1", "u2", "u3", "u3", "u3"],
            ["a", "b", "c", "z", "a", "b", "c"],
        )

        filtered = filter_min_interactions(dataset, 2)

        self.assertEqual(("u1", "u3"), filtered.user_labels)
        self.assertEqual(("a", "b", "c"), filtered.item_labels)
        self.assertEqual(6, len(filtered))

    def test_result_respects_the_threshold(self):
        dataset = DatasetFactory(num_users=30, num_items=25, density=0.15)

        filtered = filter_min_interactions(dataset, 6)

        self.assertTrue((filtered.user_degrees()[filtered.active_users()] >= 6).all())
        self.assertTrue((filtered.item_degrees() > 0).all())

    def test_matches_a_brute_force_fixpoint(self):
        rng = np.random.default_rng(17)

        for trial in range(40):
            num_users, num_items = int(rng.integers(1, 11)), int(rng.integers(1, 11))
            count = int(rng.integers(1, num_users * num_items + 1))
            users = [f"u{user}" for user in rng.integers(num_users, size=count)]
            items = [f"i{item}" for item in rng.integers(num_items, size=count)]
            min_n = int(rng.integers(1, 5))
            dataset = dataset_from_labels(users, items)
            expected = brute_force_fixpoint(set(zip(users, items)), min_n)

            with self.subTest(trial=trial, min_n=min_n):
                if not expected:
                    with self.assertRaises(EmptyDatasetError):
                        filter_min_interactions(dataset, min_n)
                    continue
                filtered = filter_min_interactions(dataset, min_n)
                labels = {
                    (filtered.user_label(int(u)), filtered.item_label(int(i)))
                    for u, i in zip(filtered.users, filtered.items)
                }
                self.assertEqual(expected, labels)
                self.assertEqual(len({user for user, _ in expected}), filtered.num_users)
                self.assertEqual(len({item for _, item in expected}), filtered.num_items)

    def test_invalid_thresholds(self):
        dataset = DatasetFactory()

        with self.subTest("min_n below one"):
            with self.assertRaises(InvalidValueError):
                filter_min_interactions(dataset, 0)

        with self.subTest("nobody left"):
            with self.assertRaises(EmptyDatasetError):
                filter_min_interactions(dataset, dataset.num_items + 1)


class TransductiveSplitTests(unittest.TestCase):
    def setUp(self):
        self.dataset = DatasetFactory(num_users=15, num_items=30, density=0.4)

    def test_parts_partition_every_user_history(self):
        split = split_transductive(self.dataset, 0.6, seed=3)

        train, validation, test = pair_set(split.train), pair_set(split.validation), pair_set(split.test)

        self.assertEqual(pair_set(self.dataset), train | validation | test)
        self.assertEqual(set(), train & validation)
        self.assertEqual(set(), train & test)
        self.assertEqual(set(), validation & test)

    def test_train_share_per_user(self):
        split = split_transductive(self.dataset, 0.6, seed=3)

        for user in range(self.dataset.num_users):
            n = self.dataset.items_of(user).size
            with self.subTest(user=user):
                self.assertGreaterEqual(split.train.items_of(user).size, max(1, math.floor(0.6 * n)))
                held = split.validation.items_of(user).size + split.test.items_of(user).size
                self.assertEqual(n, split.train.items_of(user).size + held)

    def test_every_evaluation_item_is_in_the_training_graph(self):
        split = split_transductive(self.dataset, 0.5, seed=11)

        assert_item_coverage(split)
        train_items = set(split.train.items.tolist())
        self.assertTrue(set(split.validation.items.tolist()) <= train_items)
        self.assertTrue(set(split.test.items.tolist()) <= train_items)

    def test_same_seed_same_split(self):
        first = split_transductive(self.dataset, 0.6, seed=5)
        second = split_transductive(self.dataset, 0.6, seed=5)

        self.assertEqual(pair_set(first.train), pair_set(second.train))
        self.assertEqual(pair_set(first.test), pair_set(second.test))

    def test_rejects_unusable_fractions(self):
        with self.subTest("outside (0, 1)"):
            with self.assertRaises(InvalidValueError):
                split_transductive(self.dataset, 1.0, seed=0)

        with self.subTest("no held-out interaction"):
            single = dataset_from_labels(["u1", "u2", "u2"], ["a", "a", "b"])
            with self.assertRaises(ConfigurationError):
                split_transductive(single, 0.8, seed=0)


class InductiveSplitTests(unittest.TestCase):
    def setUp(self):
        self.dataset = DatasetFactory(num_users=40, num_items=25, density=0.35)

    def test_users_are_partitioned(self):
        split = split_inductive(self.dataset, 0.6, 0.5, seed=2)

        train, val, test = set(split.train_users), set(split.val_users), set(split.test_users)

        self.assertEqual(math.floor(0.6 * 40), len(train))
        self.assertEqual(set(), train & val)
        self.assertEqual(set(), train & test)
        self.assertEqual(set(), val & test)
        self.assertTrue(val | test <= set(range(40)) - train)

    def test_fold_in_and_fold_out(self):
        split = split_inductive(self.dataset, 0.6, 0.5, seed=2)
        train_items = set(split.train.items.tolist())

        for user in np.concatenate([split.val_users, split.test_users]):
            fold_in, fold_out = split.fold_in[int(user)], split.fold_out[int(user)]
            with self.subTest(user=int(user)):
                self.assertEqual(set(), set(fold_in) & set(fold_out))
                self.assertEqual(max(1, math.floor(0.5 * (fold_in.size + fold_out.size))), fold_in.size)
                self.assertTrue(set(fold_in.tolist()) | set(fold_out.tolist()) <= train_items)

    def test_training_graph_only_holds_training_users(self):
        split = split_inductive(self.dataset, 0.6, 0.5, seed=2)

        self.assertEqual(set(split.train_users.tolist()), set(split.train.users.tolist()))

    def test_same_seed_same_split(self):
        first = split_inductive(self.dataset, 0.6, 0.5, seed=9)
        second = split_inductive(self.dataset, 0.6, 0.5, seed=9)

        self.assertEqual(first.test_users.tolist(), second.test_users.tolist())
        for user, items in first.fold_in.items():
            self.assertEqual(items.tolist(), second.fold_in[user].tolist())
