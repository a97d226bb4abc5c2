import itertools
import unittest

import numpy as np

from src.common.factories import DatasetFactory, ModelConfigFactory, RunConfigFactory, TrainingConfigFactory
from src.domain.data.services import dataset_from_labels
from src.domain.data.value_objects import Protocol
from src.domain.evaluation.entities import MetricReport, UserMetrics
from src.domain.losses.value_objects import LossConfig, LossVariant
from src.domain.model.entities import GraphRecommender
from src.domain.model.optimizer import AdamState
from src.domain.model.services import build_graph, init_embeddings
from src.domain.ppr.services import UniformSamplerProvider
from src.domain.shared.exceptions import ConfigurationError, InvalidValueError, NumericalError
from src.domain.training.entities import TrainingRun
from src.domain.training.services import (
    batch_loss_and_grads,
    build_batch,
    early_stop,
    rng_stream,
    run_epoch,
    train_step,
)
from src.domain.training.value_objects import OptimizerConfig, StopDecision


def make_model(dataset, seed=0, **config) -> GraphRecommender:
    config = ModelConfigFactory(**config)
    graph = build_graph(dataset)
    table = init_embeddings(graph.num_users, graph.num_items, config, rng_stream(seed, "init"))
    return GraphRecommender(id="model", config=config, graph=graph, embeddings=table)


def report_with(target: float, k: int = 10) -> MetricReport:
    return MetricReport(ks=(k,), part="validation", per_user=[UserMetrics(0, {k: target}, {k: target}, target, 1)])


class BuildBatchTests(unittest.TestCase):
    def setUp(self):
        self.dataset = DatasetFactory(num_users=10, num_items=30)
        self.sampler = UniformSamplerProvider(self.dataset.num_items)

    def test_positives_and_negatives_come_from_the_right_sets(self):
        batch = build_batch(range(10), self.dataset, self.sampler, 3, 7, np.random.default_rng(0))

        self.assertEqual((10, 3), batch.positives.shape)
        self.assertEqual((10, 7), batch.negatives.shape)
        self.assertEqual((10, 10), batch.items.shape)
        for row, user in enumerate(batch.users):
            items = self.dataset.items_of(int(user))
            with self.subTest(user=int(user)):
                self.assertTrue(np.isin(batch.positives[row], items).all())
                self.assertFalse(np.isin(batch.negatives[row], items).any())

    def test_positives_are_distinct_when_possible(self):
        batch = build_batch(range(10), self.dataset, self.sampler, 4, 1, np.random.default_rng(0))

        for row in batch.positives:
            self.assertEqual(4, np.unique(row).size)

    def test_short_histories_are_sampled_with_replacement(self):
        dataset = dataset_from_labels(["a", "b", "b", "b"], ["x", "x", "y", "z"])

        batch = build_batch([0], dataset, UniformSamplerProvider(dataset.num_items), 3, 2, np.random.default_rng(0))

        self.assertEqual([0, 0, 0], batch.positives[0].tolist())

    def test_users_without_training_items_are_skipped(self):
        others = self.dataset.users != 2
        dataset = self.dataset.with_pairs(self.dataset.users[others], self.dataset.items[others])

        batch = build_batch([1, 2, 3], dataset, self.sampler, 2, 2, np.random.default_rng(0))

        self.assertEqual([1, 3], batch.users.tolist())
        self.assertEqual(1, batch.skipped)


class EarlyStopTests(unittest.TestCase):
    def test_decisions(self):
        cases = [
            ([], 2, StopDecision.CONTINUE),
            ([0.1, 0.2, 0.3], 2, StopDecision.CONTINUE),
            ([0.3, 0.2], 2, StopDecision.CONTINUE),
            ([0.3, 0.2, 0.1], 2, StopDecision.STOP),
            ([0.3, 0.3, 0.3], 2, StopDecision.STOP),
            ([0.1, 0.5, 0.4, 0.4], 3, StopDecision.CONTINUE),
        ]
        for history, patience, expected in cases:
            with self.subTest(history=history, patience=patience):
                self.assertEqual(expected, early_stop(history, patience))

    def test_patience_must_be_positive(self):
        with self.assertRaises(InvalidValueError):
            early_stop([0.1], 0)

    def test_run_keeps_the_first_strict_best(self):
        run = TrainingRun(id="run", config=RunConfigFactory(training=TrainingConfigFactory(target_k=10)))

        values = [(1, 0.2), (2, 0.4), (3, 0.4), (4, 0.1)]

        results = [run.record_validation(epoch, report_with(value), 0.0, None) for epoch, value in values]

        self.assertEqual([True, True, False, False], results)
        self.assertEqual(2, run.best_epoch)
        self.assertEqual([0.2, 0.4, 0.4, 0.1], run.target_history)


class BatchGradientTests(unittest.TestCase):
    def test_batch_gradient_matches_finite_differences(self):
        dataset = DatasetFactory(num_users=6, num_items=9)
        for mode in (Protocol.TRANSDUCTIVE, Protocol.INDUCTIVE):
            model = make_model(dataset, mode=mode, dim=4)
            batch = build_batch(
                range(6), dataset, UniformSamplerProvider(dataset.num_items), 2, 4, np.random.default_rng(3)
            )
            loss_config = LossConfig(variant=LossVariant.NDCG, tau=0.5)

            _, grads = batch_loss_and_grads(model, batch, loss_config, l2=0.01)

            eps = 1e-6
            for name, block in model.embeddings.parameters().items():
                for index in [(0, 0), (2, 3), (5, 1)]:
                    original = block[index]
                    block[index] = original + eps
                    up, _ = batch_loss_and_grads(model, batch, loss_config, l2=0.01)
                    block[index] = original - eps
                    down, _ = batch_loss_and_grads(model, batch, loss_config, l2=0.01)
                    block[index] = original
                    with self.subTest(mode=mode, block=name, index=index):
                        self.assertAlmostEqual((up - down) / (2 * eps), grads[name][index], places=6)

    def test_non_finite_parameters_abort_with_diagnostics(self):
        dataset = DatasetFactory(num_users=4, num_items=8)
        model = make_model(dataset)
        model.embeddings.item_emb[0, 0] = np.inf
        batch = build_batch(range(4), dataset, UniformSamplerProvider(8), 2, 3, np.random.default_rng(0))

        with self.assertRaises(NumericalError) as context:
            batch_loss_and_grads(model, batch, LossConfig())

        details = context.exception.details
        self.assertEqual("scores", context.exception.block)
        self.assertEqual(batch.users.tolist(), details["users"])
        self.assertIn("item_emb", details["parameter_norms"])

    def test_zero_learning_rate_keeps_parameters(self):
        dataset = DatasetFactory(num_users=5, num_items=8)
        model = make_model(dataset)
        before = model.embeddings.copy()
        batch = build_batch(range(5), dataset, UniformSamplerProvider(8), 2, 3, np.random.default_rng(0))

        train_step(model, batch, LossConfig(), 0.0, AdamState(lr=0.0))

        np.testing.assert_array_equal(before.item_emb, model.embeddings.item_emb)
        np.testing.assert_array_equal(before.user_emb, model.embeddings.user_emb)

    def test_non_finite_update_aborts(self):
        dataset = DatasetFactory(num_users=5, num_items=8)
        model = make_model(dataset)
        batch = build_batch(range(5), dataset, UniformSamplerProvider(8), 2, 3, np.random.default_rng(0))

        with self.assertRaises(NumericalError) as context:
            train_step(model, batch, LossConfig(), 0.0, AdamState(lr=np.inf))

        self.assertEqual("item_emb", context.exception.block)


class EpochTests(unittest.TestCase):
    def _train(self, seed, epochs, variant=LossVariant.NDCG):
        dataset = DatasetFactory(num_users=16, num_items=24, density=0.3, seed=42)
        config = RunConfigFactory(
            seed=seed,
            loss=LossConfig(variant=variant, tau=0.5),
            optimizer=OptimizerConfig(lr=0.05, l2=0.0),
            training=TrainingConfigFactory(batch_users=4),
        )
        model = make_model(dataset, seed=seed, dim=8)
        sampler = UniformSamplerProvider(dataset.num_items)
        state = AdamState(lr=config.optimizer.lr)
        rng = rng_stream(seed, "batches")
        records = [run_epoch(epoch, model, dataset, sampler, config, state, rng) for epoch in range(1, epochs + 1)]
        return model, records

    def test_training_loss_goes_down(self):
        for variant, seed in itertools.product((LossVariant.NDCG, LossVariant.AP, LossVariant.BPR), range(1, 6)):
            _, records = self._train(seed=seed, epochs=40, variant=variant)
            with self.subTest(variant=variant, seed=seed):
                self.assertLess(np.mean([r.loss for r in records[-5:]]), np.mean([r.loss for r in records[:5]]))
                self.assertEqual(16, records[0].users)

    def test_same_seed_same_parameters(self):
        first, _ = self._train(seed=7, epochs=3)
        second, _ = self._train(seed=7, epochs=3)

        np.testing.assert_array_equal(first.embeddings.item_emb, second.embeddings.item_emb)
        np.testing.assert_array_equal(first.embeddings.user_emb, second.embeddings.user_emb)

    def test_rng_streams(self):
        with self.subTest("streams are independent"):
            self.assertNotEqual(rng_stream(0, "init").random(), rng_stream(0, "batches").random())

        with self.subTest("streams are reproducible"):
            self.assertEqual(rng_stream(3, "init").random(), rng_stream(3, "init").random())

        with self.subTest("unknown stream"):
            with self.assertRaises(InvalidValueError):
                rng_stream(0, "eval")


class RunConfigTests(unittest.TestCase):
    def test_model_mode_must_follow_the_protocol(self):
        with self.assertRaises(ConfigurationError):
            RunConfigFactory(model=ModelConfigFactory(mode=Protocol.INDUCTIVE))

    def test_hash_is_stable_and_sensitive(self):
        config = RunConfigFactory(seed=1)

        self.assertEqual(config.config_hash(), RunConfigFactory(seed=1).config_hash())
        self.assertNotEqual(config.config_hash(), RunConfigFactory(seed=2).config_hash())

    def test_target_cut_off_is_always_reported(self):
        training = TrainingConfigFactory(ks=(5,), target_k=20)

        self.assertEqual((5, 20), training.ks)
