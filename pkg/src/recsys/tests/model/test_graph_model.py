import unittest

import numpy as np

from src.common.factories import DatasetFactory, ModelConfigFactory
from src.domain.data.services import dataset_from_labels
from src.domain.data.value_objects import Protocol
from src.domain.model.entities import EmbeddingTable, GraphRecommender
from src.domain.model.optimizer import AdamState, adam_step
from src.domain.model.services import (
    backward,
    build_graph,
    forward,
    infer_user,
    infer_users,
    init_embeddings,
    item_layers_of,
    pool,
    propagate,
)
from src.domain.model.value_objects import Pooling
from src.domain.shared.exceptions import (
    ConfigurationError,
    EntityNotFoundError,
    InferenceError,
    InvalidValueError,
    NumericalError,
    StateError,
)


def dense_operator(graph) -> np.ndarray:
    """Symmetric normalized adjacency over users then items."""
    adj = graph.user_adj.toarray()
    n_users, n_items = adj.shape
    operator = np.zeros((n_users + n_items, n_users + n_items))
    operator[:n_users, n_users:] = adj
    operator[n_users:, :n_users] = adj.T
    return operator


def make_model(dataset, **config) -> GraphRecommender:
    config = ModelConfigFactory(**config)
    graph = build_graph(dataset)
    rng = np.random.default_rng(0)
    table = init_embeddings(graph.num_users, graph.num_items, config, rng)
    return GraphRecommender(id="model", config=config, graph=graph, embeddings=table)


class BuildGraphTests(unittest.TestCase):
    def test_normalization_coefficients(self):
        dataset = dataset_from_labels(["a", "a", "b"], ["x", "y", "y"])

        graph = build_graph(dataset)

        self.assertEqual(3, graph.num_edges)
        self.assertAlmostEqual(1 / np.sqrt(2 * 1), graph.norm_coeff(0, 0))
        self.assertAlmostEqual(1 / np.sqrt(2 * 2), graph.norm_coeff(0, 1))
        self.assertAlmostEqual(1 / np.sqrt(1 * 2), graph.norm_coeff(1, 1))
        self.assertEqual([0, 1], graph.neighbors_of_user(0).tolist())

    def test_fingerprint_depends_on_structure_only(self):
        dataset = DatasetFactory(seed=1)

        self.assertEqual(build_graph(dataset).fingerprint, build_graph(dataset).fingerprint)
        self.assertNotEqual(build_graph(dataset).fingerprint, build_graph(DatasetFactory(seed=2)).fingerprint)

    def test_errors(self):
        dataset = DatasetFactory()
        graph = build_graph(dataset)

        with self.subTest("unknown user"):
            with self.assertRaises(EntityNotFoundError):
                graph.neighbors_of_user(dataset.num_users)

        with self.subTest("empty dataset"):
            with self.assertRaises(InvalidValueError):
                build_graph(dataset.with_pairs(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)))


class PropagationTests(unittest.TestCase):
    def setUp(self):
        self.dataset = DatasetFactory(num_users=7, num_items=9)
        self.model = make_model(self.dataset, layers=3)

    def test_layers_are_powers_of_the_normalized_adjacency(self):
        graph, table = self.model.graph, self.model.embeddings
        operator = dense_operator(graph)
        stacked = np.vstack([table.user_emb, table.item_emb])

        layers = propagate(graph, table, 3)

        self.assertEqual(4, len(layers))
        for k, layer in enumerate(layers):
            expected = np.linalg.matrix_power(operator, k) @ stacked
            with self.subTest(layer=k):
                np.testing.assert_allclose(expected[: graph.num_users], layer.user_emb, atol=1e-12)
                np.testing.assert_allclose(expected[graph.num_users :], layer.item_emb, atol=1e-12)

    def test_zero_layers_pool_to_the_input(self):
        table = self.model.embeddings

        pooled = pool(propagate(self.model.graph, table, 0), Pooling.MEAN)

        np.testing.assert_array_equal(table.item_emb, pooled.item_emb)
        np.testing.assert_array_equal(table.user_emb, pooled.user_emb)

    def test_mean_and_sum_pooling(self):
        layers = propagate(self.model.graph, self.model.embeddings, 3)

        summed = pool(layers, Pooling.SUM)
        averaged = pool(layers, Pooling.MEAN)

        np.testing.assert_allclose(summed.item_emb / 4, averaged.item_emb)
        np.testing.assert_allclose(sum(layer.user_emb for layer in layers), summed.user_emb)

    def test_inductive_users_start_from_zero(self):
        model = make_model(self.dataset, layers=2, mode=Protocol.INDUCTIVE)

        layers = propagate(model.graph, model.embeddings, 2, inductive=True)

        self.assertIsNone(model.embeddings.user_emb)
        np.testing.assert_array_equal(np.zeros_like(layers[0].user_emb), layers[0].user_emb)


class BackwardTests(unittest.TestCase):
    def _objective(self, model, users, items, weights) -> float:
        pooled = forward(model)
        scores = np.einsum("bd,bnd->bn", pooled.user_emb[users], pooled.item_emb[items])
        return float((weights * scores).sum())

    def _check_against_finite_differences(self, model):
        rng = np.random.default_rng(4)
        users = np.array([0, 2, 2, 5])
        items = rng.integers(0, model.graph.num_items, size=(4, 3))
        weights = rng.normal(size=(4, 3))

        self._objective(model, users, items, weights)
        grads = backward(model, users, items, weights)

        eps = 1e-6
        for name, block in model.embeddings.parameters().items():
            for index in [(0, 0), (3, 1), (block.shape[0] - 1, block.shape[1] - 1)]:
                original = block[index]
                block[index] = original + eps
                up = self._objective(model, users, items, weights)
                block[index] = original - eps
                down = self._objective(model, users, items, weights)
                block[index] = original
                with self.subTest(block=name, index=index):
                    self.assertAlmostEqual((up - down) / (2 * eps), grads[name][index], places=6)

    def test_transductive_gradients(self):
        for pooling in (Pooling.MEAN, Pooling.SUM):
            with self.subTest(pooling=pooling):
                self._check_against_finite_differences(
                    make_model(DatasetFactory(num_users=8, num_items=10), pooling=pooling)
                )

    def test_inductive_gradients_only_touch_items(self):
        model = make_model(DatasetFactory(num_users=8, num_items=10), mode=Protocol.INDUCTIVE)

        self._check_against_finite_differences(model)
        forward(model)
        grads = backward(model, np.array([1]), np.array([[0, 1]]), np.ones((1, 2)))

        self.assertEqual(["item_emb"], list(grads))

    def test_backward_needs_a_forward_pass(self):
        model = make_model(DatasetFactory())

        with self.assertRaises(StateError):
            backward(model, np.array([0]), np.array([[0]]), np.ones((1, 1)))


class InferUserTests(unittest.TestCase):
    def setUp(self):
        self.dataset = DatasetFactory(num_users=10, num_items=12)
        self.model = make_model(self.dataset, layers=2, mode=Protocol.INDUCTIVE)

    def test_training_user_history_reproduces_its_representation(self):
        pooled = forward(self.model)
        item_layers = item_layers_of(self.model)

        for user in (0, 4, 9):
            inferred = infer_user(self.dataset.items_of(user), item_layers, self.model.graph, self.model.config)
            with self.subTest(user=user):
                np.testing.assert_allclose(pooled.user_emb[user], inferred, atol=1e-12)

    def test_batch_inference_matches_single_users(self):
        item_layers = item_layers_of(self.model)
        fold_ins = [np.array([0, 3]), np.array([5]), np.array([1, 2, 7])]

        batch = infer_users(fold_ins, item_layers, self.model.graph, self.model.config)

        for row, fold_in in enumerate(fold_ins):
            single = infer_user(fold_in, item_layers, self.model.graph, self.model.config)
            np.testing.assert_allclose(single, batch[row])

    def test_errors(self):
        item_layers = item_layers_of(self.model)

        with self.subTest("empty fold-in"):
            with self.assertRaises(InferenceError):
                infer_user(np.array([], dtype=np.int64), item_layers, self.model.graph, self.model.config)

        with self.subTest("unknown item"):
            with self.assertRaises(InferenceError):
                infer_user(np.array([99]), item_layers, self.model.graph, self.model.config)

        with self.subTest("transductive model"):
            config = ModelConfigFactory(layers=2)
            with self.assertRaises(ConfigurationError):
                infer_user(np.array([0]), item_layers, self.model.graph, config)


class AdamTests(unittest.TestCase):
    def test_first_step_moves_by_the_learning_rate(self):
        params = {"item_emb": np.array([[1.0, -1.0]])}
        grads = {"item_emb": np.array([[0.5, -2.0]])}
        state = AdamState(lr=0.1)

        adam_step(params, grads, state)

        np.testing.assert_allclose(np.array([[0.9, -0.9]]), params["item_emb"], atol=1e-6)
        self.assertEqual(1, state.step)

    def test_zero_learning_rate_keeps_parameters(self):
        params = {"item_emb": np.ones((2, 2))}
        state = AdamState(lr=0.0)

        for _ in range(3):
            adam_step(params, {"item_emb": np.full((2, 2), 3.0)}, state)

        np.testing.assert_array_equal(np.ones((2, 2)), params["item_emb"])

    def test_non_finite_gradient_leaves_parameters_alone(self):
        table = EmbeddingTable(item_emb=np.ones((2, 2)), user_emb=np.ones((1, 2)))
        grads = {"item_emb": np.zeros((2, 2)), "user_emb": np.array([[np.nan, 0.0]])}

        with self.assertRaises(NumericalError) as context:
            adam_step(table.parameters(), grads, AdamState())

        self.assertEqual("user_emb", context.exception.block)
        np.testing.assert_array_equal(np.ones((2, 2)), table.item_emb)
