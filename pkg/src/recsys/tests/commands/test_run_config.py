import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase, override_settings
from rest_framework import serializers

from src.domain.data.value_objects import Protocol
from src.domain.losses.value_objects import LossVariant
from src.domain.training.value_objects import SamplingStrategy
from src.recsys.serializers import parse_run_config, read_config_file


class RunConfigSerializerTests(SimpleTestCase):
    def test_missing_groups_fall_back_to_settings(self):
        config = parse_run_config({"dataset": {"path": "ratings.dat"}})

        self.assertEqual("ratings.dat", config.dataset.path)
        self.assertEqual(8, config.model.dim)
        self.assertEqual(2, config.model.layers)
        self.assertEqual(LossVariant.NDCG, config.loss.variant)
        self.assertEqual(SamplingStrategy.UNIFORM, config.sampling.strategy)
        self.assertEqual(20, config.sampling.n_neg)

    @override_settings(RECSYS_DIM=16, RECSYS_SEED=5)
    def test_settings_are_read_at_validation_time(self):
        config = parse_run_config({})

        self.assertEqual(16, config.model.dim)
        self.assertEqual(5, config.seed)

    def test_model_mode_follows_the_protocol(self):
        config = parse_run_config({"split": {"protocol": "inductive"}})

        self.assertEqual(Protocol.INDUCTIVE, config.model.mode)

    def test_seed_override(self):
        config = parse_run_config({"seed": 1}, seed=9)

        self.assertEqual(9, config.seed)

    def test_stored_config_validates_to_the_same_run(self):
        config = parse_run_config(
            {
                "split": {"protocol": "inductive", "mu": 0.7},
                "loss": {"variant": "recall_at_k", "recall_levels": [5, 1]},
                "sampling": {"strategy": "ppr", "top_t": None, "scale": 2.5},
                "training": {"ks": [5], "target_k": 10},
            }
        )

        again = parse_run_config(json.loads(json.dumps(config.to_dict())))

        self.assertEqual(config, again)
        self.assertEqual(config.config_hash(), again.config_hash())
        self.assertEqual((1, 5), again.loss.recall_levels)
        self.assertEqual((5, 10), again.training.ks)

    def test_invalid_values(self):
        cases = [
            ({"split": {"rho": 1.5}}, "split"),
            ({"loss": {"variant": "hinge"}}, "loss"),
            ({"model": {"dim": 0}}, "model"),
            ({"split": {"rho": 1.0}}, "non_field_errors"),
            ({"ppr": {"alpha": 0.0}}, "non_field_errors"),
            ({"seed": -1}, "seed"),
        ]
        for data, field in cases:
            with self.subTest(data=data):
                with self.assertRaises(serializers.ValidationError) as context:
                    parse_run_config(data)
                self.assertIn(field, context.exception.detail)

    def test_config_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            json_path = Path(tmp) / "run.json"
            json_path.write_text(json.dumps({"seed": 4, "model": {"dim": 12}}))

            with self.subTest("json"):
                self.assertEqual({"seed": 4, "model": {"dim": 12}}, read_config_file(json_path))

            toml_path = Path(tmp) / "run.toml"
            toml_path.write_text('seed = 4\n\n[model]\ndim = 12\n\n[training]\nks = [5, 10]\n')

            with self.subTest("toml"):
                try:
                    data = read_config_file(toml_path)
                except serializers.ValidationError:
                    self.skipTest("TOML needs Python 3.11")
                self.assertEqual(12, parse_run_config(data).model.dim)
