import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from src.common.factories import DatasetFactory
from src.domain.data.events import CoverageRepairedEvent
from src.domain.shared.exceptions import NumericalError
from src.domain.training.events import TrainingFinishedEvent
from src.infrastructure.dependency_injection.container import get_container


def write_dataset(path: Path, **factory_kwargs) -> None:
    dataset = DatasetFactory(**factory_kwargs)
    lines = [
        f"{dataset.user_label(int(user))}\t{dataset.item_label(int(item))}\t5\t{position}"
        for position, (user, item) in enumerate(zip(dataset.users, dataset.items))
    ]
    path.write_text("\n".join(lines) + "\n")


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.ratings = self.tmp / "ratings.dat"
        write_dataset(self.ratings, num_users=12, num_items=20, density=0.3, seed=5)
        self.run_dir = self.tmp / "run"

    def tearDown(self):
        self._tmp.cleanup()

    def write_config(self, name="run.json", **overrides) -> Path:
        config = {
            "dataset": {"path": str(self.ratings), "min_interactions": 1},
            "split": {"rho": 0.6},
            "model": {"dim": 8, "layers": 2},
            "sampling": {"n_pos": 3, "n_neg": 10, "top_t": 30},
            "training": {"max_epochs": 3, "eval_every": 1, "patience": 2, "ks": [5, 10], "target_k": 10},
            "seed": 3,
        }
        for group, values in overrides.items():
            config[group] = {**config.get(group, {}), **values} if isinstance(values, dict) else values
        path = self.tmp / name
        path.write_text(json.dumps(config))
        return path

    def call(self, name, out_dir=None, **options) -> dict:
        out = StringIO()
        call_command(name, out_dir=out_dir or self.run_dir, stdout=out, **options)
        return json.loads(out.getvalue())

    def read(self, name) -> dict:
        return json.loads((self.run_dir / name).read_text())


class TransductiveCommandTests(CommandTestCase):
    def test_split_train_eval_topk(self):
        config = self.write_config()

        split = self.call("split", config=config)

        self.assertEqual("transductive", split["protocol"])
        self.assertEqual(12, split["dataset"]["num_users"])
        self.assertTrue((self.run_dir / "split" / "split.tsv").exists())

        trained = self.call("train", config=config)

        self.assertIn(trained["stop_reason"], ("max_epochs", "early_stop"))
        for name in ("config.json", "checkpoint.bin", "history.json", "report_test.json", "summary.json", "train.log"):
            with self.subTest(file=name):
                self.assertTrue((self.run_dir / name).exists())
        finished = get_container().event_publisher.events_of(TrainingFinishedEvent, trained["run_id"])
        self.assertEqual([trained["stop_reason"]], [event.reason for event in finished])
        self.assertGreaterEqual(self.read("summary.json")["wall_seconds"], 0.0)
        trained_reports = {part: self.read(f"report_{part}.json") for part in ("validation", "test")}

        evaluated = self.call("eval")

        self.assertEqual(["validation", "test"], [report["part"] for report in evaluated["reports"]])
        for part, report in trained_reports.items():
            with self.subTest(part=part):
                self.assertEqual(report, self.read(f"report_{part}.json"))

        topk = self.call("topk", users="u000,u001", k=3)

        self.assertEqual({"u000", "u001"}, set(topk["lists"]))
        for user, entries in topk["lists"].items():
            with self.subTest(user=user):
                self.assertEqual([1, 2, 3], [entry["rank"] for entry in entries])
        self.assertEqual(3, self.read("topk.json")["k"])

    def test_stored_config_is_reused(self):
        self.call("split", config=self.write_config())

        trained = self.call("train")

        self.assertEqual(str(self.run_dir), trained["run_dir"])

    def test_same_seed_same_artifacts(self):
        config = self.write_config()
        first, second = self.tmp / "first", self.tmp / "second"

        self.call("train", out_dir=first, config=config)
        self.call("train", out_dir=second, config=config)

        for name in ("checkpoint.bin", "report_validation.json", "report_test.json"):
            with self.subTest(file=name):
                self.assertEqual((first / name).read_bytes(), (second / name).read_bytes())

    def test_ppr_sampling(self):
        config = self.write_config(sampling={"strategy": "ppr"})

        with self.subTest("cache missing"):
            with self.assertRaises(CommandError):
                self.call("train", config=config)

        cache = self.call("ppr", config=config)

        self.assertEqual(str(self.run_dir / "ppr_cache.bin"), cache["path"])
        self.assertGreater(cache["num_users"], 0)
        self.assertEqual(30, cache["top_t"])

        trained = self.call("train", config=config)

        self.assertTrue(Path(trained["checkpoint_path"]).exists())

    def test_background_tasks_run_eagerly(self):
        config = self.write_config(sampling={"strategy": "ppr"})

        queued = self.call("ppr", config=config, background=True)

        self.assertEqual(str(self.run_dir), queued["run_dir"])
        self.assertTrue((self.run_dir / "ppr_cache.bin").exists())

        self.call("train", config=config, background=True)

        self.assertTrue((self.run_dir / "checkpoint.bin").exists())

    def test_divergence_writes_diagnostics(self):
        error = NumericalError("Non-finite loss", block="loss", details={"users": [0, 1]})

        with mock.patch("src.application.training.use_cases.run_epoch", side_effect=error):
            with self.assertRaises(CommandError) as context:
                self.call("train", config=self.write_config())

        message = json.loads(str(context.exception))
        self.assertEqual("loss", message["extra"]["block"])
        diagnostics = self.read("abort_diagnostics.json")
        self.assertEqual(1, diagnostics["epoch"])
        self.assertEqual([0, 1], diagnostics["users"])
        self.assertFalse((self.run_dir / "checkpoint.bin").exists())


class CoverageRepairTests(CommandTestCase):
    def test_items_only_held_out_are_moved_into_train(self):
        lines = [f"u{user}\ti{user * 10 + item}\t5\t0" for user in range(4) for item in range(10)]
        self.ratings.write_text("\n".join(lines) + "\n")

        with self.assertLogs("src.infrastructure.events.handlers", level="WARNING") as logs:
            split = self.call("split", config=self.write_config(split={"rho": 0.2}))

        repaired = get_container().event_publisher.events_of(CoverageRepairedEvent, str(self.run_dir))
        self.assertEqual([32], [event.moved_to_train for event in repaired])
        self.assertEqual("transductive", repaired[0].protocol)
        self.assertEqual({"moved_to_train": 32}, split["dropped"])
        self.assertIn("Moved 32", logs.output[0])

    def test_no_event_without_repair(self):
        lines = [f"u{user}\ti{item}\t5\t0" for user in range(6) for item in range(5)]
        self.ratings.write_text("\n".join(lines) + "\n")

        self.call("split", config=self.write_config())

        self.assertEqual([], get_container().event_publisher.events_of(CoverageRepairedEvent, str(self.run_dir)))


class InductiveCommandTests(CommandTestCase):
    def test_end_to_end(self):
        write_dataset(self.ratings, num_users=40, num_items=20, density=0.35, seed=9)
        config = self.write_config(split={"protocol": "inductive", "mu": 0.6, "eta": 0.5})

        split = self.call("split", config=config)
        trained = self.call("train", config=config)
        evaluated = self.call("eval", part="test")

        self.assertEqual("inductive", split["protocol"])
        self.assertGreater(trained["test"]["users_evaluated"], 0)
        self.assertEqual(trained["test"]["users_evaluated"], evaluated["reports"][0]["users_evaluated"])


class CommandErrorTests(CommandTestCase):
    def test_errors(self):
        cases = [
            ("split", {"config": self.tmp / "missing.json"}, "does not exist"),
            ("split", {"config": self.write_config("bad_rho.json", split={"rho": 1.5})}, "Validation error"),
            ("train", {}, "No --config given"),
            ("eval", {"config": self.write_config()}, "split"),
        ]
        for name, options, fragment in cases:
            with self.subTest(command=name, fragment=fragment):
                with self.assertRaises(CommandError) as context:
                    self.call(name, **options)
                self.assertIn(fragment, str(context.exception))

    def test_eval_without_checkpoint(self):
        config = self.write_config()
        self.call("split", config=config)

        with self.assertRaises(CommandError) as context:
            self.call("eval", config=config)

        self.assertIn("No checkpoint", json.loads(str(context.exception))["message"])

    def test_unknown_topk_user(self):
        config = self.write_config()
        self.call("train", config=config)

        with self.assertRaises(CommandError) as context:
            self.call("topk", users="nobody")

        self.assertIn("nobody", str(context.exception))
