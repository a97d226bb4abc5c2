from dataclasses import asdict
from pathlib import Path

from src.infrastructure.dependency_injection.container import get_container
from src.recsys.commands import RecsysCommand

PARTS = {"validation": ("validation",), "test": ("test",), "both": ("validation", "test")}


class Command(RecsysCommand):
    help = "All-ranking evaluation of the run's checkpoint; writes report_<part>.json."

    config_required = True

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--part", choices=sorted(PARTS), default="both")
        parser.add_argument("--checkpoint", type=Path, help="Checkpoint file (default: <out-dir>/checkpoint.bin)")
        parser.add_argument("--n-jobs", type=int, help="Parallel evaluation threads")

    def run(self, **options):
        runs = self.runs(options)
        config = self.run_config(options, runs)
        results = get_container().evaluate_use_case.execute(
            config,
            runs,
            parts=PARTS[options["part"]],
            checkpoint_path=options.get("checkpoint"),
            n_jobs=options.get("n_jobs"),
        )
        return {"reports": [asdict(result) for result in results]}
