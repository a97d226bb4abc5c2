from django.conf import settings

from src.infrastructure.dependency_injection.container import get_container
from src.recsys.commands import RecsysCommand


class Command(RecsysCommand):
    help = "Precompute the PPR cache of every training user."

    config_required = True

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--block-size", type=int, help="Users per power-iteration block")
        parser.add_argument("--n-jobs", type=int, help="Parallel blocks")
        parser.add_argument("--background", action="store_true", help="Enqueue as a Celery task")

    def run(self, **options):
        runs = self.runs(options)
        config = self.run_config(options, runs)
        block_size = options.get("block_size") or settings.RECSYS_PPR_BLOCK_SIZE
        n_jobs = options.get("n_jobs") or config.training.n_jobs

        if options.get("background"):
            from src.tasks.tasks import precompute_ppr_task

            result = precompute_ppr_task.delay(config.to_dict(), str(runs.run_dir()), block_size, n_jobs)
            return {"task_id": result.id, "run_dir": str(runs.run_dir())}
        return get_container().precompute_ppr_use_case.execute_for_run(config, runs, block_size, n_jobs)
