from src.infrastructure.dependency_injection.container import get_container
from src.recsys.commands import RecsysCommand


class Command(RecsysCommand):
    help = "Train a model; writes config, checkpoint, history, reports and log into the run directory."

    config_required = True

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--background", action="store_true", help="Enqueue as a Celery task")

    def run(self, **options):
        runs = self.runs(options)
        config = self.run_config(options, runs)

        if options.get("background"):
            from src.tasks.tasks import train_run_task

            result = train_run_task.delay(config.to_dict(), str(runs.run_dir()))
            return {"task_id": result.id, "run_dir": str(runs.run_dir())}
        return get_container().train_model_use_case.execute(config, runs)
