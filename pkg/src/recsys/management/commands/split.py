from src.infrastructure.dependency_injection.container import get_container
from src.recsys.commands import RecsysCommand


class Command(RecsysCommand):
    help = "Load, filter and split the configured dataset into <out-dir>/split."

    config_required = True

    def run(self, **options):
        runs = self.runs(options)
        config = self.run_config(options, runs)
        return get_container().create_split_use_case.execute(config, runs)
