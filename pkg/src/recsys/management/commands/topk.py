from dataclasses import asdict

from src.infrastructure.dependency_injection.container import get_container
from src.recsys.commands import RecsysCommand


class Command(RecsysCommand):
    help = "Dump ranked top-k lists of some users as JSON (<out-dir>/topk.json)."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--users", help="Comma-separated raw user ids")
        parser.add_argument("--k", type=int, default=20)
        parser.add_argument("--part", choices=["validation", "test"], default="test")
        parser.add_argument("--limit", type=int, default=10, help="Users listed when --users is not given")

    def run(self, **options):
        runs = self.runs(options)
        users = [user.strip() for user in options["users"].split(",")] if options.get("users") else None
        result = get_container().top_k_use_case.execute(
            runs, users=users, k=options["k"], part=options["part"], limit=options["limit"]
        )
        return asdict(result)
