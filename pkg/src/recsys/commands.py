"""
Shared base of the recsys management commands.
"""

import json
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Optional

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from src.application.shared.exceptions import ApplicationError
from src.domain.shared.exceptions import DomainException
from src.domain.training.repositories import RunRepository
from src.domain.training.value_objects import RunConfig
from src.infrastructure.dependency_injection.container import get_container
from src.recsys.serializers import parse_run_config, read_config_file


class RecsysCommand(BaseCommand):
    """
    Errors leave as CommandError carrying the message and its extra data:

    {
        "message": "Error message",
        "extra": {}
    }
    """

    config_required = False

    def add_arguments(self, parser):
        parser.add_argument("--config", type=Path, help="TOML or JSON run configuration")
        parser.add_argument("--out-dir", type=Path, help="Run directory (default: RECSYS_OUTPUT_DIR)")
        parser.add_argument("--seed", type=int, help="Override the configured seed")

    def handle(self, *args, **options):
        try:
            result = self.run(**options)
        except ApplicationError as e:
            raise CommandError(self._error(e.message, e.extra))
        except DomainException as e:
            raise CommandError(self._error(e.message, e.details))
        except serializers.ValidationError as e:
            raise CommandError(self._error("Validation error", {"fields": e.detail}))
        if result is not None:
            self.stdout.write(json.dumps(asdict(result) if is_dataclass(result) else result, indent=2, default=str))

    def run(self, **options):
        raise NotImplementedError

    @staticmethod
    def _error(message: str, extra) -> str:
        return json.dumps({"message": message, "extra": extra}, default=str)

    def runs(self, options) -> RunRepository:
        out_dir = options.get("out_dir") or Path(settings.RECSYS_OUTPUT_DIR)
        return get_container().run_repository(out_dir)

    def run_config(self, options, runs: RunRepository) -> Optional[RunConfig]:
        """
        The --config file when given, else the config.json stored in the run directory.
        """
        path = options.get("config")
        if path is not None:
            if not Path(path).exists():
                raise CommandError(self._error(f"Config file {path} does not exist", {"path": str(path)}))
            try:
                data = read_config_file(path)
            except ValueError as e:
                raise CommandError(self._error(f"Cannot parse {path}: {e}", {"path": str(path)}))
            return parse_run_config(data, seed=options.get("seed"))
        if runs.has_json(RunRepository.CONFIG):
            return parse_run_config(runs.read_json(RunRepository.CONFIG), seed=options.get("seed"))
        if self.config_required:
            raise CommandError(self._error("No --config given and no config.json in the run directory", {}))
        return None
