"""
Run directory repository interface (port).
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any


class RunRepository(ABC):
    """
    Location of every artifact a run produces.
    """

    CONFIG = "config"
    HISTORY = "history"
    SUMMARY = "summary"
    DIAGNOSTICS = "abort_diagnostics"
    TOPK = "topk"

    @abstractmethod
    def run_dir(self) -> Path:
        pass

    @abstractmethod
    def write_json(self, name: str, payload: Any) -> Path:
        """Write `payload` as `<name>.json` inside the run directory."""
        pass

    @abstractmethod
    def read_json(self, name: str) -> Any:
        pass

    def has_json(self, name: str) -> bool:
        return (self.run_dir() / f"{name}.json").exists()

    @staticmethod
    def report_name(part: str) -> str:
        return f"report_{part}"

    def checkpoint_path(self) -> Path:
        return self.run_dir() / "checkpoint.bin"

    def ppr_cache_path(self) -> Path:
        return self.run_dir() / "ppr_cache.bin"

    def log_path(self) -> Path:
        return self.run_dir() / "train.log"

    def split_path(self) -> Path:
        return self.run_dir() / "split"
