"""
Run directory repository implementation (adapter).
"""

import json
import logging
from pathlib import Path
from typing import Any

from src.domain.training.repositories import RunRepository

logger = logging.getLogger(__name__)


class FileRunRepository(RunRepository):
    """
    JSON artifacts are written with sorted keys so identical runs give identical files.
    """

    def __init__(self, out_dir: Path):
        self._out_dir = Path(out_dir)

    def run_dir(self) -> Path:
        self._out_dir.mkdir(parents=True, exist_ok=True)
        return self._out_dir

    def write_json(self, name: str, payload: Any) -> Path:
        path = self.run_dir() / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True))
        logger.debug(f"Wrote {path}")
        return path

    def read_json(self, name: str) -> Any:
        return json.loads((self._out_dir / f"{name}.json").read_text())
