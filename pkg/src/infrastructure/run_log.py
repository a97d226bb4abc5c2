"""
File logging for the duration of a run.
"""

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator

FORMAT = "{asctime} {levelname} {name}: {message}"


@contextmanager
def run_log_file(path: Path, logger_name: str = "src", level: int = logging.INFO) -> Iterator[logging.Handler]:
    """Mirror the `logger_name` records into `path` (appending) while the block runs."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, encoding="utf-8")
    handler.setFormatter(logging.Formatter(FORMAT, style="{"))
    handler.setLevel(level)
    target = logging.getLogger(logger_name)
    target.addHandler(handler)
    try:
        yield handler
    finally:
        target.removeHandler(handler)
        handler.close()
