"""
Interaction reader implementation (adapter).
Parses tab, comma, whitespace or `::` separated interaction logs with pandas.
"""

import logging
import re
from pathlib import Path
from typing import Optional

import pandas as pd

from src.domain.data.entities import Dataset
from src.domain.data.repositories import InteractionReader
from src.domain.data.services import dataset_from_labels
from src.domain.shared.exceptions import ConfigurationError, EmptyDatasetError, ParseError

logger = logging.getLogger(__name__)

COLUMNS = ["user", "item", "rating", "timestamp"]
_USER_COLUMNS = {"user", "userid", "user_id", "reviewer_id", "reviewerid"}
_ITEM_COLUMNS = {"item", "itemid", "item_id", "movie", "movieid", "movie_id", "business_id", "asin"}
_PANDAS_LINE = re.compile(r"line (\d+)")


def detect_separator(line: str) -> str:
    if "::" in line:
        return "::"
    if "\t" in line:
        return "\t"
    if "," in line:
        return ","
    return r"\s+"


def looks_like_header(line: str, separator: str) -> bool:
    """A header names the user and item columns exactly; ids such as `user1` are data."""
    pattern = separator if separator == r"\s+" else re.escape(separator)
    fields = [field.strip().lower() for field in re.split(pattern, line.strip())]
    return len(fields) >= 2 and fields[0] in _USER_COLUMNS and fields[1] in _ITEM_COLUMNS


def _first_line(path: Path) -> str:
    with open(path, encoding="utf-8", errors="replace") as handle:
        for line in handle:
            if line.strip():
                return line.rstrip("\n")
    raise EmptyDatasetError(f"Interaction file {path} is empty", details={"path": str(path)})


class PandasInteractionReader(InteractionReader):
    """
    Columns are user, item[, rating[, timestamp]]. Raw ids are kept as labels.
    """

    def read(self, path: Path, rating_threshold: Optional[float] = None) -> Dataset:
        path = Path(path)
        first = _first_line(path)
        separator = detect_separator(first)
        header = looks_like_header(first, separator)

        try:
            frame = pd.read_csv(
                path,
                sep=separator,
                header=None,
                names=COLUMNS,
                dtype=str,
                engine="python",
                skiprows=1 if header else 0,
                skip_blank_lines=False,
            )
        except pd.errors.ParserError as e:
            match = _PANDAS_LINE.search(str(e))
            line = int(match.group(1)) if match else None
            raise ParseError(f"Malformed row in {path}: {e}", line=line, details={"path": str(path)})

        offset = 2 if header else 1
        blank = frame.isna().all(axis=1)
        frame = frame[~blank]

        missing = frame["item"].isna() | frame["user"].isna()
        if missing.any():
            line = int(frame.index[missing.to_numpy()][0]) + offset
            raise ParseError(f"Row at line {line} of {path} has fewer than two fields", line=line)

        if rating_threshold is not None:
            if frame["rating"].isna().all():
                raise ConfigurationError(
                    f"A rating threshold was given but {path} has no rating column",
                    details={"rating_threshold": rating_threshold},
                )
            ratings = pd.to_numeric(frame["rating"], errors="coerce")
            bad = ratings.isna()
            if bad.any():
                line = int(frame.index[bad.to_numpy()][0]) + offset
                raise ParseError(f"Unparseable rating at line {line} of {path}", line=line)
            kept = ratings >= rating_threshold
            logger.info(f"Kept {int(kept.sum())} of {len(frame)} rows with rating >= {rating_threshold}")
            frame = frame[kept.to_numpy()]

        if frame.empty:
            raise EmptyDatasetError(f"No interaction left in {path}", details={"path": str(path)})

        dataset = dataset_from_labels(frame["user"].str.strip().tolist(), frame["item"].str.strip().tolist())
        logger.info(
            f"Loaded {path.name}: {dataset.num_users} users, {dataset.num_items} items, {len(dataset)} interactions"
        )
        return dataset
