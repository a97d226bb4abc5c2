"""
Split manifest repository implementation (adapter).
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from src.domain.data.entities import Dataset, InductiveSplit, TransductiveSplit
from src.domain.data.repositories import Split, SplitRepository
from src.domain.data.value_objects import Protocol
from src.domain.shared.exceptions import CacheFormatError

logger = logging.getLogger(__name__)

MANIFEST = "split.tsv"
SUMMARY = "summary.json"


def _rows(dataset_parts: List[Tuple[str, np.ndarray, np.ndarray]]) -> pd.DataFrame:
    frames = [pd.DataFrame({"user": users, "item": items, "part": part}) for part, users, items in dataset_parts]
    return pd.concat(frames, ignore_index=True)


def _fold_rows(split: InductiveSplit, prefix: str, users: np.ndarray) -> List[Tuple[str, np.ndarray, np.ndarray]]:
    parts = []
    for name, folds in (("fold_in", split.fold_in), ("fold_out", split.fold_out)):
        user_col = [np.full(folds[int(u)].size, u, dtype=np.int64) for u in users]
        item_col = [folds[int(u)] for u in users]
        parts.append(
            (
                f"{prefix}_{name}",
                np.concatenate(user_col) if user_col else np.empty(0, dtype=np.int64),
                np.concatenate(item_col) if item_col else np.empty(0, dtype=np.int64),
            )
        )
    return parts


class FileSplitRepository(SplitRepository):
    """
    `split.tsv` holds one `user<TAB>item<TAB>part` line per interaction (dense ids),
    `summary.json` the protocol, parameters, seed, counts, drops and id labels.
    """

    def save(self, artifact: Split, path: Path) -> Path:
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)

        if isinstance(artifact, TransductiveSplit):
            parts = [
                (name, getattr(artifact, name).users, getattr(artifact, name).items)
                for name in ("train", "validation", "test")
            ]
            params = {"rho": artifact.rho}
            dropped = {"moved_to_train": artifact.moved_to_train}
        else:
            parts = [("train", artifact.train.users, artifact.train.items)]
            parts += _fold_rows(artifact, "validation", artifact.val_users)
            parts += _fold_rows(artifact, "test", artifact.test_users)
            params = {"mu": artifact.mu, "eta": artifact.eta}
            dropped = {"interactions": artifact.dropped_interactions, "users": artifact.dropped_users}

        frame = _rows(parts)
        frame.to_csv(path / MANIFEST, sep="\t", header=False, index=False)

        labels = artifact.train
        summary = {
            "protocol": artifact.protocol.value,
            "params": params,
            "seed": artifact.seed,
            "num_users": artifact.num_users,
            "num_items": artifact.num_items,
            "counts": {part: int(n) for part, n in frame["part"].value_counts().sort_index().items()},
            "dropped": dropped,
            "user_labels": list(labels.user_labels) if labels.user_labels else None,
            "item_labels": list(labels.item_labels) if labels.item_labels else None,
        }
        if isinstance(artifact, InductiveSplit):
            summary["users"] = {
                "train": artifact.train_users.tolist(),
                "validation": artifact.val_users.tolist(),
                "test": artifact.test_users.tolist(),
            }
        (path / SUMMARY).write_text(json.dumps(summary, indent=2, sort_keys=True))
        logger.info(f"Saved {artifact.protocol.value} split manifest to {path}")
        return path

    def load(self, path: Path) -> Split:
        path = Path(path)
        try:
            summary = json.loads((path / SUMMARY).read_text())
            protocol = Protocol(summary["protocol"])
            num_users, num_items = summary["num_users"], summary["num_items"]
        except (KeyError, ValueError) as e:
            raise CacheFormatError(f"Corrupt split summary in {path}: {e}", details={"path": str(path)})

        frame = pd.read_csv(
            path / MANIFEST,
            sep="\t",
            header=None,
            names=["user", "item", "part"],
            dtype={"user": np.int64, "item": np.int64, "part": str},
        )
        user_labels = tuple(summary["user_labels"]) if summary.get("user_labels") else None
        item_labels = tuple(summary["item_labels"]) if summary.get("item_labels") else None

        def dataset_of(rows: pd.DataFrame) -> Dataset:
            return Dataset(
                users=rows["user"].to_numpy(),
                items=rows["item"].to_numpy(),
                num_users=num_users,
                num_items=num_items,
                user_labels=user_labels,
                item_labels=item_labels,
            )

        parts = {name: rows for name, rows in frame.groupby("part", sort=False)}
        empty = frame.iloc[0:0]

        if protocol is Protocol.TRANSDUCTIVE:
            return TransductiveSplit(
                train=dataset_of(parts.get("train", empty)),
                validation=dataset_of(parts.get("validation", empty)),
                test=dataset_of(parts.get("test", empty)),
                rho=summary["params"]["rho"],
                seed=summary["seed"],
                moved_to_train=summary["dropped"].get("moved_to_train", 0),
            )

        fold_in: Dict[int, np.ndarray] = {}
        fold_out: Dict[int, np.ndarray] = {}
        for name, rows in parts.items():
            if name == "train":
                continue
            target = fold_in if name.endswith("fold_in") else fold_out
            for user, group in rows.groupby("user"):
                target[int(user)] = np.sort(group["item"].to_numpy())

        users = summary["users"]
        return InductiveSplit(
            dataset=dataset_of(frame),
            train_users=np.asarray(users["train"], dtype=np.int64),
            val_users=np.asarray(users["validation"], dtype=np.int64),
            test_users=np.asarray(users["test"], dtype=np.int64),
            mu=summary["params"]["mu"],
            eta=summary["params"]["eta"],
            seed=summary["seed"],
            fold_in=fold_in,
            fold_out=fold_out,
            dropped_interactions=summary["dropped"].get("interactions", 0),
            dropped_users=summary["dropped"].get("users", 0),
        )
