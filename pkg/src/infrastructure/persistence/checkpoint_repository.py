"""
Checkpoint repository implementation (adapter).
"""

import logging
from pathlib import Path

import numpy as np

from src.domain.data.value_objects import Protocol
from src.domain.model.entities import Checkpoint, EmbeddingTable
from src.domain.model.repositories import CheckpointRepository
from src.domain.model.value_objects import ModelConfig
from src.domain.shared.exceptions import CacheFormatError
from src.infrastructure.persistence.binary import FLOAT, read_array, read_header, write_header

logger = logging.getLogger(__name__)

BLOCKS = ("item_emb", "user_emb")


class FileCheckpointRepository(CheckpointRepository):
    """
    Header {dim, L, pooling, mode, counts, seed, ...} followed by item_emb and, for
    transductive models, user_emb as little-endian float32.
    """

    def save(self, artifact: Checkpoint, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        blocks = artifact.table.parameters()
        header = {**artifact.header(), "blocks": [name for name in BLOCKS if name in blocks]}
        with open(path, "wb") as handle:
            write_header(handle, header)
            for name in header["blocks"]:
                handle.write(np.ascontiguousarray(blocks[name], dtype=FLOAT).tobytes())
        logger.info(f"Saved checkpoint to {path}")
        return path

    def load(self, path: Path) -> Checkpoint:
        path = Path(path)
        data = path.read_bytes()
        header, offset = read_header(data, path)
        try:
            config = ModelConfig(
                layers=header["L"],
                pooling=header["pooling"],
                mode=Protocol(header["mode"]),
                dim=header["dim"],
                init_std=header.get("init_std", 0.1),
            )
            num_users, num_items = header["counts"]["users"], header["counts"]["items"]
            names = list(header["blocks"])
        except (KeyError, TypeError, ValueError) as e:
            raise CacheFormatError(f"Incomplete checkpoint header in {path}: {e}", details={"path": str(path)})

        rows = {"item_emb": num_items, "user_emb": num_users}
        arrays = {}
        for index, name in enumerate(names):
            if not isinstance(name, str) or name not in rows or name in arrays:
                raise CacheFormatError(
                    f"{path} record {index} has an unknown or repeated block {name!r}",
                    record=index,
                    details={"path": str(path), "block": name},
                )
            block, offset = read_array(data, offset, FLOAT, rows[name] * config.dim, path, record=index)
            arrays[name] = block.astype(np.float64).reshape(rows[name], config.dim)
        if offset != len(data):
            raise CacheFormatError(f"{path} has {len(data) - offset} trailing bytes", details={"path": str(path)})
        if "item_emb" not in arrays:
            raise CacheFormatError(f"{path} has no item_emb block", details={"path": str(path)})

        return Checkpoint(
            config=config,
            table=EmbeddingTable(item_emb=arrays["item_emb"], user_emb=arrays.get("user_emb")),
            num_users=num_users,
            num_items=num_items,
            seed=header["seed"],
            graph_fingerprint=header.get("graph_hash", ""),
            epoch=header.get("epoch"),
            metrics=header.get("metrics") or {},
        )
