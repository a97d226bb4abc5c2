"""
PPR cache repository implementation (adapter).
"""

import logging
from pathlib import Path

import numpy as np

from src.domain.ppr.entities import PPRCache, PPRVector
from src.domain.ppr.repositories import PPRCacheRepository
from src.domain.ppr.value_objects import PPRConfig
from src.domain.shared.exceptions import CacheFormatError
from src.infrastructure.persistence.binary import FLOAT, INT, read_array, read_header, write_header

logger = logging.getLogger(__name__)


class FilePPRCacheRepository(PPRCacheRepository):
    """
    JSON header followed by one record per user: user id and entry count (int32),
    item ids (int32), masses (float32).
    """

    def save(self, artifact: PPRCache, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as handle:
            write_header(handle, artifact.header())
            for user in sorted(artifact.vectors):
                vector = artifact.vectors[user]
                items = vector.item_ids
                handle.write(np.asarray([user, items.size], dtype=INT).tobytes())
                handle.write(items.astype(INT).tobytes())
                handle.write(vector.item_mass.astype(FLOAT).tobytes())
        logger.info(f"Saved PPR cache for {len(artifact.vectors)} users to {path}")
        return path

    def load(self, path: Path) -> PPRCache:
        path = Path(path)
        data = path.read_bytes()
        header, offset = read_header(data, path)
        try:
            config = PPRConfig(alpha=header["alpha"], tol=header["tol"], max_iter=header["max_iter"])
            cache = PPRCache(
                config=config,
                num_users=header["num_users"],
                num_items=header["num_items"],
                graph_fingerprint=header["graph_hash"],
                top_t=header["T"],
                scale=header["scale"],
            )
            records = int(header["records"])
        except (KeyError, TypeError, ValueError) as e:
            raise CacheFormatError(f"Incomplete PPR cache header in {path}: {e}", details={"path": str(path)})

        for record in range(records):
            (user, count), offset = read_array(data, offset, INT, 2, path, record)
            if not 0 <= user < cache.num_users or count < 0 or count > cache.num_items:
                raise CacheFormatError(
                    f"Record {record} of {path} is corrupt (user {user}, {count} entries)", record=record
                )
            items, offset = read_array(data, offset, INT, int(count), path, record)
            mass, offset = read_array(data, offset, FLOAT, int(count), path, record)
            if items.size and (items.min() < 0 or items.max() >= cache.num_items):
                raise CacheFormatError(f"Record {record} of {path} references unknown items", record=record)
            cache.vectors[int(user)] = PPRVector(
                user=int(user),
                num_users=cache.num_users,
                nodes=items.astype(np.int64) + cache.num_users,
                mass=mass.astype(np.float64),
            )
        if offset != len(data):
            raise CacheFormatError(
                f"{path} has {len(data) - offset} bytes after its last record",
                record=records,
                details={"path": str(path)},
            )
        return cache
