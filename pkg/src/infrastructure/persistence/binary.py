"""
Framing shared by the binary artifacts: a little-endian uint32 header length,
a JSON header, then raw little-endian arrays.
"""

import json
from pathlib import Path
from typing import BinaryIO, Tuple

import numpy as np

from src.domain.shared.exceptions import CacheFormatError

HEADER_LENGTH = np.dtype("<u4")
FLOAT = np.dtype("<f4")
INT = np.dtype("<i4")


def write_header(handle: BinaryIO, header: dict) -> None:
    payload = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    handle.write(np.asarray([len(payload)], dtype=HEADER_LENGTH).tobytes())
    handle.write(payload)


def read_header(data: bytes, path: Path) -> Tuple[dict, int]:
    """Return the header and the offset of the first array byte."""
    if len(data) < HEADER_LENGTH.itemsize:
        raise CacheFormatError(f"{path} is too short to hold a header", details={"path": str(path)})
    length = int(np.frombuffer(data, dtype=HEADER_LENGTH, count=1)[0])
    end = HEADER_LENGTH.itemsize + length
    if len(data) < end:
        raise CacheFormatError(f"{path} ends inside its header", details={"path": str(path)})
    try:
        header = json.loads(data[HEADER_LENGTH.itemsize : end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CacheFormatError(f"Corrupt header in {path}: {e}", details={"path": str(path)})
    return header, end


def read_array(
    data: bytes, offset: int, dtype: np.dtype, count: int, path: Path, record: int
) -> Tuple[np.ndarray, int]:
    end = offset + dtype.itemsize * count
    if count < 0 or end > len(data):
        raise CacheFormatError(f"{path} is truncated at record {record}", record=record, details={"path": str(path)})
    return np.frombuffer(data, dtype=dtype, count=count, offset=offset), end
