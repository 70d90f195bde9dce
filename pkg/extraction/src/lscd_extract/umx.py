"""UMX1 usage-matrix files: magic "UMX1", uint32-LE row count, uint32-LE
dimension, then float32-LE values row-major. The scoring core consumes these
files; the format is the entire contract between the two packages."""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

UMX_MAGIC = b"UMX1"
_HEADER = struct.Struct("<4sII")


def write_umx(path: str | Path, rows: np.ndarray) -> None:
    rows = np.asarray(rows)
    if rows.ndim != 2 or rows.shape[1] < 1:
        raise ValueError(f"rows must be 2-D with D >= 1, got shape {rows.shape}")
    with open(path, "wb") as handle:
        handle.write(_HEADER.pack(UMX_MAGIC, rows.shape[0], rows.shape[1]))
        handle.write(np.ascontiguousarray(rows, dtype="<f4").tobytes())


def read_umx(path: str | Path) -> np.ndarray:
    with open(path, "rb") as handle:
        header = handle.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, n_rows, dim = _HEADER.unpack(header)
        if magic != UMX_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        payload = handle.read()
    expected = n_rows * dim * 4
    if len(payload) != expected:
        raise ValueError(f"{path}: expected {expected} payload bytes, got {len(payload)}")
    return np.frombuffer(payload, dtype="<f4").reshape(n_rows, dim)


def write_meta_sidecar(path: str | Path, rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
