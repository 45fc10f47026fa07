"""Result files: ``result.csv``, ``summary.json`` and the ``grid.bin`` dump.

``grid.bin`` layout, all little-endian: 8-byte magic ``b"PCAMP\\x00\\x01\\x00"``,
``uint32`` ndim, ``ndim`` x ``uint64`` dims, then the row-major array as
``(re, im)`` pairs of float64.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np

GRID_MAGIC = b"PCAMP\x00\x01\x00"


def fmt(value) -> str:
    """Fixed 12-significant-digit text for floats; ints and strings verbatim."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if v == 0.0:
            return "0"  # folds -0.0
        return format(v, ".12g")
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_summary(path: Path, summary: Dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=False)
        fh.write("\n")


class GridWriter:
    """Streams complex arrays of a declared total shape into ``grid.bin``."""

    def __init__(self, path: Path, dims: Sequence[int]):
        self._fh = open(path, "wb")
        self._fh.write(GRID_MAGIC)
        self._fh.write(np.uint32(len(dims)).astype("<u4").tobytes())
        self._fh.write(np.asarray(dims, dtype="<u8").tobytes())
        self._expected = int(np.prod(dims))
        self._written = 0

    def write(self, block: np.ndarray) -> None:
        data = np.ascontiguousarray(block, dtype="<c16")
        self._fh.write(data.tobytes())
        self._written += data.size

    def close(self) -> None:
        self._fh.close()
        if self._written != self._expected:
            raise ValueError(f"grid.bin holds {self._written} values, header declares {self._expected}")

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        if exc[0] is None:
            self.close()
        else:
            self._fh.close()


def read_grid_bin(path) -> np.ndarray:
    """Load a ``grid.bin`` file written by :class:`GridWriter`."""
    raw = Path(path).read_bytes()
    if raw[:8] != GRID_MAGIC:
        raise ValueError(f"{path}: not a grid.bin file")
    ndim = int(np.frombuffer(raw, "<u4", 1, 8)[0])
    dims = tuple(int(d) for d in np.frombuffer(raw, "<u8", ndim, 12))
    offset = 12 + 8 * ndim
    data = np.frombuffer(raw, "<c16", offset=offset)
    if data.size != int(np.prod(dims)):
        raise ValueError(f"{path}: payload size does not match the declared dims {dims}")
    return data.reshape(dims)


def read_csv(path) -> List[Dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
