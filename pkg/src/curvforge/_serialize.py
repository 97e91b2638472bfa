"""Deterministic serialization helpers.

Artifacts must be byte-identical across repeated runs on the same input:
JSON is emitted with sorted keys, fixed indentation, ``repr``-roundtrip
floats, and a trailing newline; CSV uses ``\\n`` line endings and the
``%.17g`` float format, which round-trips every double exactly, so every
CSV number parses back to the same float the JSON carries.
"""
from __future__ import annotations

import csv
import json
import os
from typing import Iterable, Sequence

import numpy as np


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays to plain Python types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def canonical_dumps(obj) -> str:
    """Canonical JSON text: sorted keys, 2-space indent, no NaN/inf, one
    trailing newline."""
    return (
        json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False)
        + "\n"
    )


def write_json(path: str, obj) -> None:
    text = canonical_dumps(obj)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def fmt_float(x) -> str:
    """Shortest exact decimal for CSV cells: ``%.17g`` round-trips every
    finite double."""
    return format(float(x), ".17g")


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow(list(row))


def matrix_to_lists(m: np.ndarray) -> list:
    """Nested float lists for JSON embedding."""
    return to_jsonable(np.asarray(m, dtype=float))


def matrix_csv_rows(t: float, block: str, m: np.ndarray) -> list[list[str]]:
    """Long-format CSV rows ``t, block, i, j, value`` for a matrix."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    rows = []
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            rows.append([fmt_float(t), block, str(i), str(j), fmt_float(m[i, j])])
    return rows


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
