"""Shared plain-text serialization.

Matrices use a row-major whitespace-separated format whose first line is
"rows cols".  Scalar records are "key value" lines.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError


def dump_matrix(m: np.ndarray) -> str:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise InputError("matrix format requires a 2-D array")
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def load_matrix(text: str) -> np.ndarray:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty matrix text")
    try:
        rows, cols = (int(t) for t in lines[0].split())
    except ValueError:
        raise InputError(f"bad matrix header: {lines[0]!r}") from None
    if len(lines) - 1 != rows:
        raise InputError(f"expected {rows} rows, got {len(lines) - 1}")
    out = np.empty((rows, cols), dtype=float)
    for i, ln in enumerate(lines[1:]):
        vals = ln.split()
        if len(vals) != cols:
            raise InputError(f"row {i} has {len(vals)} entries, expected {cols}")
        out[i] = [float(v) for v in vals]
    return out


def dump_record(record: dict) -> str:
    return "".join(f"{k} {v!r}\n" if isinstance(v, float) else f"{k} {v}\n"
                   for k, v in record.items())


def load_record(text: str) -> dict:
    out = {}
    for ln in text.strip().splitlines():
        if not ln.strip():
            continue
        key, _, value = ln.partition(" ")
        if not value:
            raise InputError(f"bad record line: {ln!r}")
        out[key] = value.strip()
    return out
