"""CSV and JSON serialization with byte-stable float formatting."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .fracdiff import Grid, SampledPath

SCHEMA = "fracnoether/1"


def fmt(x: float) -> str:
    """Shortest round-trip representation of a float."""
    return repr(float(x))


def write_columns(path, header, columns) -> None:
    """Write equal-length columns as CSV with a header row."""
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    if len(header) != len(cols) or len({c.size for c in cols}) > 1:
        raise ValueError("header and columns do not match")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([fmt(x) for x in row])


def read_columns(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path}: need a header and at least one data row")
    header = [h.strip() for h in rows[0]]
    data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    if data.shape[1] != len(header):
        raise ValueError(f"{path}: ragged rows")
    return header, data


def read_path_csv(path) -> SampledPath:
    """Read ``t, f1, f2, ...`` on a uniform grid into a :class:`SampledPath`."""
    header, data = read_columns(path)
    if data.shape[1] < 2:
        raise ValueError(f"{path}: need a t column and at least one value column")
    t = data[:, 0]
    N = t.size - 1
    grid = Grid(float(t[0]), float(t[-1]), N)
    if not np.allclose(t, grid.nodes, rtol=0.0, atol=1e-9 * max(1.0, abs(grid.b - grid.a))):
        raise ValueError(f"{path}: t column is not a uniform grid")
    return SampledPath(grid, data[:, 1:], name=Path(path).stem)


def write_triple_csv(path, triple) -> None:
    n, m = triple.q.dim, triple.u.dim
    header = ["t"] + [f"q{i + 1}" for i in range(n)] + [f"u{k + 1}" for k in range(m)] + [f"p{i + 1}" for i in range(n)]
    cols = [triple.grid.nodes]
    cols += [triple.q.component(i) for i in range(n)]
    cols += [triple.u.component(k) for k in range(m)]
    cols += [triple.p.component(i) for i in range(n)]
    write_columns(path, header, cols)


def _clean(obj):
    """Replace non-finite floats by ``None`` and numpy scalars by builtins."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def write_json(path, payload: dict) -> None:
    doc = {"schema": SCHEMA}
    doc.update(payload)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_clean(doc), fh, indent=2)
        fh.write("\n")
