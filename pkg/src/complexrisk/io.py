"""Reading scenario files.

CSV: a header line ``k=2,1`` followed by one flat row per scenario vector.
JSON: ``{"shape": [2, 1], "vectors": [[1, 3, 2], ...]}``.
Rows use the flat order block 1, then block 2, and so on.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .scenario import ScenarioSpace, ScenarioVector

__all__ = ["ScenarioFormatError", "load_scenarios", "dump_scenarios"]


class ScenarioFormatError(ValueError):
    pass


def _parse_row(cells, space: ScenarioSpace, row: int) -> ScenarioVector:
    if len(cells) != space.dim:
        raise ScenarioFormatError(f"row {row}: expected {space.dim} values for k={list(space.k)}, got {len(cells)}")
    try:
        values = [float(c) for c in cells]
    except (TypeError, ValueError):
        raise ScenarioFormatError(f"row {row}: non-numeric cell in {list(cells)!r}") from None
    if not np.all(np.isfinite(values)):
        raise ScenarioFormatError(f"row {row}: non-finite value")
    return ScenarioVector.from_flat(space, values)


def _read_csv(path: Path) -> tuple[ScenarioSpace, list[ScenarioVector]]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh.read().splitlines()]
    if not lines or not lines[0].strip().lower().startswith("k="):
        raise ScenarioFormatError(f"{path}: missing header line 'k=<comma-separated ints>'")
    try:
        space = ScenarioSpace(int(v) for v in lines[0].strip()[2:].split(","))
    except ValueError as exc:
        raise ScenarioFormatError(f"{path}: bad header {lines[0]!r}: {exc}") from None
    vectors = []
    data = [ln for ln in lines[1:] if ln.strip()]
    for row, cells in enumerate(csv.reader(data), start=1):
        vectors.append(_parse_row([c.strip() for c in cells], space, row))
    return space, vectors


def _read_json(path: Path) -> tuple[ScenarioSpace, list[ScenarioVector]]:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "shape" not in doc:
        raise ScenarioFormatError(f"{path}: missing 'shape' field")
    try:
        space = ScenarioSpace(doc["shape"])
    except (TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"{path}: bad shape {doc['shape']!r}: {exc}") from None
    rows = doc.get("vectors", [])
    return space, [_parse_row(r if isinstance(r, list) else [r], space, i) for i, r in enumerate(rows, start=1)]


def load_scenarios(path, format: str | None = None, *, with_space: bool = False):
    """Read scenario vectors from a CSV or JSON file.

    ``format`` defaults to the file extension.  An empty data section gives
    an empty list.  With ``with_space=True`` the declared space is returned
    too, as ``(space, vectors)``.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt not in ("csv", "json"):
        raise ScenarioFormatError(f"{path}: unknown scenario format {fmt!r}")
    space, vectors = (_read_csv if fmt == "csv" else _read_json)(path)
    return (space, vectors) if with_space else vectors


def dump_scenarios(path, space: ScenarioSpace, vectors, format: str | None = None) -> None:
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            fh.write("k=" + ",".join(str(k) for k in space.k) + "\n")
            w = csv.writer(fh)
            for v in vectors:
                w.writerow([repr(float(x)) for x in v.flat])
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump({"shape": list(space.k), "vectors": [v.flat.tolist() for v in vectors]}, fh)
    else:
        raise ScenarioFormatError(f"{path}: unknown scenario format {fmt!r}")
