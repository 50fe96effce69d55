"""CSV and run.meta readers for the simulator's trajectory artifacts.

The renderer deliberately has no access to the simulation code; everything it
needs must come from the CSV files and the flat key=value ``run.meta`` record
written next to them.
"""

from __future__ import annotations

import os

import numpy as np


class InputError(RuntimeError):
    """Missing, malformed, or too-short input artifact."""


def read_table(path: str, *, expected_prefix: tuple[str, ...] = (), min_rows: int = 2):
    """Parse a comma-separated table with one header line into (names, array).

    ``expected_prefix`` pins the leading column names; ``min_rows`` is the
    minimum number of data rows needed to draw anything meaningful.
    """
    if not os.path.exists(path):
        raise InputError(f"missing input file: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise InputError(f"{path}: file is empty")
    names = [c.strip() for c in lines[0].split(",")]
    if len(names) < 2 or names[0] != "t":
        raise InputError(f"{path}: expected a header starting with 't', got {lines[0]!r}")
    if tuple(names[: len(expected_prefix)]) != tuple(expected_prefix):
        raise InputError(
            f"{path}: header {names[:len(expected_prefix)]} does not match expected {list(expected_prefix)}"
        )
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(names):
            raise InputError(f"{path}:{lineno}: expected {len(names)} columns, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
    if len(rows) < min_rows:
        raise InputError(f"{path}: need at least {min_rows} data rows, found {len(rows)}")
    return names, np.array(rows)


def read_meta(path: str) -> dict[str, str]:
    if not os.path.exists(path):
        raise InputError(f"missing run record: {path}")
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def meta_float(meta: dict[str, str], key: str, source: str) -> float:
    if key not in meta:
        raise InputError(f"{source}: run record lacks required key {key!r}")
    try:
        return float(meta[key])
    except ValueError:
        raise InputError(f"{source}: key {key!r} is not numeric: {meta[key]!r}") from None
