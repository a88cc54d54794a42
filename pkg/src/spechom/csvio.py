"""Deterministic CSV writers and readers for fields and sweep results.

Floats are always rendered with 17 significant digits in scientific
notation and files always end lines with ``\n``, so identical data
produces identical bytes on every platform.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import ConfigError, DimensionMismatchError

FLOAT_FORMAT = "{:.16e}"


def format_float(value: float) -> str:
    return FLOAT_FORMAT.format(float(value))


def write_grid_csv(path: str | Path, values: np.ndarray, name: str) -> None:
    """Write a field as ``nx,ny,name`` header plus row-major value rows.

    1D fields are written as a single column (ny = 1).
    """
    if "," in name or "\n" in name:
        raise ConfigError(f"field name {name!r} must not contain commas or newlines")
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2:
        raise DimensionMismatchError(f"expected a 1D or 2D field, got {values.ndim}D")
    nx, ny = values.shape
    with open(path, "w", newline="") as handle:
        handle.write(f"{nx},{ny},{name}\n")
        for row in values:
            handle.write(",".join(format_float(v) for v in row) + "\n")


def read_grid_csv(path: str | Path) -> tuple[np.ndarray, str]:
    """Inverse of :func:`write_grid_csv`; returns (values, name)."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if len(header) != 3:
            raise ConfigError(f"malformed grid header in {path}: {header}")
        nx, ny, name = int(header[0]), int(header[1]), header[2]
        values = np.array([[float(v) for v in row] for row in reader])
    if values.shape != (nx, ny):
        raise DimensionMismatchError(
            f"grid file {path} announced {(nx, ny)} but holds {values.shape}"
        )
    return (values[:, 0] if ny == 1 else values), name


SWEEP_HEADER = ("bandwidth_pct", "method", "l1", "l2", "flags")


def write_sweep_csv(path: str | Path, records) -> None:
    """Write sweep records with stable ordering and formatting.

    ``l1``/``l2`` may be None for flagged points and are left empty;
    flags are joined with ``;``.
    """
    with open(path, "w", newline="") as handle:
        handle.write(",".join(SWEEP_HEADER) + "\n")
        for record in records:
            l1 = "" if record.l1 is None else format_float(record.l1)
            l2 = "" if record.l2 is None else format_float(record.l2)
            flags = ";".join(record.flags)
            handle.write(
                f"{format_float(record.bandwidth_pct)},{record.method},"
                f"{l1},{l2},{flags}\n"
            )


def read_sweep_csv(path: str | Path) -> list[dict]:
    """Read a sweep CSV into dictionaries with floats parsed back."""
    out: list[dict] = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = tuple(next(reader))
        if header != SWEEP_HEADER:
            raise ConfigError(f"unexpected sweep header in {path}: {header}")
        for row in reader:
            pct, method, l1, l2, flags = row
            out.append(
                {
                    "bandwidth_pct": float(pct),
                    "method": method,
                    "l1": None if l1 == "" else float(l1),
                    "l2": None if l2 == "" else float(l2),
                    "flags": tuple(f for f in flags.split(";") if f),
                }
            )
    return out
