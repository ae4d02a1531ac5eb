"""CSV trace format: the single source of truth for a run.

Floats are printed with 17 significant digits so a reloaded trace reproduces
the in-memory values bit for bit.  Cells that are not defined yet (the
reconstruction columns before the determinant gate first opens, estimator
columns for estimators that were not selected) are written empty, never zero,
and read back as NaN.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Dict, Iterable

import numpy as np

from .errors import TraceIOError

TRACE_COLUMNS = (
    "t", "y", "phi1", "phi2", "phi3",
    "theta_hat1", "theta_hat2", "theta_hat3",
    "z", "detM", "min_eig",
    "fct1", "fct2", "fct3",
    "err_ls", "err_fct",
)
TRACE_HEADER = ",".join(TRACE_COLUMNS)


@dataclass(frozen=True)
class TraceRow:
    t: float
    y: float
    phi1: float
    phi2: float
    phi3: float
    theta_hat1: float
    theta_hat2: float
    theta_hat3: float
    z: float
    detM: float
    min_eig: float
    fct1: float
    fct2: float
    fct3: float
    err_ls: float
    err_fct: float


def _format_cell(value: float) -> str:
    if value is None or math.isnan(value):
        return ""
    return format(value, ".17g")


def _parse_cell(text: str) -> float:
    return math.nan if text == "" else float(text)


def write_trace(rows: Iterable[TraceRow], path) -> None:
    """Write per-step records as CSV; NaN fields become empty cells."""
    try:
        with open(path, "w", newline="") as fh:
            fh.write(TRACE_HEADER + "\n")
            for row in rows:
                cells = [_format_cell(getattr(row, name)) for name in TRACE_COLUMNS]
                fh.write(",".join(cells) + "\n")
    except OSError as exc:
        raise TraceIOError(f"cannot write trace to {path}: {exc}") from exc


def read_trace(path) -> Dict[str, np.ndarray]:
    """Load a trace as a column-name -> float array mapping (empty -> NaN)."""
    try:
        with open(path, "r", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise TraceIOError(f"trace {path} is empty (missing header)") from None
            if tuple(header) != TRACE_COLUMNS:
                raise TraceIOError(
                    f"trace {path} has unexpected header {','.join(header)!r}"
                )
            columns: Dict[str, list] = {name: [] for name in TRACE_COLUMNS}
            for line_no, cells in enumerate(reader, start=2):
                if len(cells) != len(TRACE_COLUMNS):
                    raise TraceIOError(
                        f"trace {path} line {line_no}: expected "
                        f"{len(TRACE_COLUMNS)} cells, got {len(cells)}"
                    )
                try:
                    for name, cell in zip(TRACE_COLUMNS, cells):
                        columns[name].append(_parse_cell(cell))
                except ValueError as exc:
                    raise TraceIOError(f"trace {path} line {line_no}: {exc}") from exc
    except OSError as exc:
        raise TraceIOError(f"cannot read trace from {path}: {exc}") from exc
    return {name: np.asarray(values, dtype=float) for name, values in columns.items()}
