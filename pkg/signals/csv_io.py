"""
CSV signal files.

A signal file is a rectangular table of decimals with ',' separators and '.'
decimal points: one row per node, one column per time sample (or the transpose,
when asked). Lines starting with '#' are comments; files written here start with
a `#gvnn-kit v1 manifest=<digest>` line. Floats are written in their shortest
round-trip form, so write-then-read is exact.
"""

import csv
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from core.utils import DataError, ParseError, RaggedRows, ensure_parent_dir
from linalg.dense import as_matrix

logger = logging.getLogger(__name__)


def load_csv_signal(path: Union[str, Path], transpose: bool = False) -> np.ndarray:
    """
    Read a signal (N, T) from CSV.

    Args:
        path: CSV file
        transpose: The file holds time in rows and nodes in columns

    Raises:
        ParseError: With the 1-based line and column of the bad cell
        RaggedRows: If rows have different lengths
        DataError: If the file has no data rows
    """
    rows = []
    width = None
    with open(path, "r", encoding="utf-8", newline="") as f:
        for line_no, record in enumerate(csv.reader(f), start=1):
            if not record or record[0].lstrip().startswith("#"):
                continue
            values = []
            for col_no, cell in enumerate(record, start=1):
                try:
                    value = float(cell.strip())
                except ValueError:
                    raise ParseError(line_no, col_no, cell)
                if not np.isfinite(value):
                    raise ParseError(line_no, col_no, cell)
                values.append(value)
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise RaggedRows(
                    f"Line {line_no} has {len(values)} values, expected {width}"
                )
            rows.append(values)

    if not rows:
        raise DataError(f"No data rows in {path}")
    signal = np.array(rows, dtype=np.float64)
    if transpose:
        signal = np.ascontiguousarray(signal.T)
    logger.info(f"Loaded signal {signal.shape[0]} nodes x {signal.shape[1]} samples from {path}")
    return signal


def format_float(value: float) -> str:
    return repr(float(value))


def write_csv_signal(
    path: Union[str, Path], signal, header: Optional[str] = None
) -> Path:
    """Write a matrix row by row; `header` becomes the first (comment) line."""
    matrix = as_matrix(signal, "signal")
    path = ensure_parent_dir(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        if header:
            f.write(header.rstrip("\n") + "\n")
        for row in matrix:
            f.write(",".join(format_float(v) for v in row) + "\n")
    logger.debug(f"Wrote {matrix.shape} matrix to {path}")
    return path
