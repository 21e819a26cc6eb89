"""
File I/O for matrices, observation sets and run results
"""

import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import pandas as pd

from ..errors import MatrixFileError
from ..models import DenseMatrix, Entries, ObservationSet, as_matrix

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SUPPORTED_FORMATS = ["txt", "csv"]
FLOAT_FORMAT = "%.17g"


def _matrix_format(path: PathLike, fmt: Optional[str]) -> str:
    if fmt is None:
        fmt = "csv" if Path(path).suffix.lower() == ".csv" else "txt"
    if fmt not in SUPPORTED_FORMATS:
        raise MatrixFileError(f"Unsupported matrix format '{fmt}', expected one of {SUPPORTED_FORMATS}")
    return fmt


def _ensure_parent(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _parse_header(line: str, path: PathLike, width: int) -> list:
    tokens = line.split()
    try:
        values = [int(token) for token in tokens]
    except ValueError as exc:
        raise MatrixFileError(f"{path}: header must hold {width} integers, got '{line.strip()}'") from exc
    if len(values) != width or any(v < 0 for v in values):
        raise MatrixFileError(f"{path}: header must hold {width} non-negative integers, got '{line.strip()}'")
    return values


def write_matrix(path: PathLike, matrix: DenseMatrix, fmt: Optional[str] = None) -> Path:
    """
    Write a dense matrix.

    txt: a `rows cols` header line, then one whitespace-separated row per line.
    csv: comma-separated rows without header.
    Values use 17 significant digits, so reading them back is exact.
    """
    fmt = _matrix_format(path, fmt)
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    path = _ensure_parent(path)

    if fmt == "csv":
        np.savetxt(path, matrix, fmt=FLOAT_FORMAT, delimiter=",")
    else:
        np.savetxt(
            path, matrix, fmt=FLOAT_FORMAT, delimiter=" ",
            header=f"{matrix.shape[0]} {matrix.shape[1]}", comments="",
        )
    logger.debug("Wrote %dx%d matrix to %s", matrix.shape[0], matrix.shape[1], path)
    return path


def read_matrix(path: PathLike, fmt: Optional[str] = None) -> DenseMatrix:
    """Read a matrix written by write_matrix (format inferred from the suffix)"""
    fmt = _matrix_format(path, fmt)
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Matrix file not found: {path}")

    try:
        if fmt == "csv":
            matrix = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
            return as_matrix(matrix)

        with open(path, "r", encoding="utf-8") as handle:
            rows, cols = _parse_header(handle.readline(), path, 2)
            values = np.loadtxt(handle, dtype=np.float64, ndmin=2)
    except ValueError as exc:
        if isinstance(exc, MatrixFileError):
            raise
        raise MatrixFileError(f"{path}: {exc}") from exc

    if values.size != rows * cols:
        raise MatrixFileError(f"{path}: header declares {rows}x{cols}, found {values.size} values")
    return as_matrix(values.ravel(), rows, cols)


def write_observations(path: PathLike, obs: ObservationSet) -> Path:
    """`rows cols n` header, then one `row col value` line per sample"""
    path = _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{obs.rows} {obs.cols} {obs.n}\n")
        for row, col, value in obs.samples:
            handle.write(f"{row} {col} {FLOAT_FORMAT % value}\n")
    logger.debug("Wrote %d observations to %s", obs.n, path)
    return path


def read_entries(path: PathLike) -> tuple:
    """Header dimensions and the listed entries of an observation file"""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Observation file not found: {path}")

    with open(path, "r", encoding="utf-8") as handle:
        rows, cols, n = _parse_header(handle.readline(), path, 3)
        table = pd.read_csv(
            handle, sep=r"\s+", header=None, names=["row", "col", "value"],
            dtype={"row": np.int64, "col": np.int64, "value": np.float64},
            float_precision="round_trip",
        ) if n else pd.DataFrame(columns=["row", "col", "value"])

    if len(table) != n:
        raise MatrixFileError(f"{path}: header declares {n} entries, found {len(table)}")
    if table.isna().any().any():
        raise MatrixFileError(f"{path}: every line needs 'row col value'")

    entries = Entries(
        table["row"].to_numpy(dtype=np.int64),
        table["col"].to_numpy(dtype=np.int64),
        table["value"].to_numpy(dtype=np.float64),
    )
    try:
        entries.check_bounds(rows, cols)
    except ValueError as exc:
        raise MatrixFileError(f"{path}: {exc}") from exc
    return rows, cols, entries


def read_observations(path: PathLike) -> ObservationSet:
    """Read an observation file written by write_observations"""
    try:
        rows, cols, entries = read_entries(path)
        return ObservationSet(rows, cols, entries)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise MatrixFileError(f"{path}: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, MatrixFileError):
            raise
        raise MatrixFileError(f"{path}: {exc}") from exc


def _json_default(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_json(path: PathLike, payload: Any) -> Path:
    path = _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True, default=_json_default)
        handle.write("\n")
    return path


def read_json(path: PathLike) -> Any:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"JSON file not found: {path}")
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def write_frame(path: PathLike, frame: pd.DataFrame) -> Path:
    """CSV with full-precision floats and no index column"""
    path = _ensure_parent(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path
