import os
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd


def format_float(v) -> str:
    """Shortest round-trip decimal (at most 17 significant digits)."""
    return repr(float(v))


def write_frame(df: pd.DataFrame, path: Path) -> Path:
    """
    Write a DataFrame as CSV atomically.

    Floats are emitted with repr() so that read_frame() reproduces every
    value bit for bit. The file appears under `path` only once complete.

    Arguments:
        df (pd.DataFrame): Table to write; the index is dropped.
        path (Path): Destination file; parent directories are created.

    Returns:
        Path: The written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            df.to_csv(f, index=False, float_format=format_float, lineterminator="\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_frame(path: Path) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"CSV file not found: {path}")
    return pd.read_csv(path, float_precision="round_trip")


def matrix_frame(A: np.ndarray) -> pd.DataFrame:
    """Dense matrix as a table with columns c0..c{n-1}."""
    A = np.asarray(A, dtype=float)
    return pd.DataFrame(A, columns=[f"c{k}" for k in range(A.shape[1])])


def write_matrix_csv(A: np.ndarray, path: Path) -> Path:
    return write_frame(matrix_frame(A), path)


def read_matrix_csv(path: Path) -> np.ndarray:
    return read_frame(path).to_numpy(dtype=float)


def with_boundary(interior: np.ndarray) -> np.ndarray:
    """Reattach the homogeneous Dirichlet zeros to interior values (last axis)."""
    interior = np.asarray(interior, dtype=float)
    pad = [(0, 0)] * (interior.ndim - 1) + [(1, 1)]
    return np.pad(interior, pad)
