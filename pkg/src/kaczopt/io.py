"""Plain-text matrix and vector files used by the command line tools."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError


def read_matrix(path) -> np.ndarray:
    """Read a dense matrix: first line ``m n``, then ``m`` whitespace-delimited rows."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: first line must be 'm n'")
        m, n = int(header[0]), int(header[1])
        values = np.array(fh.read().split(), dtype=np.float64)
    if values.size != m * n:
        raise DimensionMismatchError(f"{path}: expected {m * n} entries, found {values.size}")
    return values.reshape(m, n)


def read_vector(path) -> np.ndarray:
    """Read whitespace-delimited numbers (typically one per line)."""
    with open(path) as fh:
        return np.array(fh.read().split(), dtype=np.float64)


def write_matrix(path, A) -> None:
    A = np.asarray(A, dtype=np.float64)
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in A]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_vector(path, v) -> None:
    with open(path, "w") as fh:
        fh.write("".join(repr(float(x)) + "\n" for x in v))
