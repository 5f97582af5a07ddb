"""Plain-text field files.

Format ``FLD1``::

    FLD1 <N> <L>
    <N lines of N whitespace-separated floats>

Rows run over ``x1`` (first index), columns over ``x2``.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import InvalidFieldError
from .grid import Grid2D, RealField

__all__ = ["write_field", "read_field"]


def write_field(field: RealField, path: str | os.PathLike) -> None:
    g = field.grid
    with open(path, "w") as fh:
        fh.write(f"FLD1 {g.N} {g.L!r}\n")
        for row in field.values:
            fh.write(" ".join(format(v, ".17g") for v in row))
            fh.write("\n")


def read_field(path: str | os.PathLike) -> RealField:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != "FLD1":
            raise InvalidFieldError(f"{path}: missing 'FLD1 N L' header")
        try:
            N, L = int(header[1]), float(header[2])
        except ValueError as exc:
            raise InvalidFieldError(f"{path}: malformed header {header!r}") from exc
        rows = [line.split() for line in fh if line.strip()]
    if len(rows) != N or any(len(r) != N for r in rows):
        raise InvalidFieldError(
            f"{path}: expected {N} rows of {N} values, got {len(rows)} rows")
    try:
        values = np.array(rows, dtype=float)
    except ValueError as exc:
        raise InvalidFieldError(f"{path}: non-numeric entry") from exc
    return RealField(Grid2D(N, L), values)
