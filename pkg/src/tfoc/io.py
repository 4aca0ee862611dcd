"""Plain-text tables for signals, symbols and kernels.

Layout: a header line ``N,h``, one line with those values, then the samples,
one table row per line, each entry a Python complex literal.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .grid import PhaseSpaceGrid, make_grid

__all__ = ["read_table", "write_table"]


def write_table(path, values, grid: PhaseSpaceGrid) -> Path:
    vals = np.asarray(values, dtype=complex)
    if vals.ndim == 1:
        vals = vals[:, None]
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "h"])
        w.writerow([grid.n_points, repr(grid.h)])
        for row in vals:
            w.writerow([repr(complex(z)) for z in row])
    return path


def read_table(path, ndim: int | None = None) -> tuple[PhaseSpaceGrid, np.ndarray]:
    """Grid and samples; a single-column table comes back one-dimensional."""
    try:
        with Path(path).open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 3 or [c.strip() for c in rows[0]] != ["N", "h"]:
        raise ConfigurationError(f"{path}: expected an 'N,h' header line")
    try:
        n = int(rows[1][0])
        h = float(rows[1][1])
        vals = np.array([[complex(c.strip().replace(" ", "")) for c in r] for r in rows[2:]])
    except (ValueError, IndexError) as exc:
        raise ConfigurationError(f"{path}: malformed table ({exc})") from exc
    grid = make_grid(n)
    if not math.isclose(h, grid.h, rel_tol=1e-9):
        raise ConfigurationError(f"{path}: h={h} does not match sqrt(2 pi / N) for N={n}")
    if vals.shape[1] == 1:
        vals = vals[:, 0]
    if vals.shape[0] != n or (vals.ndim == 2 and vals.shape[1] != n):
        raise ConfigurationError(f"{path}: table shape {vals.shape} does not match N={n}")
    if ndim is not None and vals.ndim != ndim:
        raise ConfigurationError(f"{path}: expected a {ndim}-D table, got {vals.ndim}-D")
    return grid, vals
