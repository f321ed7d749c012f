"""Uniform tensor grids and nodal grid functions.

A grid function stores one value per node (boundary nodes included) in
row-major order: for 2D grids the x index varies fastest, one row per
constant-y line.  1D grids (test/oracle mode) are intervals with ny = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, GridFileError

GRID_FORMAT_TAG = "saddle-grid"
GRID_FORMAT_VERSION = "v1"


@dataclass(frozen=True)
class GridSpec:
    """Uniform subdivision of an interval or a rectangle.

    ``nx`` subdivisions along x and ``ny`` along y; ``ny = 0`` marks a 1D
    interval.  Node counts are ``nx + 1`` per axis.
    """

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 4:
            raise ValueError(f"nx must be >= 4, got {self.nx}")
        if self.ny not in (0,) and self.ny < 4:
            raise ValueError(f"ny must be 0 (1D) or >= 4, got {self.ny}")
        if not self.x_hi > self.x_lo:
            raise ValueError("x bounds must satisfy x_lo < x_hi")
        if self.ny > 0 and not self.y_hi > self.y_lo:
            raise ValueError("y bounds must satisfy y_lo < y_hi")

    @classmethod
    def interval(cls, x_lo: float, x_hi: float, n: int) -> "GridSpec":
        return cls(float(x_lo), float(x_hi), 0.0, 0.0, int(n), 0)

    @classmethod
    def rectangle(cls, x_lo, x_hi, y_lo, y_hi, n: int) -> "GridSpec":
        """Rectangle with ``n`` subdivisions on each axis."""
        return cls(float(x_lo), float(x_hi), float(y_lo), float(y_hi), int(n), int(n))

    @property
    def is_1d(self) -> bool:
        return self.ny == 0

    @property
    def hx(self) -> float:
        return (self.x_hi - self.x_lo) / self.nx

    @property
    def hy(self) -> float:
        if self.is_1d:
            raise ValueError("1D grid has no hy")
        return (self.y_hi - self.y_lo) / self.ny

    @property
    def shape(self):
        """(rows, cols) of the nodal array; 1D grids report (npoints,)."""
        if self.is_1d:
            return (self.nx + 1,)
        return (self.ny + 1, self.nx + 1)

    @property
    def npoints(self) -> int:
        if self.is_1d:
            return self.nx + 1
        return (self.nx + 1) * (self.ny + 1)

    @property
    def grid_id(self) -> str:
        if self.is_1d:
            return f"interval[{self.x_lo:g},{self.x_hi:g}] n={self.nx}"
        return (
            f"rect[{self.x_lo:g},{self.x_hi:g}]x[{self.y_lo:g},{self.y_hi:g}] "
            f"n={self.nx}x{self.ny}"
        )

    def node_coords(self):
        """Nodal coordinates, flattened row-major.

        Returns ``x`` for 1D grids, ``(x, y)`` arrays for 2D grids.
        """
        xs = np.linspace(self.x_lo, self.x_hi, self.nx + 1)
        if self.is_1d:
            return xs
        ys = np.linspace(self.y_lo, self.y_hi, self.ny + 1)
        X, Y = np.meshgrid(xs, ys)
        return X.ravel(), Y.ravel()

    def interior_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        if self.is_1d:
            mask[1:-1] = True
        else:
            mask[1:-1, 1:-1] = True
        return mask.ravel()

    def boundary_mask(self) -> np.ndarray:
        return ~self.interior_mask()


@dataclass(frozen=True)
class GridFunction:
    """Nodal values of a function on a :class:`GridSpec`."""

    values: np.ndarray
    grid: GridSpec = field(compare=False)

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64).ravel()
        object.__setattr__(self, "values", vals)
        if vals.size != self.grid.npoints:
            raise DimensionMismatchError(
                f"{vals.size} values for grid {self.grid.grid_id} "
                f"({self.grid.npoints} nodes)"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function contains non-finite entries")

    def as_array2d(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def same_grid(self, other) -> bool:
        return self.grid == other.grid


def require_same_grid(*items):
    """Raise unless all grid functions/operators share one grid."""
    grids = [it.grid for it in items]
    first = grids[0]
    for g in grids[1:]:
        if g != first:
            raise DimensionMismatchError(
                f"grid mismatch: {first.grid_id} vs {g.grid_id}"
            )
    return first


def write_solution(w: GridFunction, path) -> None:
    """Write ``w`` in the portable text format (17 significant digits)."""
    g = w.grid
    header = (
        f"{GRID_FORMAT_TAG} {GRID_FORMAT_VERSION} {g.nx} {g.ny} "
        f"{g.x_lo:.17g} {g.x_hi:.17g} {g.y_lo:.17g} {g.y_hi:.17g}"
    )
    rows = w.values.reshape(1, -1) if g.is_1d else w.as_array2d()
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def read_solution(path) -> GridFunction:
    """Read a grid function written by :func:`write_solution`."""
    with open(path) as fh:
        header = fh.readline().split()
        body = fh.read().split()
    if len(header) != 8 or header[0] != GRID_FORMAT_TAG:
        raise GridFileError(f"{path}: not a {GRID_FORMAT_TAG} file")
    if header[1] != GRID_FORMAT_VERSION:
        raise GridFileError(f"{path}: unsupported format version {header[1]!r}")
    try:
        nx, ny = int(header[2]), int(header[3])
        x_lo, x_hi, y_lo, y_hi = (float(t) for t in header[4:8])
        grid = GridSpec(x_lo, x_hi, y_lo, y_hi, nx, ny)
        values = np.array([float(t) for t in body])
    except (ValueError, DimensionMismatchError) as exc:
        raise GridFileError(f"{path}: malformed grid file ({exc})") from exc
    if values.size != grid.npoints:
        raise GridFileError(
            f"{path}: {values.size} values for grid {grid.grid_id} "
            f"({grid.npoints} nodes)"
        )
    return GridFunction(values, grid)
