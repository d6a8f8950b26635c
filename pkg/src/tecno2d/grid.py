"""Uniform Cartesian meshes, cell-average fields and interface operators.

The computational domain is a rectangle partitioned into nx*ny uniform cells
C_ij = [x_{i-1/2}, x_{i+1/2}) x [y_{j-1/2}, y_{j+1/2}).  A field is stored as
the array of its cell averages u[i, j] (first index runs along x).  Boundary
conditions enter exclusively through ghost cells: periodic wrap or zero-order
extrapolation (outflow).  Jump and average operators live on interfaces; for
the x direction an interface field has shape (nx+1, ny), where columns 0 and
nx describe the two domain edges (the same physical interface when periodic).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Literal

import numpy as np
from numpy.typing import NDArray

Axis = Literal["x", "y"]

# 2-point Gauss-Legendre node offset from the cell center, in units of the
# cell width (node at center +- width/(2*sqrt(3))).
_GAUSS_OFFSET = 0.5 / np.sqrt(3.0)


class Boundary(str, Enum):
    PERIODIC = "periodic"
    OUTFLOW = "outflow"


def require_finite(values: NDArray, what: str) -> None:
    """Raise if an array contains NaN or Inf."""
    if not np.all(np.isfinite(values)):
        raise ValueError(f"non-finite values in {what}")


def _check_axis(direction: str) -> int:
    if direction == "x":
        return 0
    if direction == "y":
        return 1
    raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")


@dataclass(frozen=True)
class Grid2D:
    """Uniform Cartesian mesh.

    Cell centers sit at x_i = x0 + (i + 1/2)*dx, interfaces at
    x_{i+1/2} = x0 + (i+1)*dx, identically in y.  At least 3 cells per
    direction are required so that a one-ghost-layer stencil is available
    everywhere.
    """

    nx: int
    ny: int
    dx: float
    dy: float
    x0: float = 0.0
    y0: float = 0.0
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self) -> None:
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"need nx, ny >= 3, got {self.nx}x{self.ny}")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError(f"cell widths must be positive, got dx={self.dx}, dy={self.dy}")

    @classmethod
    def from_domain(
        cls,
        nx: int,
        ny: int,
        x0: float,
        x1: float,
        y0: float,
        y1: float,
        boundary: Boundary = Boundary.PERIODIC,
    ) -> "Grid2D":
        if not (x1 > x0 and y1 > y0):
            raise ValueError("domain extents must satisfy x1 > x0 and y1 > y0")
        return cls(nx, ny, (x1 - x0) / nx, (y1 - y0) / ny, x0, y0, boundary)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def x_centers(self) -> NDArray[np.float64]:
        return self.x0 + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y_centers(self) -> NDArray[np.float64]:
        return self.y0 + (np.arange(self.ny) + 0.5) * self.dy

    @property
    def x_interfaces(self) -> NDArray[np.float64]:
        return self.x0 + np.arange(self.nx + 1) * self.dx

    @property
    def y_interfaces(self) -> NDArray[np.float64]:
        return self.y0 + np.arange(self.ny + 1) * self.dy


@dataclass
class GridFunction:
    """Cell-average field at a single time instant.

    Entries must be finite; any operation that would produce NaN/Inf is an
    error.  Access outside the index range resolves through the grid's
    boundary policy (see :func:`apply_boundary`).
    """

    grid: Grid2D
    values: NDArray[np.float64]
    time: float = 0.0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(
                f"field shape {self.values.shape} does not match grid "
                f"{(self.grid.nx, self.grid.ny)}"
            )
        require_finite(self.values, "grid function")

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy(), self.time)


def pad_axis(
    values: NDArray[np.float64], n_ghost: int, axis: int, boundary: Boundary
) -> NDArray[np.float64]:
    """Extend an array by ghost layers along one axis only."""
    width = [(0, 0)] * values.ndim
    width[axis] = (n_ghost, n_ghost)
    mode = "wrap" if boundary is Boundary.PERIODIC else "edge"
    return np.pad(values, width, mode=mode)


def apply_boundary(w: GridFunction, n_ghost: int) -> NDArray[np.float64]:
    """Return the field padded by n_ghost cells on every side.

    Periodic ghosts wrap modulo the cell count; outflow ghosts copy the
    nearest interior cell.
    """
    if n_ghost < 1:
        raise ValueError(f"n_ghost must be >= 1, got {n_ghost}")
    if n_ghost > min(w.grid.nx, w.grid.ny):
        raise ValueError(
            f"n_ghost={n_ghost} exceeds the smallest cell count "
            f"{min(w.grid.nx, w.grid.ny)}"
        )
    mode = "wrap" if w.grid.boundary is Boundary.PERIODIC else "edge"
    return np.pad(w.values, n_ghost, mode=mode)


def interface_jump(w: GridFunction, direction: Axis) -> NDArray[np.float64]:
    """Differences w_{i+1,j} - w_{i,j} on every interface of one direction.

    Output shape is (nx+1, ny) for direction 'x' and (nx, ny+1) for 'y';
    ghost-adjacent interfaces are included (under periodic boundaries the
    first and last entries describe the same interface and coincide).
    """
    axis = _check_axis(direction)
    padded = pad_axis(w.values, 1, axis, w.grid.boundary)
    if axis == 0:
        return padded[1:, :] - padded[:-1, :]
    return padded[:, 1:] - padded[:, :-1]


def interface_average(w: GridFunction, direction: Axis) -> NDArray[np.float64]:
    """Arithmetic means (w_{i,j} + w_{i+1,j})/2 on every interface."""
    axis = _check_axis(direction)
    padded = pad_axis(w.values, 1, axis, w.grid.boundary)
    if axis == 0:
        return 0.5 * (padded[1:, :] + padded[:-1, :])
    return 0.5 * (padded[:, 1:] + padded[:, :-1])


def _eval_on_grids(u0: Callable, xs: NDArray, ys: NDArray) -> NDArray[np.float64]:
    """Evaluate a pointwise callable on coordinate arrays, falling back to
    elementwise evaluation for callables that only accept scalars."""
    try:
        out = np.asarray(u0(xs, ys), dtype=np.float64)
        if out.shape == xs.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.asarray(np.vectorize(u0, otypes=[np.float64])(xs, ys))


def project_initial_data(grid: Grid2D, u0: Callable[[float, float], float]) -> GridFunction:
    """Cell averages of pointwise data via tensor 2x2 Gauss-Legendre quadrature.

    The rule is exact for polynomials up to cubic in each variable, hence in
    particular for bilinear data; constants are reproduced to machine
    precision.
    """
    xc = grid.x_centers[:, None]
    yc = grid.y_centers[None, :]
    ex = grid.dx * _GAUSS_OFFSET
    ey = grid.dy * _GAUSS_OFFSET
    acc = np.zeros((grid.nx, grid.ny))
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            xs = np.broadcast_to(xc + sx * ex, (grid.nx, grid.ny))
            ys = np.broadcast_to(yc + sy * ey, (grid.nx, grid.ny))
            acc += _eval_on_grids(u0, xs, ys)
    values = 0.25 * acc
    require_finite(values, "projected initial data")
    return GridFunction(grid, values, 0.0)
