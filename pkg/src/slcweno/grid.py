"""Uniform node-centred Cartesian grids in one and two dimensions.

A grid with ``n`` nodes per axis has ``n - 1`` cells per axis.  Two-dimensional
node arrays are stored as ``values[j, i]`` (``i`` along x), so a row-major
flatten is lexicographic with x running fastest.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class FootNotClamped(ValueError):
    """A foot of characteristic was evaluated outside the domain hull."""


class BoundaryPolicy(enum.Enum):
    PERIODIC = "periodic"
    EXTRAPOLATE = "extrapolate"


@dataclass(frozen=True)
class GridSpec:
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    n: tuple[int, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        n = tuple(int(v) for v in np.atleast_1d(self.n))
        if not (len(lo) == len(hi) == len(n)) or len(n) not in (1, 2):
            raise ValueError("grid must be 1D or 2D with matching lo/hi/n")
        if any(k < 5 for k in n):
            raise ValueError(f"need at least 5 nodes per axis, got {n}")
        if any(b <= a for a, b in zip(lo, hi)):
            raise ValueError("hi must exceed lo on every axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "n", n)

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def dx(self) -> tuple[float, ...]:
        return tuple((b - a) / (k - 1) for a, b, k in zip(self.lo, self.hi, self.n))

    @property
    def ncells(self) -> tuple[int, ...]:
        return tuple(k - 1 for k in self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        """Array shape of node values (y first in 2D)."""
        return tuple(reversed(self.n))

    def axis_nodes(self, axis: int) -> np.ndarray:
        x = self.lo[axis] + np.arange(self.n[axis]) * self.dx[axis]
        x[-1] = self.hi[axis]
        return x

    def node(self, i: int, axis: int = 0) -> float:
        if i == self.n[axis] - 1:
            return self.hi[axis]
        return self.lo[axis] + i * self.dx[axis]

    def meshgrid(self) -> list[np.ndarray]:
        """Node coordinates, each shaped like the value array."""
        axes = [self.axis_nodes(a) for a in range(self.dim)]
        if self.dim == 1:
            return axes
        X, Y = np.meshgrid(axes[0], axes[1], indexing="xy")
        return [X, Y]

    def points(self) -> np.ndarray:
        """All nodes as an (N, dim) array in lexicographic order."""
        return np.stack([c.ravel() for c in self.meshgrid()], axis=1)

    def cell_centers(self) -> np.ndarray:
        axes = [self.axis_nodes(a)[:-1] + 0.5 * self.dx[a] for a in range(self.dim)]
        if self.dim == 1:
            return axes[0][:, None]
        X, Y = np.meshgrid(axes[0], axes[1], indexing="xy")
        return np.stack([X.ravel(), Y.ravel()], axis=1)

    def is_square(self, rtol: float = 1e-12) -> bool:
        dx = self.dx
        return all(abs(d - dx[0]) <= rtol * dx[0] for d in dx)


@dataclass
class Field:
    grid: GridSpec
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(self.grid.shape)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.time)


@dataclass(frozen=True)
class CellLocation:
    cell: np.ndarray  # (P, dim) integer cell index per axis
    local: np.ndarray  # (P, dim) local coordinate in [0, 1]
    flat: np.ndarray = field(repr=False)  # (P,) lexicographic cell number


def locate_cells(grid: GridSpec, p: np.ndarray, check: bool = True) -> CellLocation:
    """Vectorised cell lookup for points ``p`` of shape (P, dim).

    A point on an interior node belongs to the cell on its left, a point at
    ``lo`` to cell 0 and a point at ``hi`` to the last cell (local coord 1).
    """
    p = np.asarray(p, dtype=float).reshape(-1, grid.dim)
    lo = np.asarray(grid.lo)
    dx = np.asarray(grid.dx)
    if check:
        hi = np.asarray(grid.hi)
        bad = np.any((p < lo) | (p > hi), axis=1)
        if bad.any():
            raise FootNotClamped(f"foot not clamped: {p[bad][0]} outside {grid.lo}..{grid.hi}")
    s = (p - lo) / dx
    cell = np.ceil(s).astype(np.int64) - 1
    np.clip(cell, 0, np.asarray(grid.ncells) - 1, out=cell)
    local = s - cell
    if grid.dim == 1:
        flat = cell[:, 0]
    else:
        flat = cell[:, 1] * grid.ncells[0] + cell[:, 0]
    return CellLocation(cell, local, flat)


def locate_cell(grid: GridSpec, p: Sequence[float] | float) -> tuple[tuple[int, ...], tuple[float, ...]]:
    loc = locate_cells(grid, np.atleast_1d(np.asarray(p, dtype=float))[None, :])
    return tuple(int(c) for c in loc.cell[0]), tuple(float(x) for x in loc.local[0])


def clamp_feet(grid: GridSpec, policy: BoundaryPolicy, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bring feet of shape (P, dim) back into the domain.

    Returns the adjusted points and a per-point flag telling whether an
    Extrapolate clamp moved the point.  Periodic wrapping is not a clamp.
    """
    p = np.asarray(p, dtype=float).reshape(-1, grid.dim)
    lo = np.asarray(grid.lo)
    hi = np.asarray(grid.hi)
    if policy is BoundaryPolicy.PERIODIC:
        out = lo + np.mod(p - lo, hi - lo)
        return out, np.zeros(len(p), dtype=bool)
    out = np.clip(p, lo, hi)
    return out, np.any(out != p, axis=1)


def clamp_foot(grid: GridSpec, policy: BoundaryPolicy, p) -> tuple[tuple[float, ...] | float, bool]:
    arr = np.atleast_1d(np.asarray(p, dtype=float))
    out, moved = clamp_feet(grid, policy, arr[None, :])
    res = tuple(float(v) for v in out[0])
    return (res[0] if np.ndim(p) == 0 else res), bool(moved[0])


def pad_ghosts(values: np.ndarray, policy: BoundaryPolicy) -> np.ndarray:
    """Add one ghost layer on every side of a node array.

    Periodic identifies node ``n-1`` with node 0, so the ghost left of node 0
    is node ``n-2``.  Extrapolate uses linear extrapolation from the two
    nearest nodes along the offending axis (corners get both, x first).
    """
    u = np.asarray(values, dtype=float)
    out = u
    for axis in reversed(range(u.ndim)):  # x is the last array axis
        n = out.shape[axis]
        take = lambda i: np.take(out, [i], axis=axis)  # noqa: E731
        if policy is BoundaryPolicy.PERIODIC:
            left, right = take(n - 2), take(1)
        else:
            left = 2.0 * take(0) - take(1)
            right = 2.0 * take(n - 1) - take(n - 2)
        out = np.concatenate([left, out, right], axis=axis)
    return out


def all_stencils(values: np.ndarray, policy: BoundaryPolicy) -> np.ndarray:
    """Stencil data of every cell: (ncells, 4) in 1D, (ncells, 16) in 2D.

    2D cells are numbered lexicographically (x fastest) and each stencil row
    is the 4x4 node block ordered x fastest.
    """
    padded = pad_ghosts(values, policy)
    if padded.ndim == 1:
        win = np.lib.stride_tricks.sliding_window_view(padded, 4)
        return np.ascontiguousarray(win)
    win = np.lib.stride_tricks.sliding_window_view(padded, (4, 4))
    ny, nx = win.shape[:2]
    return np.ascontiguousarray(win.reshape(ny * nx, 16))


def stencil_values(field: Field, cell, policy: BoundaryPolicy) -> np.ndarray:
    """Stencil data for one cell (index per axis, x first)."""
    padded = pad_ghosts(field.values, policy)
    c = tuple(np.atleast_1d(cell).astype(int))
    if field.grid.dim == 1:
        return padded[c[0] : c[0] + 4].copy()
    cx, cy = c
    return padded[cy : cy + 4, cx : cx + 4].reshape(16).copy()
