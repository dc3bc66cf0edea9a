"""Sampling grids and monotone searches over them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np


@dataclass(frozen=True)
class GeometricGrid:
    """Implicit grid ``lo * (1 + resolution)**j`` capped at ``hi``.

    With the default resolution 2^-20 the grid has ~2e7 points, so it is never
    materialised; searches bisect over the index instead.
    """

    lo: float = 2.0**-20
    hi: float = 2.0**10
    resolution: float = 2.0**-20

    def __post_init__(self):
        if not (0 < self.lo < self.hi and self.resolution > 0):
            raise ValueError(f"bad grid {self}")

    @property
    def _log_step(self) -> float:
        return math.log1p(self.resolution)

    def __len__(self) -> int:
        return int(math.floor(math.log(self.hi / self.lo) / self._log_step + 1e-9)) + 1

    def __getitem__(self, j: int) -> float:
        n = len(self)
        if j < 0:
            j += n
        if not 0 <= j < n:
            raise IndexError(j)
        return self.lo * math.exp(j * self._log_step)

    def describe(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "resolution": self.resolution}


Grid = Union[GeometricGrid, Sequence[float]]


def as_ascending(grid: Grid) -> Grid:
    if isinstance(grid, GeometricGrid):
        return grid
    vals = sorted(float(g) for g in grid)
    if not vals:
        raise ValueError("empty grid")
    return vals


def grid_resolution(grid: Grid) -> float:
    """Largest relative gap between consecutive positive grid values."""
    if isinstance(grid, GeometricGrid):
        return grid.resolution
    vals = [v for v in as_ascending(grid) if v > 0]
    if len(vals) < 2:
        return math.inf
    return max(b / a - 1.0 for a, b in zip(vals, vals[1:]))


def last_true(grid: Grid, ok: Callable[[float], bool]) -> int:
    """Index of the last grid value before the first one failing ``ok``.

    Explicit grids are scanned in full. Implicit geometric grids are bisected,
    which is exact when ``ok`` is monotone (true, then false). Returns -1 when
    the first value already fails.
    """
    grid = as_ascending(grid)
    if not isinstance(grid, GeometricGrid):
        for j, t in enumerate(grid):
            if not ok(t):
                return j - 1
        return len(grid) - 1
    n = len(grid)
    if not ok(grid[0]):
        return -1
    if ok(grid[n - 1]):
        return n - 1
    lo, hi = 0, n - 1  # ok(lo), not ok(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(grid[mid]):
            lo = mid
        else:
            hi = mid
    return lo


def b_action_grid(refine: int = 0) -> np.ndarray:
    """{0} plus a geometric grid from 2^-10 to 2^4, ratio 2^(1/2^refine)."""
    steps = 2**refine
    exps = np.arange(-10 * steps, 4 * steps + 1) / steps
    return np.concatenate([[0.0], 2.0**exps])


def log_grid(lo: float = 1e-6, hi: float = 1e3, per_decade: int = 20) -> np.ndarray:
    decades = math.log10(hi / lo)
    return np.logspace(math.log10(lo), math.log10(hi), int(round(decades * per_decade)) + 1)
