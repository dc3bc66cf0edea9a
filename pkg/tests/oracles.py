"""Independent brute-force oracles used to cross-check the library."""

from __future__ import annotations

import itertools

import numpy as np

from metrikos.core import le, lt


def simple_path_min(d: np.ndarray, i: int, j: int) -> tuple[float, tuple[int, ...]]:
    """Minimum chain sum from i to j by enumerating every simple path."""
    others = [k for k in range(len(d)) if k not in (i, j)]
    best, best_path = float(d[i, j]), (i, j)
    for r in range(1, len(others) + 1):
        for mids in itertools.permutations(others, r):
            path = (i, *mids, j)
            s = sum(float(d[u, v]) for u, v in zip(path, path[1:]))
            if s < best:
                best, best_path = s, path
    return best, best_path


def f_chain_oracle(d: np.ndarray, f, alpha: float, tol: float) -> tuple[bool, tuple[int, int] | None]:
    """Verdict and first violating pair (row-major over i < j)."""
    n = len(d)
    for i in range(n):
        for j in range(i + 1, n):
            s, _ = simple_path_min(d, i, j)
            if not le(f(float(d[i, j])), f(s) + alpha, tol):
                return False, (i, j)
    return True, None


def b_constant_oracle(d: np.ndarray) -> float:
    n = len(d)
    best = 1.0 if n < 2 else 0.0
    for x, y, z in itertools.product(range(n), repeat=3):
        if x != z:
            best = max(best, d[x, z] / (d[x, y] + d[y, z]))
    return best


def triangle_oracle(d: np.ndarray, tol: float) -> bool:
    n = len(d)
    return all(
        le(d[x, z], d[x, y] + d[y, z], tol) for x, y, z in itertools.product(range(n), repeat=3)
    )


def theta_oracle(d: np.ndarray, theta, tol: float) -> bool:
    n = len(d)
    return all(
        le(d[x, z], theta(d[x, y], d[y, z]), tol) for x, y, z in itertools.product(range(n), repeat=3)
    )


def monotone_oracle(theta, grid, tol: float) -> bool:
    """Strict monotonicity over every 4-tuple x <= s, y <= t, (x, y) != (s, t)."""
    g = list(grid)
    for x, s in itertools.combinations_with_replacement(g, 2):
        for y, t in itertools.combinations_with_replacement(g, 2):
            if (x, y) == (s, t):
                continue
            if not lt(theta(x, y), theta(s, t), tol):
                return False
    return True


def phi_oracle(d: np.ndarray, phi: float, eps: float) -> bool:
    """Exact check of d(x,y) < phi and d(y,z) < phi implying d(x,z) < eps."""
    n = len(d)
    return all(
        not (d[x, y] < phi and d[y, z] < phi) or d[x, z] < eps
        for x, y, z in itertools.product(range(n), repeat=3)
    )
