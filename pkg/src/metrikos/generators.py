"""Seeded random space families for fuzzing and property tests."""

from __future__ import annotations

import numpy as np

from metrikos.core import DistanceSpace, space_from_points


def _labels(n: int) -> list[str]:
    return [f"p{i}" for i in range(n)]


def _pairwise_sq(x: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - x[None, :, :]
    return (diff**2).sum(axis=-1)


def euclidean_squared(rng: np.random.Generator, n: int, dim: int = 2, box: float = 1.0) -> DistanceSpace:
    """Points uniform in [0, box]^dim, D = squared Euclidean distance (K_min <= 2)."""
    x = rng.uniform(0.0, box, size=(n, dim))
    return DistanceSpace(_labels(n), _pairwise_sq(x)).validated()


def euclidean(rng: np.random.Generator, n: int, dim: int = 2, box: float = 1.0) -> DistanceSpace:
    x = rng.uniform(0.0, box, size=(n, dim))
    return DistanceSpace(_labels(n), np.sqrt(_pairwise_sq(x))).validated()


def random_matrix(rng: np.random.Generator, n: int, low: float = 0.0, high: float = 1.0) -> DistanceSpace:
    """Uniform random matrix, symmetrised by averaging, diagonal zeroed.

    Draws with a nonpositive off-diagonal entry are rejected and redrawn.
    """
    while True:
        m = rng.uniform(low, high, size=(n, n))
        m = (m + m.T) / 2
        np.fill_diagonal(m, 0.0)
        if n < 2 or m[~np.eye(n, dtype=bool)].min() > 0:
            return DistanceSpace(_labels(n), m).validated()


def formula_points(rng: np.random.Generator, n: int, formula: str, box: float = 1.0) -> DistanceSpace:
    """Distinct reals uniform in [0, box] under a DSL formula in x, y."""
    pts = rng.uniform(0.0, box, size=n)
    while len(set(pts.tolist())) < n:
        pts = rng.uniform(0.0, box, size=n)
    return space_from_points(pts.tolist(), formula, labels=_labels(n))


FAMILIES = {
    "euclidean": euclidean,
    "euclidean_squared": euclidean_squared,
    "random_matrix": random_matrix,
    "formula": formula_points,
}


def generate(family: str, rng: np.random.Generator, n: int, **kw) -> DistanceSpace:
    try:
        gen = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    if family == "formula":
        if "formula" not in kw:
            raise ValueError("family 'formula' needs a formula")
        return gen(rng, n, kw["formula"], kw.get("box", 1.0))
    if family == "random_matrix":
        return gen(rng, n, kw.get("low", 0.0), kw.get("high", 1.0))
    return gen(rng, n, kw.get("dim", 2), kw.get("box", 1.0))
