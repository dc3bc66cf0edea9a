"""Shared domain types: finite distance spaces, structure parameters, verdicts."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, Mapping, Sequence

import numpy as np

if TYPE_CHECKING:
    from metrikos.expr import BinaryFn, ScalarFn

DEFAULT_TOL = 1e-9


class MetrikosError(Exception):
    """Base class for all library errors."""


class SpaceInputError(MetrikosError, ValueError):
    """Malformed space input (shape, finiteness, labels)."""


class AxiomError(MetrikosError):
    """A constructed space failed the distance axioms."""

    def __init__(self, verdict: "Verdict"):
        self.verdict = verdict
        w = verdict.witness
        super().__init__(f"distance axiom '{w.kind}' violated at {w.points}: {w.relation}")


def _scale(b: float) -> float:
    return max(1.0, abs(b))


def lt(a: float, b: float, tol: float = DEFAULT_TOL) -> bool:
    """Tolerance-strict ``a < b``: true only when ``a`` is clearly below ``b``."""
    return a < b - tol * _scale(b)


def le(a: float, b: float, tol: float = DEFAULT_TOL) -> bool:
    """Lenient ``a <= b``; ties within tolerance resolve to true."""
    return a <= b + tol * _scale(b)


def fmt_num(x: float) -> str:
    """Shortest text for a real that parses back to the same float."""
    x = float(x)
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


@dataclass(frozen=True)
class Witness:
    kind: str
    points: tuple
    lhs: float
    rhs: float
    relation: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "points": list(self.points),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
        }


@dataclass(frozen=True)
class Verdict:
    passed: bool
    witness: Witness | None = None
    certificates: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.passed and self.witness is not None:
            raise ValueError("a passing verdict carries no witness")
        if not self.passed and self.witness is None:
            raise ValueError("a failing verdict needs a witness")

    def __bool__(self) -> bool:
        return self.passed

    @property
    def heuristic(self) -> bool:
        return bool(self.certificates.get("heuristic", 0.0))

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "certificates": dict(sorted(self.certificates.items())),
        }


def passing(**certificates: float) -> Verdict:
    return Verdict(True, None, {k: float(v) for k, v in certificates.items()})


def failing(witness: Witness, **certificates: float) -> Verdict:
    return Verdict(False, witness, {k: float(v) for k, v in certificates.items()})


@dataclass(frozen=True, eq=False)
class DistanceSpace:
    """Finite labelled point set with a square distance matrix.

    Construction only checks structure (square, finite, distinct labels);
    the distance axioms are checked by :func:`check_distance_axioms` so that
    broken matrices can still be inspected. Use :meth:`validated` or the
    loaders to reject them up front.
    """

    labels: tuple[str, ...]
    d: np.ndarray

    def __init__(self, labels: Sequence[str] | None, d: Any):
        arr = np.array(d, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise SpaceInputError(f"distance matrix must be square, got shape {arr.shape}")
        n = arr.shape[0]
        if n < 1:
            raise SpaceInputError("distance matrix must have at least one point")
        bad = np.argwhere(~np.isfinite(arr))
        if len(bad):
            i, j = (int(v) for v in bad[0])
            raise SpaceInputError(f"non-finite entry at index ({i}, {j})")
        if labels is None:
            labels = [f"p{i}" for i in range(n)]
        labels = tuple(str(x) for x in labels)
        if len(labels) != n:
            raise SpaceInputError(f"{len(labels)} labels for a {n}x{n} matrix")
        seen: dict[str, int] = {}
        for i, lab in enumerate(labels):
            if lab in seen:
                raise SpaceInputError(f"duplicate label {lab!r} at index {i}")
            seen[lab] = i
        arr.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "d", arr)
        object.__setattr__(self, "_index", seen)

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DistanceSpace):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.d, other.d)

    def __hash__(self) -> int:
        return hash((self.labels, self.d.tobytes()))

    def index(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise SpaceInputError(f"unknown label {label!r}") from None

    def dist(self, a: str, b: str) -> float:
        return float(self.d[self.index(a), self.index(b)])

    def validated(self, tol: float = DEFAULT_TOL) -> "DistanceSpace":
        v = check_distance_axioms(self, tol)
        if not v.passed:
            raise AxiomError(v)
        return self

    def subspace(self, indices: Sequence[int]) -> "DistanceSpace":
        idx = list(indices)
        return DistanceSpace([self.labels[i] for i in idx], self.d[np.ix_(idx, idx)])

    def scaled(self, factor: float) -> "DistanceSpace":
        return DistanceSpace(self.labels, self.d * factor)

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "matrix": self.d.tolist()}


@dataclass(frozen=True)
class BParams:
    K: float

    def __post_init__(self):
        if not (math.isfinite(self.K) and self.K > 0):
            raise ValueError(f"K must be a positive real, got {self.K}")


@dataclass(frozen=True)
class FParams:
    f: "ScalarFn"
    alpha: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be a nonnegative real, got {self.alpha}")


@dataclass(frozen=True)
class ThetaParams:
    theta: "BinaryFn"


@dataclass(frozen=True)
class SampledSequence:
    """Distance trace ``D(a_n, .)`` for n = 1, 2, ..."""

    name: str
    values: tuple[float, ...]

    def __init__(self, name: str, values: Sequence[float]):
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError(f"sequence {name!r} is empty")
        for n, v in enumerate(vals, start=1):
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"sequence {name!r} has invalid value {v} at n={n}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


def check_distance_axioms(space: DistanceSpace, tol: float = DEFAULT_TOL) -> Verdict:
    """Zero diagonal, symmetry and off-diagonal positivity.

    The first violating entry in row-major order is reported.
    """
    d = space.d
    labels = space.labels
    n = len(space)
    for i in range(n):
        for j in range(n):
            x = float(d[i, j])
            if i == j:
                if x != 0.0:
                    return failing(Witness("zero_diagonal", (labels[i], labels[i]), x, 0.0, "D(x,x) = 0"))
                continue
            y = float(d[j, i])
            if abs(x - y) > tol * _scale(y):
                return failing(Witness("symmetry", (labels[i], labels[j]), x, y, "D(x,y) = D(y,x)"))
            if x <= 0.0:
                return failing(Witness("positivity", (labels[i], labels[j]), x, 0.0, "D(x,y) > 0 for x != y"))
    return passing(points=n)


def space_from_points(
    points: Sequence[float],
    formula: "BinaryFn | str",
    labels: Sequence[str] | None = None,
    tol: float = DEFAULT_TOL,
) -> DistanceSpace:
    """Sample an analytic distance ``formula(x, y)`` on distinct real points."""
    from metrikos.expr import BinaryFn

    if isinstance(formula, str):
        formula = BinaryFn.parse(formula, ("x", "y"))
    pts = [float(p) for p in points]
    if not pts:
        raise SpaceInputError("no points given")
    seen: dict[float, int] = {}
    for i, p in enumerate(pts):
        if not math.isfinite(p):
            raise SpaceInputError(f"non-finite point at index {i}")
        if p in seen:
            raise SpaceInputError(f"duplicate point {fmt_num(p)} at indices {seen[p]} and {i}")
        seen[p] = i
    n = len(pts)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            d[i, j] = formula(pts[i], pts[j])
    if labels is None:
        labels = [fmt_num(p) for p in pts]
    return DistanceSpace(labels, d).validated(tol)


def space_from_dict(doc: Mapping[str, Any], tol: float = DEFAULT_TOL) -> DistanceSpace:
    """Build a validated space from either JSON form (matrix or points+formula)."""
    if "matrix" in doc:
        return DistanceSpace(doc.get("labels"), doc["matrix"]).validated(tol)
    if "points" in doc and "formula" in doc:
        return space_from_points(doc["points"], doc["formula"], doc.get("labels"), tol)
    raise SpaceInputError("space document needs 'matrix' or 'points' and 'formula'")


def load_space(path: str | Path, tol: float = DEFAULT_TOL) -> DistanceSpace:
    with open(path) as fh:
        doc = json.load(fh)
    return space_from_dict(doc, tol)
