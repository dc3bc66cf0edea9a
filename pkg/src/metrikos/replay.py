"""Re-evaluate a stored witness against its source space or function."""

from __future__ import annotations

from metrikos.axioms import theta_fold
from metrikos.core import DistanceSpace, Witness
from metrikos.expr import BinaryFn, ScalarFn


def replay_witness(
    w: Witness,
    space: DistanceSpace | None = None,
    *,
    K: float | None = None,
    f: ScalarFn | None = None,
    alpha: float = 0.0,
    theta: BinaryFn | None = None,
) -> tuple[float, float, bool]:
    """Recompute ``(lhs, rhs)`` for the witness and whether it is violated.

    Comparisons here are exact: a witness must be a real violation, not one
    that only appears under tolerance.
    """
    p = w.points
    kind = w.kind

    def D(a, b):
        return space.dist(a, b)

    if kind == "zero_diagonal":
        lhs = D(p[0], p[0])
        return lhs, 0.0, lhs != 0.0
    if kind == "symmetry":
        lhs, rhs = D(p[0], p[1]), D(p[1], p[0])
        return lhs, rhs, lhs != rhs
    if kind == "positivity":
        lhs = D(p[0], p[1])
        return lhs, 0.0, lhs <= 0.0
    if kind in ("b_triangle", "triangle"):
        k = 1.0 if kind == "triangle" else K
        lhs, rhs = D(p[0], p[2]), k * (D(p[0], p[1]) + D(p[1], p[2]))
        return lhs, rhs, lhs > rhs
    if kind == "f_chain":
        total = 0.0
        for a, b in zip(p, p[1:]):
            total += D(a, b)
        lhs, rhs = f(D(p[0], p[-1])), f(total) + alpha
        return lhs, rhs, lhs > rhs
    if kind in ("f1_monotone", "f2_decreasing"):
        lhs, rhs = f(p[0]), f(p[1])
        return lhs, rhs, lhs > rhs
    if kind == "f2_threshold":
        lhs = f(p[0])
        return lhs, w.rhs, lhs >= w.rhs
    if kind == "b_action_i":
        if len(p) == 2 and p == (0.0, 0.0) and w.relation == "theta(0,0) = 0":
            lhs = theta(0.0, 0.0)
            return lhs, 0.0, lhs != 0.0
        lhs, rhs = theta(p[0], p[1]), theta(p[1], p[0])
        return lhs, rhs, lhs != rhs
    if kind == "b_action_ii":
        lhs, rhs = theta(p[0], p[1]), theta(p[2], p[3])
        return lhs, rhs, lhs >= rhs
    if kind == "b_action_iv":
        lhs = theta(p[0], 0.0)
        return lhs, p[0], lhs > p[0]
    if kind == "b_action_iii":
        m = theta(p[0], p[1])
        if w.relation == "theta(0,t) <= m":
            lhs = theta(0.0, p[2])
            return lhs, m, lhs > m
        lhs = theta(m, p[2])
        return lhs, m, lhs < m
    if kind == "b_action_iii_solve":
        m = theta(p[0], p[1])
        lhs = theta(p[3], p[2])
        return lhs, m, lhs != m
    if kind == "theta_triangle":
        lhs, rhs = D(p[0], p[2]), theta(D(p[0], p[1]), D(p[1], p[2]))
        return lhs, rhs, lhs > rhs
    if kind == "theta_chain":
        lhs = D(p[0], p[-1])
        rhs = theta_fold(theta, [D(a, b) for a, b in zip(p, p[1:])])
        return lhs, rhs, lhs > rhs
    if kind == "iii-A":
        lhs = D(p[0], p[2])
        return lhs, w.rhs, lhs >= w.rhs
    if kind == "iii-C":
        lhs = D(p[0], p[2]) + D(p[1], p[2])
        return lhs, w.rhs, lhs < w.rhs
    raise ValueError(f"witness kind {kind!r} cannot be replayed from a space alone")


def reproduces(w: Witness, lhs: float, rhs: float, rel: float = 1e-12) -> bool:
    def close(a, b):
        return abs(a - b) <= rel * max(1.0, abs(a), abs(b))

    return close(w.lhs, lhs) and close(w.rhs, rhs)
