"""Structure validators for b-metrics, F-metrics, B-actions and theta-metrics.

The F-metric chain condition quantifies over every finite chain from x to y.
Because f is non-decreasing, the chain with the smallest total length gives
the smallest right-hand side, so it is enough to compare ``f(D(x, y))`` with
``f(sp(x, y)) + alpha`` where ``sp`` is the all-pairs minimum chain sum. With
nonnegative edge weights a minimal chain never needs to revisit a point, so
simple paths suffice; Floyd-Warshall computes exactly that minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from metrikos import _kernels
from metrikos.core import (
    DEFAULT_TOL,
    BParams,
    DistanceSpace,
    FParams,
    ThetaParams,
    Verdict,
    Witness,
    check_distance_axioms,
    failing,
    le,
    lt,
    passing,
)
from metrikos.expr import BinaryFn, ScalarFn
from metrikos.grids import b_action_grid

# Unit-scale probes for strict monotonicity, run before the grid scan so a
# failing B-action reports the same witness whatever grid is used.
MONOTONE_PROBES = ((1.0, 0.0, 1.0, 0.5), (0.0, 1.0, 0.5, 1.0))


def _theta_of(theta: ThetaParams | BinaryFn) -> BinaryFn:
    return theta.theta if isinstance(theta, ThetaParams) else theta


# -- b-metrics -------------------------------------------------------------


def b_constant_triple(space: DistanceSpace) -> tuple[float, tuple[int, int, int]]:
    """Smallest admissible K together with the first triple attaining it."""
    k, x, y, z = _kernels.triangle_ratio_max(space.d)
    return float(k), (x, y, z)


def min_b_constant(space: DistanceSpace) -> float:
    """max over x != z of D(x,z) / (D(x,y) + D(y,z)); 1 for a single point."""
    return b_constant_triple(space)[0]


def check_b(space: DistanceSpace, params: BParams | float, tol: float = DEFAULT_TOL) -> Verdict:
    K = params.K if isinstance(params, BParams) else float(params)
    k_min, (x, y, z) = b_constant_triple(space)
    if le(k_min, K, tol) or len(space) < 2:
        return passing(K_min=k_min, margin=K - k_min)
    d = space.d
    lab = space.labels
    return failing(
        Witness(
            "b_triangle",
            (lab[x], lab[y], lab[z]),
            float(d[x, z]),
            K * (float(d[x, y]) + float(d[y, z])),
            "D(x,z) <= K*(D(x,y) + D(y,z))",
        ),
        K_min=k_min,
        margin=K - k_min,
    )


def check_metric(space: DistanceSpace, tol: float = DEFAULT_TOL) -> Verdict:
    """Distance axioms plus the ordinary triangle inequality."""
    v = check_distance_axioms(space, tol)
    if not v.passed:
        return v
    d = space.d
    rhs = d[:, :, None] + d[None, :, :]
    lhs = np.broadcast_to(d[:, None, :], rhs.shape)
    bad = lhs > rhs + tol * np.maximum(1.0, rhs)
    if not bad.any():
        return passing(points=len(space))
    x, y, z = np.unravel_index(int(np.argmax(np.where(bad, lhs - rhs, -np.inf))), rhs.shape)
    lab = space.labels
    return failing(
        Witness("triangle", (lab[x], lab[y], lab[z]), float(lhs[x, y, z]), float(rhs[x, y, z]), "D(x,z) <= D(x,y) + D(y,z)")
    )


# -- F-metrics -------------------------------------------------------------


@dataclass(frozen=True)
class SpMatrix:
    """All-pairs minimum chain sums with next-hop table for chain recovery."""

    sp: np.ndarray
    nxt: np.ndarray

    def chain(self, i: int, j: int) -> list[int]:
        path = [i]
        while path[-1] != j:
            path.append(int(self.nxt[path[-1], j]))
            if len(path) > len(self.sp) + 1:
                raise RuntimeError("next-hop table has a cycle")
        if len(path) == 1:
            path.append(j)
        return path


def min_chain(weights: np.ndarray) -> SpMatrix:
    sp, nxt = _kernels.min_chain(np.asarray(weights, dtype=np.float64))
    # reversed sums can differ in the last bit; keep the matrix exactly symmetric
    sp = np.minimum(sp, sp.T)
    np.fill_diagonal(sp, 0.0)
    sp.setflags(write=False)
    nxt.setflags(write=False)
    return SpMatrix(sp, nxt)


def all_pairs_min_chain(space: DistanceSpace) -> SpMatrix:
    return min_chain(space.d)


def chain_sum(d: np.ndarray, chain: Sequence[int]) -> float:
    total = 0.0
    for u, v in zip(chain, chain[1:]):
        total += float(d[u, v])
    return total


def check_f_metric(space: DistanceSpace, params: FParams, tol: float = DEFAULT_TOL) -> Verdict:
    """Chain condition, reduced to minimum chains (see module docstring).

    Scans pairs x < y in row-major order; the witness carries a minimal chain.
    """
    n = len(space)
    if n < 2:
        return passing(pairs=0)
    spm = all_pairs_min_chain(space)
    iu, ju = np.triu_indices(n, 1)
    f, alpha = params.f, params.alpha
    fd = f.vec(space.d[iu, ju])
    fs = f.vec(spm.sp[iu, ju])
    worst = float(np.max(fd - fs - alpha))
    for k in range(len(iu)):
        if le(fd[k], fs[k] + alpha, tol):
            continue
        i, j = int(iu[k]), int(ju[k])
        chain = spm.chain(i, j)
        rhs = f(chain_sum(space.d, chain)) + alpha
        return failing(
            Witness(
                "f_chain",
                tuple(space.labels[c] for c in chain),
                float(fd[k]),
                rhs,
                "f(D(x,y)) <= f(sum of chain) + alpha",
            ),
            max_excess=worst,
        )
    return passing(pairs=len(iu), max_excess=worst)


def check_f1_monotone(f: ScalarFn, grid: Sequence[float], tol: float = DEFAULT_TOL) -> Verdict:
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1 or len(g) < 2:
        raise ValueError("grid needs at least two points")
    if np.any(g <= 0) or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing and positive")
    v = f.vec(g)
    for i in range(len(g) - 1):
        if not le(v[i], v[i + 1], tol):
            return failing(
                Witness("f1_monotone", (float(g[i]), float(g[i + 1])), float(v[i]), float(v[i + 1]), "f(s) <= f(t) for s < t")
            )
    return passing(grid_points=len(g))


def f2_schedule(t0: float, q: float, floor: float = 1e-300, max_steps: int = 2000) -> np.ndarray:
    if not (t0 > 0 and 0 < q < 1):
        raise ValueError("need t0 > 0 and 0 < q < 1")
    ts = [t0]
    while len(ts) < max_steps and ts[-1] * q >= floor:
        ts.append(ts[-1] * q)
    return np.array(ts)


def check_f2_limit(
    f: ScalarFn,
    t0: float = 1.0,
    q: float = 0.1,
    M: int = 3,
    scale: float = 0.1,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Heuristic test that f(t) -> -inf as t -> 0 along t_k = t0*q^k.

    Passes when the second half of the schedule is non-increasing and the
    values drop below f(t0) - scale*10^j for j = 1..M. Floating point ends
    the schedule near 1e-300, so logarithmic decay needs the small scale.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    ts = f2_schedule(t0, q)
    v = f.vec(ts)
    half = len(ts) // 2
    for k in range(half, len(ts) - 1):
        if not le(v[k + 1], v[k], tol):
            return failing(
                Witness("f2_decreasing", (float(ts[k + 1]), float(ts[k])), float(v[k + 1]), float(v[k]), "f(t_{k+1}) <= f(t_k)"),
                heuristic=1,
                steps=len(ts),
            )
    k_min = int(np.argmin(v))
    for j in range(1, M + 1):
        threshold = float(v[0]) - scale * 10.0**j
        if not v[k_min] < threshold:
            return failing(
                Witness("f2_threshold", (float(ts[k_min]),), float(v[k_min]), threshold, "f(t) < threshold"),
                heuristic=1,
                steps=len(ts),
            )
    return passing(heuristic=1, steps=len(ts), final_value=float(v[-1]))


# -- B-actions and theta-metrics -------------------------------------------


def _monotone_witness(th: BinaryFn, x, y, s, t, tol) -> Witness | None:
    lo, hi = th(x, y), th(s, t)
    if lt(lo, hi, tol):
        return None
    return Witness("b_action_ii", (float(x), float(y), float(s), float(t)), lo, hi, "theta(x,y) < theta(s,t)")


def _bisect_solve(th: BinaryFn, m: np.ndarray, t: np.ndarray, iters: int = 200) -> np.ndarray:
    lo = np.zeros_like(m)
    hi = m.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = th.vec(mid, t) < m
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 4e-16 * np.maximum(1.0, m)):
            break
    return hi


def check_b_action(
    theta: ThetaParams | BinaryFn,
    grid: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
    axioms: Iterable[str] = ("i", "ii", "iv", "iii"),
) -> Verdict:
    """Check the four B-action axioms on a grid containing 0.

    Strict monotonicity is checked on unit-scale probes and then on single
    grid steps in each coordinate; by transitivity that covers every grid
    4-tuple satisfying the premise. Solvability is checked by bisection for
    every sampled image value, which makes that axiom heuristic.
    """
    th = _theta_of(theta)
    g = b_action_grid() if grid is None else np.asarray(sorted(float(x) for x in grid))
    if len(g) < 3 or g[0] != 0.0 or np.any(np.diff(g) <= 0):
        raise ValueError("grid must contain 0 and at least three distinct nonnegative points")
    axioms = tuple(axioms)
    certs = {"grid_points": len(g)}
    if "iii" in axioms:
        certs["heuristic"] = 1
    n = len(g)
    T = th.vec(g[:, None], g[None, :])

    if "i" in axioms:
        if abs(T[0, 0]) > tol:
            return failing(Witness("b_action_i", (0.0, 0.0), float(T[0, 0]), 0.0, "theta(0,0) = 0"), **certs)
        for i in range(n):
            for j in range(n):
                if abs(T[i, j] - T[j, i]) > tol * max(1.0, abs(T[j, i])):
                    return failing(
                        Witness("b_action_i", (float(g[i]), float(g[j])), float(T[i, j]), float(T[j, i]), "theta(s,t) = theta(t,s)"),
                        **certs,
                    )

    if "ii" in axioms:
        for probe in MONOTONE_PROBES:
            w = _monotone_witness(th, *probe, tol)
            if w is not None:
                return failing(w, **certs)
        for i in range(n):
            for j in range(n):
                steps = []
                if j + 1 < n:
                    steps.append((i, j + 1))
                if i + 1 < n:
                    steps.append((i + 1, j))
                for si, ti in steps:
                    if not lt(T[i, j], T[si, ti], tol):
                        return failing(
                            Witness(
                                "b_action_ii",
                                (float(g[i]), float(g[j]), float(g[si]), float(g[ti])),
                                float(T[i, j]),
                                float(T[si, ti]),
                                "theta(x,y) < theta(s,t)",
                            ),
                            **certs,
                        )

    if "iv" in axioms:
        for i in range(1, n):
            if not le(T[i, 0], g[i], tol):
                return failing(Witness("b_action_iv", (float(g[i]),), float(T[i, 0]), float(g[i]), "theta(s,0) <= s"), **certs)

    if "iii" in axioms:
        ii, jj, kk = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        keep = g[kk] <= T[ii, jj]
        src_i, src_j, tt = ii[keep], jj[keep], kk[keep]
        m = T[src_i, src_j]
        t = g[tt]
        at_zero = th.vec(np.zeros_like(t), t)
        at_m = th.vec(m, t)
        slack = tol * np.maximum(1.0, np.abs(m))
        bad = np.flatnonzero((at_zero > m + slack) | (at_m < m - slack))
        if len(bad):
            p = int(bad[0])
            pts = (float(g[src_i[p]]), float(g[src_j[p]]), float(t[p]))
            if at_zero[p] > m[p] + slack[p]:
                return failing(Witness("b_action_iii", pts, float(at_zero[p]), float(m[p]), "theta(0,t) <= m"), **certs)
            return failing(Witness("b_action_iii", pts, float(at_m[p]), float(m[p]), "theta(m,t) >= m"), **certs)
        s = _bisect_solve(th, m, t)
        resid = np.abs(th.vec(s, t) - m)
        bad = np.flatnonzero(resid > slack)
        if len(bad):
            p = int(bad[0])
            return failing(
                Witness(
                    "b_action_iii_solve",
                    (float(g[src_i[p]]), float(g[src_j[p]]), float(t[p]), float(s[p])),
                    float(th(s[p], t[p])),
                    float(m[p]),
                    "theta(s,t) = m for some s in [0,m]",
                ),
                **certs,
            )
        certs["iii_samples"] = len(m)
        certs["iii_max_residual"] = float(resid.max()) if len(resid) else 0.0
    return passing(**certs)


def check_theta_metric(space: DistanceSpace, theta: ThetaParams | BinaryFn, tol: float = DEFAULT_TOL) -> Verdict:
    """D(x,z) <= theta(D(x,y), D(y,z)) over all ordered triples."""
    th = _theta_of(theta)
    d = space.d
    rhs = th.vec(d[:, :, None], d[None, :, :])
    lhs = np.broadcast_to(d[:, None, :], rhs.shape)
    excess = lhs - rhs
    worst = float(excess.max())
    bad = lhs > rhs + tol * np.maximum(1.0, np.abs(rhs))
    if not bad.any():
        return passing(max_excess=worst)
    x, y, z = np.unravel_index(int(np.argmax(np.where(bad, excess, -np.inf))), excess.shape)
    lab = space.labels
    return failing(
        Witness("theta_triangle", (lab[x], lab[y], lab[z]), float(lhs[x, y, z]), float(rhs[x, y, z]), "D(x,z) <= theta(D(x,y), D(y,z))"),
        max_excess=worst,
    )


def theta_fold(theta: ThetaParams | BinaryFn, values: Sequence[float]) -> float:
    """Left fold theta(...theta(theta(v1, v2), v3)..., vN)."""
    th = _theta_of(theta)
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("theta_fold needs at least one value")
    acc = vals[0]
    for v in vals[1:]:
        acc = th(acc, v)
    return acc


def check_chain_bound(
    space: DistanceSpace,
    theta: ThetaParams | BinaryFn,
    chain: Sequence[str],
    tol: float = DEFAULT_TOL,
) -> Verdict:
    if len(chain) < 2:
        raise ValueError("chain needs at least two labels")
    idx = [space.index(c) for c in chain]
    edges = [float(space.d[u, v]) for u, v in zip(idx, idx[1:])]
    bound = theta_fold(theta, edges)
    direct = float(space.d[idx[0], idx[-1]])
    if le(direct, bound, tol):
        return passing(fold=bound)
    return failing(
        Witness("theta_chain", tuple(str(c) for c in chain), direct, bound, "D(first,last) <= theta-fold of chain edges"),
        fold=bound,
    )
