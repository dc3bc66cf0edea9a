"""Local and uniform regularity certificates (phi, r, delta) and their replays."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from metrikos import _kernels
from metrikos.axioms import _theta_of
from metrikos.core import (
    DEFAULT_TOL,
    BParams,
    DistanceSpace,
    FParams,
    MetrikosError,
    SampledSequence,
    ThetaParams,
    Verdict,
    Witness,
    failing,
    le,
    lt,
    passing,
)
from metrikos.expr import BinaryFn
from metrikos.grids import GeometricGrid, Grid, as_ascending, grid_resolution, last_true, log_grid

CONDITIONS = ("iii-A", "iii-B", "iii-C", "uniform")


class CertificateNotFound(MetrikosError):
    def __init__(self, message: str, trace: dict):
        self.trace = trace
        super().__init__(message)


@dataclass(frozen=True)
class RegularityCertificate:
    condition: str
    anchor: str | None
    scale: float
    value: float
    method: str  # closed-form | grid-search
    margin: float | None = None
    resolution: float | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def num(x):
            return None if x is None or not math.isfinite(x) else x

        out = {
            "condition": self.condition,
            "anchor": self.anchor,
            "scale": self.scale,
            "value": self.value,
            "method": self.method,
            "margin": num(self.margin),
            "resolution": num(self.resolution),
        }
        if self.details:
            out["details"] = {k: num(v) for k, v in sorted(self.details.items())}
        return out


# -- space-relative searches (iii-A, uniform) --------------------------------


def candidate_phis(space: DistanceSpace) -> np.ndarray:
    """Distinct positive distances, their consecutive midpoints, and half the smallest."""
    vals = np.unique(space.d[space.d > 0])
    if len(vals) == 0:
        return vals
    mids = (vals[:-1] + vals[1:]) / 2
    return np.unique(np.concatenate([[vals[0] / 2], vals, mids]))


def _pick(cands: np.ndarray, phi_star: float, tol: float) -> float | None:
    # phi is safe iff every offending (b, c) has max(d(a,b), d(b,c)) >= phi up to tolerance
    ok = [c for c in cands if not lt(phi_star, c, tol)]
    return float(ok[-1]) if ok else None


def _phi_cert(space, anchor, eps, phi_star, condition, tol) -> RegularityCertificate | None:
    cands = candidate_phis(space)
    if len(cands) == 0:
        return RegularityCertificate(condition, anchor, eps, eps, "grid-search", None, None, {"vacuous": 1})
    phi = _pick(cands, phi_star, tol)
    if phi is None:
        return None
    return RegularityCertificate(
        condition,
        anchor,
        eps,
        phi,
        "grid-search",
        phi_star - phi,
        grid_resolution(cands),
        {"candidates": len(cands)},
    )


def locally_regular_phi(
    space: DistanceSpace, a: str, eps: float, tol: float = DEFAULT_TOL
) -> RegularityCertificate | None:
    """Largest candidate phi with: d(a,b) < phi and d(b,c) < phi imply d(a,c) < eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    i = space.index(a)
    phi_star, _ = _kernels.bottleneck_phi(space.d, eps, tol)
    return _phi_cert(space, space.labels[i], eps, float(phi_star[i]), "iii-A", tol)


def uniform_phi(space: DistanceSpace, eps: float, tol: float = DEFAULT_TOL) -> RegularityCertificate | None:
    """Anchor-free version: the implication holds for every x, y, z."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    phi_star, _ = _kernels.bottleneck_phi(space.d, eps, tol)
    return _phi_cert(space, None, eps, float(phi_star.min()), "uniform", tol)


def replay_phi(
    space: DistanceSpace, phi: float, eps: float, anchor: str | None = None, tol: float = DEFAULT_TOL
) -> Verdict:
    """Exhaustive check of the phi implication (one anchor or all)."""
    d = space.d
    anchors = range(len(space)) if anchor is None else [space.index(anchor)]
    cut = phi - tol * max(1.0, abs(phi))
    eps_cut = eps - tol * max(1.0, abs(eps))
    for a in anchors:
        near_b = d[a] < cut
        hits = near_b[:, None] & (d < cut) & ~(d[a][None, :] < eps_cut)
        if hits.any():
            b, c = divmod(int(np.argmax(hits)), len(space))
            lab = space.labels
            return failing(
                Witness("iii-A", (lab[a], lab[b], lab[c]), float(d[a, c]), eps, "d(a,b) < phi and d(b,c) < phi imply d(a,c) < eps"),
                phi=phi,
            )
    return passing(phi=phi)


# -- iii-C ----------------------------------------------------------------------


def r_for_b(params: BParams | float, t: float) -> RegularityCertificate:
    """r = t / K: from D(a,b) <= K (D(a,c) + D(c,b)) and D(a,b) >= t."""
    K = params.K if isinstance(params, BParams) else float(params)
    if K <= 0 or t <= 0:
        raise ValueError("K and t must be positive")
    return RegularityCertificate("iii-C", None, t, t / K, "closed-form", details={"K": K})


def verify_iiiC(space: DistanceSpace, a: str, k: float, r: float, tol: float = DEFAULT_TOL) -> Verdict:
    """For every b with d(a,b) >= k and every c: d(a,c) + d(b,c) >= r."""
    i = space.index(a)
    d = space.d
    far = np.flatnonzero(~(d[i] < k - tol * max(1.0, k)))
    if len(far) == 0:
        return passing(vacuous=1, r=r)
    sums = d[i][None, :] + d[far]
    bad = sums < r - tol * max(1.0, abs(r))
    if not bad.any():
        return passing(r=r, min_sum=float(sums.min()))
    row, c = divmod(int(np.argmax(bad)), len(space))
    b = int(far[row])
    lab = space.labels
    return failing(
        Witness("iii-C", (lab[i], lab[b], lab[c]), float(sums[row, c]), float(r), "D(a,c) + D(b,c) >= r"),
        r=r,
        min_sum=float(sums.min()),
    )


def iiiC_r(space: DistanceSpace, a: str, k: float, tol: float = DEFAULT_TOL) -> RegularityCertificate | None:
    """Largest r for (a, k) on the space: the minimum of d(a,c) + d(b,c)."""
    i = space.index(a)
    d = space.d
    far = np.flatnonzero(~(d[i] < k - tol * max(1.0, k)))
    if len(far) == 0:
        return RegularityCertificate("iii-C", space.labels[i], k, k, "grid-search", details={"vacuous": 1})
    r = float((d[i][None, :] + d[far]).min())
    if r <= 0:
        return None
    return RegularityCertificate("iii-C", space.labels[i], k, r, "grid-search", 0.0)


# -- function-relative searches ------------------------------------------------


def _f_threshold_search(params: FParams, scale: float, grid: Grid, tol: float, what: str):
    f, alpha = params.f, params.alpha
    level = f(scale) - alpha
    grid = as_ascending(grid)
    idx = last_true(grid, lambda t: lt(f(t), level, tol))
    if idx < 0:
        t0 = grid[0]
        raise CertificateNotFound(
            "F2 certificate not found at this resolution",
            {"what": what, "level": level, "grid_min": t0, "f_at_grid_min": f(t0)},
        )
    delta = grid[idx]
    # spot-check the monotone envelope below delta
    lo = grid[0]
    if delta > lo:
        probe = log_grid(lo, delta, per_decade=20)
        vals = f.vec(probe)
        if np.any(vals >= level - tol * max(1.0, abs(level))):
            bad = float(probe[int(np.argmax(vals >= level - tol * max(1.0, abs(level))))])
            raise CertificateNotFound(
                "f exceeds the level below the certified point; f is not non-decreasing",
                {"what": what, "level": level, "t": bad},
            )
    return delta, level, level - f(delta)


def phi_from_f(params: FParams, eps: float, grid: Grid | None = None, tol: float = DEFAULT_TOL) -> RegularityCertificate:
    """phi = delta / 2 where f(t) < f(eps) - alpha for every t <= delta.

    delta is the largest grid value that itself satisfies the bound, so with
    f non-decreasing the bound holds on all of (0, delta].
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    grid = GeometricGrid() if grid is None else grid
    delta, level, margin = _f_threshold_search(params, eps, grid, tol, "phi")
    return RegularityCertificate(
        "uniform",
        None,
        eps,
        delta / 2,
        "closed-form",
        margin,
        grid_resolution(grid),
        {"delta": delta, "level": level},
    )


def r_from_f(params: FParams, k: float, grid: Grid | None = None, tol: float = DEFAULT_TOL) -> RegularityCertificate:
    """r with 0 < t < r implying f(t) < f(k) - alpha."""
    if k <= 0:
        raise ValueError("k must be positive")
    grid = GeometricGrid() if grid is None else grid
    r, level, margin = _f_threshold_search(params, k, grid, tol, "r")
    return RegularityCertificate("iii-C", None, k, r, "closed-form", margin, grid_resolution(grid), {"level": level})


def delta_theta_at_origin(
    theta: ThetaParams | BinaryFn, k: float, grid: Grid | None = None, tol: float = DEFAULT_TOL
) -> RegularityCertificate:
    """delta with theta < k on [0, delta]^2; the certified r is delta / sqrt(2)."""
    if k <= 0:
        raise ValueError("k must be positive")
    th = _theta_of(theta)
    grid = as_ascending(GeometricGrid() if grid is None else grid)
    if isinstance(grid, GeometricGrid):
        # monotone theta: the corner theta(delta, delta) dominates the square
        idx = last_true(grid, lambda t: lt(th(t, t), k, tol))
    else:
        g = np.asarray(grid)
        table = th.vec(g[:, None], g[None, :])
        corner = np.maximum.accumulate(np.maximum.accumulate(table, axis=0), axis=1)
        diag = np.diagonal(corner)
        ok = diag < k - tol * max(1.0, k)
        idx = (int(np.argmin(ok)) - 1) if not ok.all() else len(g) - 1
    if idx < 0:
        raise CertificateNotFound(
            "theta certificate not found at this resolution", {"k": k, "grid_min": grid[0], "theta_at_min": th(grid[0], grid[0])}
        )
    delta = grid[idx]
    value = delta / math.sqrt(2.0)
    return RegularityCertificate(
        "iii-C",
        None,
        k,
        value,
        "closed-form",
        k - th(delta, delta),
        grid_resolution(grid),
        {"delta": delta, "delta_over_sqrt2": value},
    )


# -- iii-B on distance traces ----------------------------------------------------


def check_iiiB(
    d_an_a: SampledSequence,
    d_an_bn: SampledSequence,
    d_bn_a: SampledSequence,
    tol: float,
    tol_out: float | None = None,
) -> Verdict:
    """On the longest tail where D(a_n,a) and D(a_n,b_n) are below ``tol``,
    D(b_n,a) must end below ``tol_out`` (default ``tol``).

    Indices in witnesses are 1-based (n = 1, 2, ...).
    """
    if not (len(d_an_a) == len(d_an_bn) == len(d_bn_a)):
        raise ValueError(f"trace lengths differ: {len(d_an_a)}, {len(d_an_bn)}, {len(d_bn_a)}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    tol_out = tol if tol_out is None else tol_out
    x = np.array(d_an_a.values)
    y = np.array(d_an_bn.values)
    z = np.array(d_bn_a.values)
    n = len(x)
    outside = np.flatnonzero(~((x < tol) & (y < tol)))
    start = int(outside[-1]) + 1 if len(outside) else 0
    if start == n:
        return passing(vacuous=1, tail_start=n + 1)
    tail_bad = np.flatnonzero(~(z[start:] < tol_out))
    if len(tail_bad) == 0 or tail_bad[-1] != n - 1 - start:
        settle = start + (int(tail_bad[-1]) + 1 if len(tail_bad) else 0)
        return passing(tail_start=start + 1, settle_index=settle + 1)
    # find the start of the final run of values that never decay
    run = start + int(tail_bad[-1])
    while run - 1 >= start and not z[run - 1] < tol_out:
        run -= 1
    return failing(
        Witness("iii-B", (run + 1,), float(z[run]), float(tol_out), "D(b_n,a) < tol' eventually"),
        tail_start=start + 1,
    )


# -- equivalence cross-check -----------------------------------------------------


def cross_check_conditions(space: DistanceSpace, eps_grid: Sequence[float], tol: float = DEFAULT_TOL) -> Verdict:
    """Compare existence of (iii-A) and (iii-C) certificates at k = eps."""
    compared = 0
    for eps in eps_grid:
        for a in space.labels:
            cert_a = locally_regular_phi(space, a, eps, tol)
            has_a = cert_a is not None and replay_phi(space, cert_a.value, eps, a, tol).passed
            cert_c = iiiC_r(space, a, eps, tol)
            has_c = cert_c is not None and verify_iiiC(space, a, eps, cert_c.value, tol).passed
            compared += 1
            if has_a != has_c:
                return failing(
                    Witness("cross_check", (a, float(eps)), float(has_a), float(has_c), "iii-A exists == iii-C exists"),
                    compared=compared,
                )
    return passing(compared=compared)
