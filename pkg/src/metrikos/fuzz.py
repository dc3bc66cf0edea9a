"""Randomised counterexample search with witness shrinking."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from metrikos.axioms import check_b, check_f_metric, check_theta_metric
from metrikos.core import DEFAULT_TOL, BParams, DistanceSpace, FParams, ThetaParams, Verdict, check_distance_axioms
from metrikos.generators import generate

Checker = Callable[[DistanceSpace], Verdict]


def structure_checker(structure: str, params, tol: float = DEFAULT_TOL) -> Checker:
    if structure == "b":
        return lambda s: check_b(s, params, tol)
    if structure == "f":
        return lambda s: check_f_metric(s, params, tol)
    if structure == "theta":
        return lambda s: check_theta_metric(s, params, tol)
    raise ValueError(f"unknown structure {structure!r}")


def _violates(check: Checker, space: DistanceSpace) -> bool:
    return check_distance_axioms(space).passed and not check(space).passed


def shrink(space: DistanceSpace, check: Checker, max_digits: int = 6) -> DistanceSpace:
    """Greedy shrink: drop points while the violation persists, then round
    each distance to as few decimals as keeps the violation."""
    changed = True
    while changed and len(space) > 1:
        changed = False
        for i in range(len(space)):
            keep = [j for j in range(len(space)) if j != i]
            sub = space.subspace(keep)
            if _violates(check, sub):
                space = sub
                changed = True
                break
    n = len(space)
    for i in range(n):
        for j in range(i + 1, n):
            v = float(space.d[i, j])
            for digits in range(max_digits + 1):
                r = round(v, digits)
                if r == v:
                    break
                if r <= 0:
                    continue
                m = np.array(space.d)
                m[i, j] = m[j, i] = r
                cand = DistanceSpace(space.labels, m)
                if _violates(check, cand):
                    space = cand
                    break
    return space


@dataclass(frozen=True)
class TrialResult:
    trial: int
    seed: int
    passed: bool
    points: int
    witness: dict | None = None
    shrunk_space: dict | None = None

    def to_dict(self) -> dict:
        out = {"trial": self.trial, "seed": self.seed, "pass": self.passed, "points": self.points}
        if not self.passed:
            out["witness"] = self.witness
            out["shrunk_space"] = self.shrunk_space
        return out


def run_trial(trial: int, seed: int, family: dict, check: Checker) -> TrialResult:
    rng = np.random.default_rng(seed + trial)
    kw = {k: v for k, v in family.items() if k not in ("family", "points")}
    space = generate(family.get("family", "euclidean_squared"), rng, int(family.get("points", 6)), **kw)
    verdict = check(space)
    if verdict.passed:
        return TrialResult(trial, seed + trial, True, len(space))
    small = shrink(space, check)
    return TrialResult(
        trial,
        seed + trial,
        False,
        len(space),
        check(small).witness.to_dict(),
        small.to_dict(),
    )


def run_fuzz(
    structure: str,
    params: BParams | FParams | ThetaParams,
    family: dict,
    seed: int,
    trials: int,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> list[TrialResult]:
    """Run ``trials`` independent trials; trial i uses seed ``seed + i``.

    Results come back in trial order whatever the worker count.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    check = structure_checker(structure, params, tol)
    if workers <= 1:
        return [run_trial(i, seed, family, check) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: run_trial(i, seed, family, check), range(trials)))
