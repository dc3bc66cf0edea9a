"""Explicit metrics on finite spaces via minimum chain sums of transformed weights.

For a weight transform h, the constructed metric is

    d(x, y) = min over chains x = u_1, ..., u_N = y of sum h(D(u_i, u_{i+1}))

which is a genuine metric on a finite space with positive weights, and never
exceeds h(D(x, y)). The ratio h(D)/d measures the distortion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from metrikos.axioms import check_f1_monotone, check_metric, min_chain
from metrikos.core import (
    DEFAULT_TOL,
    BParams,
    DistanceSpace,
    FParams,
    MetrikosError,
    Verdict,
    Witness,
    failing,
    le,
    passing,
)
from metrikos.expr import ScalarFn
from metrikos.grids import log_grid

SNOWFLAKE_DISTORTION_BOUND = 4.0


class TransformError(MetrikosError, ValueError):
    pass


class BracketError(MetrikosError, ValueError):
    pass


@dataclass(frozen=True)
class WeightTransform:
    kind: str  # identity | power | custom
    epsilon: float = 1.0
    fn: ScalarFn | None = None
    description: str = ""

    def __post_init__(self):
        if self.kind not in ("identity", "power", "custom"):
            raise TransformError(f"unknown transform kind {self.kind!r}")
        if self.kind == "power" and not (0 < self.epsilon <= 1):
            raise TransformError(f"power exponent must lie in (0, 1], got {self.epsilon}")
        if self.kind == "custom":
            if self.fn is None:
                raise TransformError("custom transform needs a function")
            grid = log_grid(1e-6, 1e6, per_decade=10)
            if not check_f1_monotone(self.fn, grid).passed:
                raise TransformError(f"custom transform {self.fn.source} is not non-decreasing")
            if np.any(self.fn.vec(grid) <= 0):
                raise TransformError(f"custom transform {self.fn.source} is not positive on (0, inf)")
        if not self.description:
            text = {
                "identity": "h(t) = t",
                "power": f"h(t) = t^{self.epsilon!r}",
                "custom": f"h(t) = {self.fn.source if self.fn else ''}",
            }[self.kind]
            object.__setattr__(self, "description", text)

    @classmethod
    def identity(cls) -> "WeightTransform":
        return cls("identity")

    @classmethod
    def power(cls, epsilon: float) -> "WeightTransform":
        return cls("power", float(epsilon))

    @classmethod
    def custom(cls, fn: ScalarFn | str) -> "WeightTransform":
        if isinstance(fn, str):
            fn = ScalarFn.parse(fn)
        return cls("custom", fn=fn)

    @classmethod
    def parse(cls, text: str) -> "WeightTransform":
        """``identity``, ``power:<eps>`` or ``custom:<expression in t>``."""
        kind, _, arg = text.partition(":")
        if kind == "identity" and not arg:
            return cls.identity()
        if kind == "power":
            return cls.power(float(arg))
        if kind == "custom":
            return cls.custom(arg)
        raise TransformError(f"cannot parse transform {text!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "identity":
            return t.copy()
        if self.kind == "power":
            return t**self.epsilon
        return self.fn.vec(t)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "description": self.description}
        if self.kind == "power":
            out["epsilon"] = self.epsilon
        if self.kind == "custom":
            out["fn"] = self.fn.source
        return out


@dataclass(frozen=True)
class ChainMetricResult:
    labels: tuple[str, ...]
    metric: np.ndarray
    transform: WeightTransform
    max_distortion: float
    argmax_pair: tuple[str, str] | None
    per_pair_bounds: tuple[tuple[str, str, float, float], ...] = field(repr=False)

    def as_space(self) -> DistanceSpace:
        return DistanceSpace(self.labels, self.metric)

    def to_dict(self) -> dict:
        return {
            "transform": self.transform.to_dict(),
            "labels": list(self.labels),
            "metric": self.metric.tolist(),
            "max_distortion": self.max_distortion,
            "argmax_pair": None if self.argmax_pair is None else list(self.argmax_pair),
            "per_pair_bounds": [
                {"pair": [a, b], "lower": lo, "upper": hi} for a, b, lo, hi in self.per_pair_bounds
            ],
        }


def snowflake_exponent(K: float) -> float:
    """ln 2 / ln(2 K'), K' = max(K, 1)."""
    if K <= 0:
        raise ValueError("K must be positive")
    k = max(float(K), 1.0)
    return math.log(2.0) / math.log(2.0 * k)


def _weights(space: DistanceSpace, transform: WeightTransform) -> np.ndarray:
    n = len(space)
    w = np.zeros((n, n))
    if n < 2:
        return w
    off = ~np.eye(n, dtype=bool)
    w[off] = transform(space.d[off])
    bad = off & ~((w > 0) & np.isfinite(w))
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise TransformError(
            f"transform gives weight {w[i, j]!r} on edge ({space.labels[i]}, {space.labels[j]})"
        )
    return w


def chain_metric(space: DistanceSpace, transform: WeightTransform | None = None) -> ChainMetricResult:
    transform = WeightTransform.identity() if transform is None else transform
    w = _weights(space, transform)
    metric = np.array(min_chain(w).sp)
    n = len(space)
    lab = space.labels
    if n < 2:
        return ChainMetricResult(lab, metric, transform, 1.0, None, ())
    iu, ju = np.triu_indices(n, 1)
    ratio = w[iu, ju] / metric[iu, ju]
    k = int(np.argmax(ratio))
    bounds = tuple(
        (lab[i], lab[j], float(metric[i, j]), float(w[i, j])) for i, j in zip(iu.tolist(), ju.tolist())
    )
    metric.setflags(write=False)
    return ChainMetricResult(lab, metric, transform, float(ratio[k]), (lab[iu[k]], lab[ju[k]]), bounds)


def distortion_report(
    result: ChainMetricResult,
    space: DistanceSpace,
    params: BParams | None = None,
    tol: float = DEFAULT_TOL,
) -> dict:
    """Recompute the distortion from the source space and audit the metric.

    When ``params`` is given and the transform is the snowflake power for K,
    the report flags whether the distortion stayed within 4. That bound is
    an empirical expectation, not a guarantee of this tool.
    """
    if result.metric.shape != space.d.shape:
        raise ValueError(f"metric shape {result.metric.shape} does not match space {space.d.shape}")
    n = len(space)
    metric_ok = check_metric(result.as_space(), tol)
    report: dict = {"metric_axioms": metric_ok.to_dict()}
    if n < 2:
        report.update(max_distortion=1.0, argmax_pair=None)
    else:
        w = _weights(space, result.transform)
        iu, ju = np.triu_indices(n, 1)
        ratio = w[iu, ju] / result.metric[iu, ju]
        k = int(np.argmax(ratio))
        report.update(
            max_distortion=float(ratio[k]),
            argmax_pair=[space.labels[iu[k]], space.labels[ju[k]]],
            lower_bound_holds=bool(np.all(result.metric[iu, ju] <= w[iu, ju] * (1 + tol))),
        )
    if params is not None and result.transform.kind == "power":
        eps = snowflake_exponent(params.K)
        if math.isclose(result.transform.epsilon, eps, rel_tol=1e-12):
            report["snowflake"] = {
                "K": params.K,
                "epsilon": eps,
                "expected_bound": SNOWFLAKE_DISTORTION_BOUND,
                "within_bound": bool(report["max_distortion"] <= SNOWFLAKE_DISTORTION_BOUND),
                "empirical": True,
            }
    return report


def f_upper_bound(
    params: FParams,
    sp_value: float,
    search_bracket: tuple[float, float] | None = None,
    tol: float = DEFAULT_TOL,
    max_doublings: int = 200,
) -> float:
    """Least u (from above, within tolerance) with f(u) >= f(sp_value) + alpha.

    For f non-decreasing, any pair whose minimum chain sum is ``sp_value`` on a
    space passing the chain condition has D(x, y) <= u.
    """
    if sp_value <= 0:
        raise ValueError("sp_value must be positive")
    f = params.f
    target = f(sp_value) + params.alpha
    if search_bracket is None:
        lo = hi = float(sp_value)
        if f(lo) >= target:
            return lo
        for _ in range(max_doublings):
            hi *= 2.0
            if f(hi) >= target:
                break
        else:
            raise BracketError(f"no u up to {hi!r} reaches level {target!r}")
    else:
        lo, hi = (float(v) for v in search_bracket)
        if not (lo < hi) or f(lo) > target or f(hi) < target:
            raise BracketError(f"bracket [{lo!r}, {hi!r}] does not straddle level {target!r}")
        if f(lo) >= target:
            return lo
    for _ in range(500):
        if hi - lo <= tol * max(1.0, abs(hi)) * 1e-3:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def check_f_sandwich(
    space: DistanceSpace, params: FParams, result: ChainMetricResult | None = None, tol: float = DEFAULT_TOL
) -> Verdict:
    """d <= D <= f^-1(f(d) + alpha) pairwise, with d the identity chain metric."""
    if result is None:
        result = chain_metric(space)
    n = len(space)
    lab = space.labels
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            lower = float(result.metric[i, j])
            D = float(space.d[i, j])
            upper = f_upper_bound(params, lower, tol=tol)
            worst = max(worst, D / lower)
            if not le(lower, D, tol):
                return failing(Witness("f_sandwich_lower", (lab[i], lab[j]), lower, D, "d(x,y) <= D(x,y)"))
            if not le(D, upper, tol):
                return failing(Witness("f_sandwich_upper", (lab[i], lab[j]), D, upper, "D(x,y) <= f^-1(f(d(x,y)) + alpha)"))
    return passing(max_ratio=worst)
