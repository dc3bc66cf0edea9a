"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 10,40,120] [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from metrikos._kernels import compiled_backend, python_backend


def squared_space(n: int, seed: int = 0) -> np.ndarray:
    x = np.random.default_rng(seed).uniform(size=(n, 2))
    return ((x[:, None, :] - x[None, :, :]) ** 2).sum(-1)


def cases(d: np.ndarray):
    eps = float(np.median(d[d > 0]))
    return {
        "min_chain": lambda b: b.min_chain(d),
        "triangle_ratio_max": lambda b: b.triangle_ratio_max(d),
        "bottleneck_phi": lambda b: b.bottleneck_phi(d, eps, 1e-9),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="10,40,120")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled_backend is None:
        print("compiled backend not built; only the numpy fallback is timed")
    print(f"{'kernel':<20}{'n':>6}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for n in (int(s) for s in args.sizes.split(",")):
        d = squared_space(n)
        for name, fn in cases(d).items():
            py = min(timeit.repeat(lambda: fn(python_backend), number=1, repeat=args.repeat)) * 1e3
            if compiled_backend is None:
                print(f"{name:<20}{n:>6}{py:>12.3f}{'-':>12}{'-':>10}")
                continue
            cy = min(timeit.repeat(lambda: fn(compiled_backend), number=1, repeat=args.repeat)) * 1e3
            print(f"{name:<20}{n:>6}{py:>12.3f}{cy:>12.3f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
