import itertools
import os
import subprocess
import sys

import numpy as np
import pytest

from metrikos import _kernels
from metrikos._kernels import compiled_backend, python_backend
from metrikos.core import lt
from metrikos.generators import generate

BACKENDS = [python_backend] + ([compiled_backend] if compiled_backend is not None else [])


def matrices():
    for s in range(25):
        fam = ("euclidean_squared", "random_matrix", "euclidean")[s % 3]
        yield generate(fam, np.random.default_rng(s), 1 + s % 9).d


def bottleneck_oracle(d, eps, tol):
    n = len(d)
    out = np.full(n, np.inf)
    for a, b, c in itertools.product(range(n), repeat=3):
        if not lt(d[a, c], eps, tol):
            out[a] = min(out[a], max(d[a, b], d[b, c]))
    return out


@pytest.mark.skipif(bool(os.environ.get("METRIKOS_PURE_PYTHON")), reason="fallback forced")
def test_compiled_backend_is_built():
    assert compiled_backend is not None, "the Cython extension did not build"
    assert _kernels.BACKEND == "cython"


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.rsplit(".", 1)[-1])
def test_kernels_match_oracles(backend):
    for d in matrices():
        n = len(d)
        val, x, y, z = backend.triangle_ratio_max(d)
        if n >= 2:
            ratios = [d[a, c] / (d[a, b] + d[b, c]) for a, b, c in itertools.product(range(n), repeat=3) if a != c]
            assert val == max(ratios)
            assert d[x, z] / (d[x, y] + d[y, z]) == val
        eps = float(np.median(d)) or 1.0
        phi, _ = backend.bottleneck_phi(d, eps, 1e-9)
        np.testing.assert_array_equal(phi, bottleneck_oracle(d, eps, 1e-9))


def test_backends_bitwise_identical():
    if compiled_backend is None:
        pytest.skip("compiled backend unavailable")
    for d in matrices():
        ro = d.copy()
        ro.setflags(write=False)
        sp_p, nxt_p = python_backend.min_chain(ro)
        sp_c, nxt_c = compiled_backend.min_chain(ro)
        np.testing.assert_array_equal(sp_p, sp_c)
        np.testing.assert_array_equal(nxt_p, nxt_c)
        assert python_backend.triangle_ratio_max(ro) == compiled_backend.triangle_ratio_max(ro)
        for eps in (0.1, 0.5, 2.0):
            a = python_backend.bottleneck_phi(ro, eps, 1e-9)
            b = compiled_backend.bottleneck_phi(ro, eps, 1e-9)
            np.testing.assert_array_equal(a[0], b[0])
            np.testing.assert_array_equal(a[1], b[1])


def test_env_var_forces_fallback():
    env = dict(os.environ, METRIKOS_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from metrikos import _kernels; print(_kernels.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "python"
