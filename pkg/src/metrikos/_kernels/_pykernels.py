"""Pure numpy implementations of the O(n^3) kernels.

Every function here has a compiled twin in ``_ckernels.pyx`` performing the
same floating-point operations in the same order, so both backends return
bitwise-identical results.
"""

import numpy as np


def min_chain(w):
    """Floyd-Warshall over a nonnegative weight matrix.

    Returns ``(sp, nxt)`` where ``nxt[i, j]`` is the vertex after ``i`` on a
    minimal chain to ``j``. Relaxation is strict, so ties keep the earlier path.
    """
    sp = np.array(w, dtype=np.float64, copy=True)
    n = sp.shape[0]
    nxt = np.tile(np.arange(n, dtype=np.intp), (n, 1))
    for k in range(n):
        cand = sp[:, k, None] + sp[None, k, :]
        better = cand < sp
        if better.any():
            sp = np.where(better, cand, sp)
            nxt = np.where(better, nxt[:, k, None], nxt)
    return sp, nxt


def triangle_ratio_max(d):
    """Max of d(x,z) / (d(x,y) + d(y,z)) over x != z, first argmax in (x,y,z) order."""
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    if n < 2:
        return 1.0, 0, 0, 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = d[:, None, :] / (d[:, :, None] + d[None, :, :])
    idx = np.arange(n)
    ratio[idx, :, idx] = -np.inf
    flat = int(np.argmax(ratio))
    x, y, z = np.unravel_index(flat, ratio.shape)
    return float(ratio[x, y, z]), int(x), int(y), int(z)


def bottleneck_phi(d, eps, tol):
    """Per anchor a: min over (b, c) with d(a,c) not clearly below eps of
    max(d(a,b), d(b,c)), plus the first minimising (b, c); inf and -1 if none.
    """
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    cut = eps - tol * max(1.0, abs(eps))
    out = np.full(n, np.inf)
    arg = np.full((n, 2), -1, dtype=np.intp)
    for a in range(n):
        bad_c = ~(d[a] < cut)
        if not bad_c.any():
            continue
        m = np.maximum(d[a][:, None], d)
        m[:, ~bad_c] = np.inf
        flat = int(np.argmin(m))
        b, c = divmod(flat, n)
        out[a] = m[b, c]
        arg[a] = (b, c)
    return out, arg
