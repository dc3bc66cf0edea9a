"""Hot-loop kernels with a compiled backend and a numpy fallback.

The compiled extension is used when it was built and importable; set
``METRIKOS_PURE_PYTHON=1`` to force the fallback.
"""

import os

from metrikos._kernels import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("METRIKOS_PURE_PYTHON"):
    try:
        from metrikos._kernels import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

min_chain = backend.min_chain
triangle_ratio_max = backend.triangle_ratio_max
bottleneck_phi = backend.bottleneck_phi
