"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import. Set ``PLTELM_DISABLE_NUMBA=1`` to force
the numpy path (also used automatically when numba is not importable).
Both backends are importable directly as ``numpy_backend`` / ``numba_backend``
for cross-checking and benchmarking.
"""

import os

from . import _numpy as numpy_backend

_disabled = os.environ.get("PLTELM_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    from . import _numba as numba_backend
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None

if numba_backend is not None and not _disabled:
    backend = numba_backend
    BACKEND_NAME = "numba"
else:
    backend = numpy_backend
    BACKEND_NAME = "numpy"

SIGMOID, SINE, HARDLIMIT = numpy_backend.SIGMOID, numpy_backend.SINE, numpy_backend.HARDLIMIT

matmul = backend.matmul
gauss_jordan_inverse = backend.gauss_jordan_inverse
hidden_layer = backend.hidden_layer
rls_step = backend.rls_step

__all__ = [
    "BACKEND_NAME",
    "numpy_backend",
    "numba_backend",
    "matmul",
    "gauss_jordan_inverse",
    "hidden_layer",
    "rls_step",
]
