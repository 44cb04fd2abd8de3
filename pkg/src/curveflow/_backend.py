"""Kernel backend selection.

``CURVEFLOW_NUMBA=0`` (or ``off`` / ``numpy``) forces the pure-numpy path;
``CURVEFLOW_NUMBA=1`` insists on numba and raises if it cannot be imported.
Default: numba when available, numpy otherwise.
"""

import os

_flag = os.environ.get("CURVEFLOW_NUMBA", "auto").strip().lower()

if _flag in ("0", "false", "off", "numpy"):
    from . import _kernels_np as kernels
else:
    try:
        from . import _kernels_jit as kernels
    except Exception:
        if _flag in ("1", "true", "on", "numba"):
            raise
        from . import _kernels_np as kernels


def backend_name() -> str:
    return kernels.BACKEND
