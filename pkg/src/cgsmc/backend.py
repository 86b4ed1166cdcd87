"""Kernel backend selection.

The numeric inner loops are written once, in plain loop-oriented Python on
numpy arrays, and either compiled with numba (default) or executed as-is.
Selection happens at import time through the ``CGSMC_BACKEND`` environment
variable:

    CGSMC_BACKEND=numba   compile hot kernels with numba.njit (default)
    CGSMC_BACKEND=numpy   pure-Python/numpy execution, no compilation

Both paths run the identical source and consume identical random streams,
so results at a fixed seed match across backends.
"""

import os
import warnings

_choice = os.environ.get("CGSMC_BACKEND", "").strip().lower()
if _choice not in ("", "numba", "numpy"):
    raise RuntimeError(f"CGSMC_BACKEND must be 'numba' or 'numpy', got {_choice!r}")

USE_NUMBA = _choice != "numpy"
if USE_NUMBA:
    try:
        import numba
        from numba import njit as _njit
        from numba import typed as _typed
        from numba import types as _types
    except ImportError:
        if _choice == "numba":
            raise
        warnings.warn("numba not importable, falling back to the numpy backend")
        USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"


if USE_NUMBA:

    def jit(fn):
        """Compile a hot kernel; nogil so thread workers can overlap."""
        return _njit(cache=True, nogil=True)(fn)

    # cache key: code-1 skeleton packed into 8 x 62 bits (caps p at 32)
    _KEY_T = _types.UniTuple(_types.int64, 8)

    def make_norm_cache():
        return _typed.Dict.empty(_KEY_T, _types.float64)

else:

    def jit(fn):
        return fn

    def make_norm_cache():
        return {}
