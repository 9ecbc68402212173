"""Kernel backend selection.

The compiled kernels are preferred; set LATKIT_PURE_PYTHON=1 before
import to force the pure-Python fallback.  The two backends mirror each
other operation for operation and produce bit-identical results.
"""

import os

from . import _pykernels

_force_pure = os.environ.get("LATKIT_PURE_PYTHON", "0") not in ("", "0")

if _force_pure:
    backend = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as backend

        BACKEND = "cython"
    except ImportError:
        backend = _pykernels
        BACKEND = "python"
