"""Kernel backend selection: compiled extension when importable.

The compiled and numpy kernels implement the same contract
(_kernels.pyx / _kernels_py.py); nothing outside this module should
import either directly.  Set CONEREC_KERNELS=python to force the
fallback, e.g. for the benchmark comparison.
"""

import os

if os.environ.get("CONEREC_KERNELS", "").lower() in ("python", "py"):
    from . import _kernels_py as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as kernels
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
