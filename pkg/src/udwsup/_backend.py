"""Selects the compiled kernel extension or the NumPy fallback at import.

Set UDWSUP_PURE_PYTHON=1 to force the fallback (used by the backend benchmark
and the equivalence tests).
"""

import os

from . import _kernels_py

if os.environ.get("UDWSUP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

local_w = _impl.local_w
thermal_w = _impl.thermal_w
desitter_w = _impl.desitter_w
parallel_w = _impl.parallel_w


def backend_name() -> str:
    """'compiled' when the Cython extension is active, else 'python'."""
    return _impl.BACKEND
