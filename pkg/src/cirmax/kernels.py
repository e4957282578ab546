"""Backend selection for the hot Kummer-series kernels.

The compiled extension ``cirmax._kernels`` is preferred.  Setting the
environment variable ``CIRMAX_PURE_PYTHON=1`` before import forces the
numpy fallback, which is also used automatically when the extension was
not built.
"""

import os

if os.environ.get("CIRMAX_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        from . import _kernels_py as _impl

BACKEND = _impl.NAME
FAST_EPS = _impl.FAST_EPS
WIDE_EPS = _impl.WIDE_EPS
HAS_WIDE = _impl.HAS_WIDE

series_fast = _impl.series_fast
series_fast_vec = _impl.series_fast_vec
series_wide = _impl.series_wide

__all__ = [
    "BACKEND",
    "FAST_EPS",
    "WIDE_EPS",
    "HAS_WIDE",
    "series_fast",
    "series_fast_vec",
    "series_wide",
]
