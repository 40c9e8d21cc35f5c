"""Backend selection for the area scan.

The compiled kernel is preferred.  Setting ``GEOLOCDNS_PURE_PYTHON=1``
forces the fallback, which is also used when the extension was not built.
"""
import os

from . import _pyscan

try:
    from . import _kernels
except ImportError:
    _kernels = None

BACKENDS = {"python": _pyscan}
if _kernels is not None:
    BACKENDS["compiled"] = _kernels

if _kernels is not None and os.environ.get("GEOLOCDNS_PURE_PYTHON", "") in ("", "0"):
    DEFAULT_BACKEND = "compiled"
else:
    DEFAULT_BACKEND = "python"

_default = BACKENDS[DEFAULT_BACKEND]
plane_xy = _default.plane_xy


def get_scan(backend=None):
    if backend is None or backend == "auto":
        return _default.scan_first
    try:
        return BACKENDS[backend].scan_first
    except KeyError:
        raise ValueError(
            f"unknown or unavailable backend {backend!r}; available: {sorted(BACKENDS)}"
        ) from None


def available_backends():
    return sorted(BACKENDS)
