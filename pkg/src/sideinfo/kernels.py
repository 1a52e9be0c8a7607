"""Kernel backend selection.

The compiled extension is used when it imports; set ``SIDEINFO_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from . import _pykernels

if os.environ.get("SIDEINFO_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.NAME
ba = _impl.ba
gp = _impl.gp
mac = _impl.mac


def backends():
    """Every importable backend module, keyed by name."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels

        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
