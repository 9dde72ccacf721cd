"""Kernel backend selection.

The compiled extension is preferred when it built; setting the environment
variable ``PLAPVAR_PURE_PYTHON=1`` forces the numpy fallback.  Both backends
implement the same contract and are cross-checked in the test suite.
"""
import os

from . import pyfallback

if os.environ.get("PLAPVAR_PURE_PYTHON") == "1":
    _impl = pyfallback
else:
    try:
        from . import core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pyfallback

BACKEND = _impl.BACKEND
phi_vals = _impl.phi_vals
energy = _impl.energy
grad = _impl.grad
