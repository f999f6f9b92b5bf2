"""Kernel backend selection.

The compiled extension is preferred when present; the numpy fallback is used
otherwise. ``WRSNSIM_BACKEND=numpy`` forces the fallback, ``=cython`` makes a
missing extension a hard error. Both backends produce bit-identical results.
"""

from __future__ import annotations

import os

from . import pykernels

_choice = os.environ.get("WRSNSIM_BACKEND", "auto").strip().lower()

if _choice in ("", "auto", "cython"):
    try:
        from . import cykernels as _impl
    except ImportError:
        if _choice == "cython":
            raise ImportError(
                "WRSNSIM_BACKEND=cython but the compiled kernels are not built; "
                "reinstall with a C compiler available"
            )
        _impl = pykernels
elif _choice == "numpy":
    _impl = pykernels
else:
    raise ValueError(f"unknown WRSNSIM_BACKEND {_choice!r} (expected auto, cython or numpy)")

BACKEND = _impl.BACKEND
sense_sweep = _impl.sense_sweep
charge_sweep = _impl.charge_sweep


def available_backends():
    """Importable kernel modules keyed by name (for parity tests/benchmarks)."""
    backends = {"numpy": pykernels}
    try:
        from . import cykernels

        backends["cython"] = cykernels
    except ImportError:
        pass
    return backends
