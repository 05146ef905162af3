"""Selects the quadrature-kernel backend at import time.

The compiled extension is preferred; the NumPy implementation is the
fallback. Set ``CASIMIR_MTO_PURE=1`` to force the fallback (used by the
benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("CASIMIR_MTO_PURE", "") not in ("", "0"):
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_py


def backend_name() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return kernels.BACKEND


def available_backends() -> dict[str, object]:
    """All importable kernel backends, keyed by name."""
    out: dict[str, object] = {_kernels_py.BACKEND: _kernels_py}
    try:
        from . import _kernels  # noqa: F401
        out[_kernels.BACKEND] = _kernels
    except ImportError:
        pass
    return out
