"""Hot-loop kernels with a compiled fast path and a numpy fallback.

The compiled extension is optional.  Set FRAMESIEVE_PURE_PYTHON=1 before
import to force the fallback, e.g. when benchmarking one backend against
the other.
"""

from __future__ import annotations

import os
from types import ModuleType

from framesieve.kernels import _pykernels

_FORCE_PURE = os.environ.get("FRAMESIEVE_PURE_PYTHON", "").strip().lower() in {"1", "true", "yes"}

if _FORCE_PURE:
    _impl: ModuleType = _pykernels
else:
    try:
        from framesieve.kernels import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND: str = _impl.BACKEND_NAME

gaussian_smooth_kernel = _impl.gaussian_smooth_kernel
detect_peaks_kernel = _impl.detect_peaks_kernel
expand_clip_kernel = _impl.expand_clip_kernel


def available_backends() -> dict[str, ModuleType]:
    """Importable kernel backends keyed by name."""
    backends: dict[str, ModuleType] = {_pykernels.BACKEND_NAME: _pykernels}
    try:
        from framesieve.kernels import _ckernels

        backends[_ckernels.BACKEND_NAME] = _ckernels
    except ImportError:
        pass
    return backends
