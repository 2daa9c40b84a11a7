"""Hot array kernels with backend selection at import time.

The compiled Cython core is preferred when it imported cleanly; otherwise the
numpy fallback is used.  Set MBRT_KERNELS=numpy or MBRT_KERNELS=cython to
force a backend (forcing cython raises if the extension is missing).  Both
backends return bit-identical arrays; see benchmarks/bench_kernels.py for a
speed comparison.
"""

from __future__ import annotations

import os

from mbrt.kernels import numpy_backend

try:
    from mbrt.kernels import _cykernels
except ImportError:  # pragma: no cover - depends on build environment
    _cykernels = None

_forced = os.environ.get("MBRT_KERNELS", "").strip().lower()
if _forced == "numpy":
    _impl = numpy_backend
elif _forced == "cython":
    if _cykernels is None:
        raise ImportError("MBRT_KERNELS=cython but the compiled extension is not available")
    _impl = _cykernels
elif _forced:
    raise ImportError(f"unknown MBRT_KERNELS value: {_forced!r}")
else:
    _impl = _cykernels if _cykernels is not None else numpy_backend


def backend_name() -> str:
    return "cython" if _impl is _cykernels else "numpy"


im2col = _impl.im2col
col2im = _impl.col2im
maxpool2_forward = _impl.maxpool2_forward
maxpool2_backward = _impl.maxpool2_backward

__all__ = ["backend_name", "im2col", "col2im", "maxpool2_forward", "maxpool2_backward"]
