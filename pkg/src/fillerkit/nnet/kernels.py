"""Kernel backend selection.

The compiled Cython backend is preferred when its extension built; the
pure-numpy fallback is otherwise identical in behavior. Set
FILLERKIT_KERNELS=numpy or =cython to force one (benchmarks and the
backend-parity tests do this).
"""

from __future__ import annotations

import os

from . import _pykernels


def _load_backend(name: str | None):
    if name == "numpy":
        return _pykernels
    if name == "cython":
        from . import _ckernels  # raises ImportError if the extension is missing

        return _ckernels
    try:
        from . import _ckernels

        return _ckernels
    except ImportError:
        return _pykernels


_impl = _load_backend(os.environ.get("FILLERKIT_KERNELS"))

BACKEND = _impl.BACKEND_NAME
conv2d_forward = _impl.conv2d_forward
conv2d_backward = _impl.conv2d_backward
conv1d_forward = _impl.conv1d_forward
conv1d_backward = _impl.conv1d_backward


def get_backend(name: str):
    """Return a specific backend module (for benchmarks/tests)."""
    return _load_backend(name)
