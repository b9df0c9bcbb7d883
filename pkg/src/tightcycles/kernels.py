"""Kernel backend selection: compiled Cython extension when built, pure
Python otherwise.  Set ``TIGHTCYCLES_PURE=1`` to force the fallback."""

from __future__ import annotations

import os

from . import _pykernels

try:  # the extension is optional; everything works without it, just slower
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

HAS_COMPILED = _compiled is not None


def backend():
    if _compiled is not None and os.environ.get("TIGHTCYCLES_PURE") != "1":
        return _compiled
    return _pykernels


def backend_name() -> str:
    return backend().NAME
