"""Select the modular elimination kernel.

The compiled extension is used when it was built and the prime fits in 63
bits; ``CICYCERT_PURE_PYTHON=1`` forces the reference implementation.
"""
from __future__ import annotations

import os

from . import _modrank_py as _py

try:
    if os.environ.get("CICYCERT_PURE_PYTHON") == "1":
        raise ImportError("pure-Python backend requested")
    from . import _modrank as _ext
except ImportError:
    _ext = None

BACKEND = "compiled" if _ext is not None else "python"
_LIMIT = 2**63


def _pick(p: int, backend: str | None):
    if backend == "python" or _ext is None or p >= _LIMIT:
        if backend == "compiled" and _ext is None:
            raise RuntimeError("compiled kernel not available")
        return _py
    return _ext


def rref_mod(rows, ncols: int, p: int, backend: str | None = None):
    return _pick(p, backend).rref_mod(rows, ncols, p)


def rank_mod(rows, ncols: int, p: int, backend: str | None = None) -> int:
    return _pick(p, backend).rank_mod(rows, ncols, p)


def det_mod(rows, p: int, backend: str | None = None) -> int:
    return _pick(p, backend).det_mod(rows, p)
