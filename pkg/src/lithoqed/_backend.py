"""Reduction-core selection.

Two interchangeable implementations of the wave-vector reduction exist: the
vectorized numpy module (whose inner products run in BLAS) and a compiled
Cython extension with fused loops.  On hosts with a good BLAS the numpy
path measures faster (see benchmarks/bench_core.py), so it is the default;
set LITHOQED_BACKEND=compiled to force the extension (raises if it is not
built) or LITHOQED_BACKEND=numpy to pin the fallback explicitly.
"""
from __future__ import annotations

import os

from . import _corepy

_forced = os.environ.get("LITHOQED_BACKEND", "").strip().lower()

if _forced in ("compiled", "cython"):
    from . import _core as _impl
elif _forced in ("", "numpy"):
    _impl = _corepy
else:
    raise ImportError(f"unknown LITHOQED_BACKEND {_forced!r}")

reduce_composition = _impl.reduce_composition
backend_name = _impl.backend_name


def available_backends():
    names = ["numpy"]
    try:
        from . import _core  # noqa: F401
        names.append("compiled")
    except ImportError:
        pass
    return names
