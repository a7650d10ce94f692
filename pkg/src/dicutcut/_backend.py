"""Kernel backend selection.

The hot loops (assignment enumeration, solver inner loop) exist twice:
compiled in ``dicutcut._kernels`` (Cython) and in pure numpy in
``dicutcut._pykernels``.  The compiled backend is picked at import time
when present; set ``DICUTCUT_FORCE_PYTHON=1`` to force the fallback.
``benchmarks/bench_backends.py`` compares the two.
"""

from __future__ import annotations

import os

from dicutcut import _pykernels

_force_python = os.environ.get("DICUTCUT_FORCE_PYTHON", "") not in ("", "0")

if not _force_python:
    try:
        from dicutcut import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"
else:
    _impl = _pykernels
    BACKEND = "python"

best_cuts_scan = _impl.best_cuts_scan
al_inner = _impl.al_inner
