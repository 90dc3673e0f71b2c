"""Selects the compiled attachment kernels, falling back to pure numpy.

Set ``NNTLAB_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and by tests that compare the two backends).
"""

from __future__ import annotations

import os

from . import _attach_py

if os.environ.get("NNTLAB_PURE_PYTHON", "").strip() not in ("", "0"):
    kernels = _attach_py
    BACKEND = "python"
else:
    try:
        from . import _attach_c as kernels  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        kernels = _attach_py
        BACKEND = "python"
