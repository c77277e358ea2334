"""Kernel backend selection.

The compiled core is preferred when importable; set EXECAWARE_KERNELS to
``pure`` or ``compiled`` to force a backend (``compiled`` raises if the
extension is missing).
"""

from __future__ import annotations

import os

from . import _pure

_requested = os.environ.get("EXECAWARE_KERNELS", "auto")

if _requested == "pure":
    _backend = _pure
elif _requested == "compiled":
    from . import _core as _backend  # type: ignore[no-redef]
elif _requested == "auto":
    try:
        from . import _core as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _pure
else:
    raise RuntimeError(f"EXECAWARE_KERNELS must be auto|pure|compiled, got {_requested!r}")

backend_name: str = _backend.NAME
line_counts = _backend.line_counts
a12_counts = _backend.a12_counts
signed_rank_tail_count = _backend.signed_rank_tail_count

__all__ = ["backend_name", "line_counts", "a12_counts", "signed_rank_tail_count"]
