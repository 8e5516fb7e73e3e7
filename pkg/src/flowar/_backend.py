"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback
is selected otherwise.  ``FLOWAR_BACKEND=python`` forces the fallback.
Both backends are required to produce bit-identical results.
"""

from __future__ import annotations

import os

from . import _kernels_py

_forced = os.environ.get("FLOWAR_BACKEND", "")

if _forced == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.NAME

best_split = _impl.best_split
featurize_bits = _impl.featurize_bits
nearest_anchor_codes = _impl.nearest_anchor_codes


def available_backends() -> dict[str, object]:
    """Importable kernel modules by name (for tests and benchmarks)."""
    out: dict[str, object] = {"python": _kernels_py}
    try:
        from . import _kernels

        out["compiled"] = _kernels
    except ImportError:
        pass
    return out
