"""Contact-kernel backend selection.

The hot loops (penetration queries, wrench accumulation, sub-stepped
primitive execution) exist twice: a compiled Cython extension and a
pure-numpy fallback with identical semantics.  The extension is used
when importable; set ``PEGPRIM_KERNELS=py`` or ``=cy`` to force one.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels_cy
except ImportError:
    _kernels_cy = None

_FORCED = os.environ.get("PEGPRIM_KERNELS", "").strip().lower()
if _FORCED == "py":
    _impl = _kernels_py
elif _FORCED == "cy":
    if _kernels_cy is None:
        raise ImportError(
            "PEGPRIM_KERNELS=cy but the compiled extension is not available"
        )
    _impl = _kernels_cy
elif _FORCED:
    raise ValueError(f"PEGPRIM_KERNELS must be 'py' or 'cy', got {_FORCED!r}")
else:
    _impl = _kernels_cy if _kernels_cy is not None else _kernels_py

BACKEND = "cython" if _impl is _kernels_cy else "python"

BACKENDS = {"python": _kernels_py}
if _kernels_cy is not None:
    BACKENDS["cython"] = _kernels_cy


def get_backend(name: str | None = None):
    """Kernel module by name; None selects the default."""
    if name is None:
        return _impl
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel backend {name!r}, available: {sorted(BACKENDS)}"
        ) from None
