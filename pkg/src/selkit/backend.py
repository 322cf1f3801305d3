"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the NumPy
fallback is used.  ``SELKIT_BACKEND=python`` forces the fallback and
``SELKIT_BACKEND=native`` makes a missing extension a hard error instead of
a silent downgrade.  Code should access the active backend through
``backend.kernels`` (late-bound attribute lookups keep it swappable in
tests).
"""

from __future__ import annotations

import os

from . import _kernels_py


def _load_native():
    from . import _kernels  # noqa: PLC0415 (optional import)

    return _kernels


def available_backends() -> dict:
    """Importable kernel implementations, keyed by name."""
    found = {"python": _kernels_py}
    try:
        found["native"] = _load_native()
    except ImportError:
        pass
    return found


def _select():
    forced = os.environ.get("SELKIT_BACKEND", "").strip().lower()
    if forced == "python":
        return _kernels_py
    if forced == "native":
        return _load_native()
    if forced:
        raise ValueError(f"SELKIT_BACKEND must be 'native' or 'python', not {forced!r}")
    try:
        return _load_native()
    except ImportError:
        return _kernels_py


kernels = _select()


def backend_name() -> str:
    """Name of the kernel backend in use ('native' or 'python')."""
    return kernels.NAME
