"""Kernel backend selection.

The compiled extension is preferred when present; the numpy implementation
is the fallback and the reference.  RICCATI_LAB_BACKEND forces the choice:
"compiled" (error if unavailable), "python", or "auto" (the default).
"""

import os

from . import _python

_requested = os.environ.get("RICCATI_LAB_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "compiled", "python"):
    raise RuntimeError(
        f"RICCATI_LAB_BACKEND must be auto, compiled or python, got {_requested!r}"
    )

_impl = None
if _requested in ("auto", "compiled"):
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise RuntimeError(
                "RICCATI_LAB_BACKEND=compiled but the extension is not built"
            )
        _impl = None
if _impl is None:
    _impl = _python

BACKEND_NAME = "python" if _impl is _python else "compiled"

riccati_step = _impl.riccati_step
riccati_sweep = _impl.riccati_sweep
riccati_final = _impl.riccati_final
fixed_point = _impl.fixed_point
lyapunov_series = _impl.lyapunov_series


def get_backend() -> str:
    """Name of the backend in use, "compiled" or "python"."""
    return BACKEND_NAME


def available_backends() -> dict:
    """Importable backend modules keyed by name (for tests and benchmarks)."""
    out = {"python": _python}
    try:
        from . import _core  # type: ignore[attr-defined]
        out["compiled"] = _core
    except ImportError:
        pass
    return out


__all__ = [
    "riccati_step",
    "riccati_sweep",
    "riccati_final",
    "fixed_point",
    "lyapunov_series",
    "get_backend",
    "available_backends",
    "BACKEND_NAME",
]
