"""Backend selection: compiled Cython core with a NumPy fallback.

The compiled module is optional; import falls back silently.  Both
backends consume identical pre-drawn normal arrays, so estimates agree to
floating-point accumulation order (~1e-13 relative).  ``SOLVHEAT_BACKEND``
forces the choice: ``compiled`` or ``python``.
"""

from __future__ import annotations

import os

from . import _mc_core_py

try:  # pragma: no cover - environment dependent
    from . import _mc_core

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover
    _mc_core = None
    HAVE_COMPILED = False


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if HAVE_COMPILED else ("python",)


def get_backend(name: str | None = None):
    """Resolve a backend module by name, env var, or auto preference."""
    if name is None:
        name = os.environ.get("SOLVHEAT_BACKEND", "auto")
    name = name.lower()
    if name in ("auto", ""):
        return _mc_core if HAVE_COMPILED else _mc_core_py
    if name in ("compiled", "cython", "cy"):
        if not HAVE_COMPILED:
            raise RuntimeError("compiled backend requested but solvheat._mc_core is not built")
        return _mc_core
    if name in ("python", "py", "numpy"):
        return _mc_core_py
    raise ValueError(f"unknown backend {name!r}")


def backend_name(module) -> str:
    return getattr(module, "BACKEND_NAME", "unknown")
