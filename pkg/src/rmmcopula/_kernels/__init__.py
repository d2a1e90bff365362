"""Kernel backend selection.

The compiled Cython module is used when it imports; otherwise (or when the
environment variable ``RMMCOPULA_PURE_PYTHON`` is set to a non-empty value other
than ``0``) the numpy fallback is used. Both expose the same four functions:
``eval_gen``, ``deriv_gen``, ``boundary_v0`` and ``sample_conditional``.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_FORCE_PURE = os.environ.get("RMMCOPULA_PURE_PYTHON", "") not in ("", "0")


def available_backends() -> list[str]:
    names = ["python"]
    if _ckernels is not None:
        names.insert(0, "compiled")
    return names


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module called ``name`` ("compiled" or "python")."""
    if name is None:
        name = BACKEND
    if name == "python":
        return _fallback
    if name == "compiled":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built; "
                              "run `pip install -e . --no-build-isolation`")
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


BACKEND = "python" if (_FORCE_PURE or _ckernels is None) else "compiled"
_active = get_backend(BACKEND)

eval_gen = _active.eval_gen
deriv_gen = _active.deriv_gen
boundary_v0 = _active.boundary_v0
sample_conditional = _active.sample_conditional

__all__ = ["BACKEND", "available_backends", "get_backend", "eval_gen", "deriv_gen",
           "boundary_v0", "sample_conditional"]
