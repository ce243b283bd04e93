"""Hot reconstruction kernels with a compiled core and a numpy fallback.

The compiled extension is used when it was built; otherwise (or when
``SLCWENO_BACKEND=python`` is set) the numpy implementation is loaded.
Both expose the same functions and follow the same operation order.
"""

from __future__ import annotations

import importlib
import os
from types import ModuleType

from . import _pykernels
from ._layout import HORNER_2D

__all__ = ["BACKEND", "get_backend", "available_backends"]


def _load_compiled() -> ModuleType | None:
    try:
        mod = importlib.import_module("slcweno._kernels._ckernels")
    except ImportError:
        return None
    mod._set_horner(HORNER_2D)
    return mod


_compiled = _load_compiled()


def available_backends() -> list[str]:
    return ["compiled", "python"] if _compiled is not None else ["python"]


def get_backend(name: str | None = None) -> ModuleType:
    """Kernel module by name; ``None`` picks the default."""
    if name is None:
        name = BACKEND
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    if name == "python":
        return _pykernels
    raise ValueError(f"unknown kernel backend {name!r}")


_requested = os.environ.get("SLCWENO_BACKEND", "").strip().lower()
if _requested == "python" or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"
