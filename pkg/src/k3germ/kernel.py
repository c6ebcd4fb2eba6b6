"""Backend selection for the sparse series kernels.

The compiled extension is used when it was built; otherwise the pure-Python
kernels are used.  ``K3GERM_KERNEL=python`` forces the fallback at import,
and :func:`set_backend` switches at runtime (the benchmark uses this).
"""

import os

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

_BACKENDS = {"python": _pykernel}
if _ckernel is not None:
    _BACKENDS["compiled"] = _ckernel

mul = _pykernel.mul
axpy = _pykernel.axpy
BACKEND = "python"


def available_backends():
    return sorted(_BACKENDS)


def set_backend(name: str) -> None:
    global mul, axpy, BACKEND
    try:
        mod = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable kernel backend {name!r}; have {available_backends()}") from None
    mul = mod.mul
    axpy = mod.axpy
    BACKEND = name


_requested = os.environ.get("K3GERM_KERNEL", "").strip().lower()
if _requested:
    set_backend(_requested)
elif _ckernel is not None:
    set_backend("compiled")
