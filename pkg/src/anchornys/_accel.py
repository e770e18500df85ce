"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting the environment
variable ``ANCHORNYS_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os
from types import SimpleNamespace

from . import _core_py

try:
    from . import _core as _core_c
except ImportError:  # extension not built
    _core_c = None

_BACKENDS = {"python": _core_py}
if _core_c is not None:
    _BACKENDS["compiled"] = _core_c


def available():
    return sorted(_BACKENDS)


def get_backend(name):
    """Return the kernel namespace for ``name`` ('compiled' or 'python')."""
    try:
        mod = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {available()}") from None
    return SimpleNamespace(name=name, linf_argmin=mod.linf_argmin,
                           sqdist=mod.sqdist, inner=mod.inner)


if os.environ.get("ANCHORNYS_PURE_PYTHON", "") not in ("", "0") or _core_c is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"

_active = get_backend(BACKEND)
linf_argmin = _active.linf_argmin
sqdist = _active.sqdist
inner = _active.inner
