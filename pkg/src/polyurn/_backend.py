"""Kernel backend selection.

The compiled extension is used when importable; ``POLYURN_BACKEND=python``
forces the numpy fallback.  Both expose ``words``, ``below_many``,
``draw_path`` and ``batch_counts`` with identical outputs.
"""

import os

from . import _fallback

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

_BACKENDS = {"python": _fallback}
if _core is not None:
    _BACKENDS["compiled"] = _core


def available():
    return sorted(_BACKENDS)


def get(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return kernels
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {available()}") from None


def _select():
    wanted = os.environ.get("POLYURN_BACKEND", "").strip().lower()
    if wanted:
        return get(wanted)
    return _core if _core is not None else _fallback


kernels = _select()
