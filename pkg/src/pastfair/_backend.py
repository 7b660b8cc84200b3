"""Select the allocation-search kernel at import time.

Set ``PASTFAIR_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _search_py

try:
    from . import _search as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _search_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

if _compiled is not None and not os.environ.get("PASTFAIR_PURE_PYTHON"):
    NAME = "cython"
else:
    NAME = "python"
kernel = BACKENDS[NAME]


def get(name=None):
    if name is None:
        return kernel
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
