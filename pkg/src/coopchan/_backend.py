"""Kernel selection: compiled coordinate-descent extension when available,
pure-NumPy fallback otherwise. Override with COOPCHAN_BACKEND=python|cython."""

import os

from . import _cd_py

_FORCED = os.environ.get("COOPCHAN_BACKEND")

if _FORCED == "python":
    cd_weighted_lasso = _cd_py.cd_weighted_lasso
    BACKEND = "python"
else:
    try:
        from ._cd_cy import cd_weighted_lasso

        BACKEND = "cython"
    except ImportError:
        if _FORCED == "cython":
            raise
        cd_weighted_lasso = _cd_py.cd_weighted_lasso
        BACKEND = "python"


def get_kernel(name: str):
    """Fetch a specific kernel by name ('python' or 'cython'); used by the benchmark."""
    if name == "python":
        return _cd_py.cd_weighted_lasso
    if name == "cython":
        from ._cd_cy import cd_weighted_lasso as k

        return k
    raise ValueError(f"unknown backend {name!r}")
