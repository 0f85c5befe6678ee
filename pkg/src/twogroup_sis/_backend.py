"""Select the integration kernel at import time.

The compiled extension is preferred; the pure-Python mirror is used when
the extension is unavailable or when TWOGROUP_SIS_PURE_PYTHON=1 is set.
Both expose the same ``integrate_core`` contract (see ``_reference``).
"""

from __future__ import annotations

import os

from . import _reference

if os.environ.get("TWOGROUP_SIS_PURE_PYTHON", "") == "1":
    _impl = _reference
    _name = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
        _name = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _reference
        _name = "python"

integrate_core = _impl.integrate_core


def backend_name() -> str:
    """Which kernel is active: 'cython' or 'python'."""
    return _name


def get_kernel(name: str):
    """Fetch a specific kernel implementation (benchmarks, cross-checks)."""
    if name == "python":
        return _reference
    if name == "cython":
        from . import _speedups
        return _speedups
    raise ValueError(f"unknown backend {name!r}")
