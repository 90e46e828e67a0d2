"""Kernel backend selection.

The two hot numeric kernels (simplex pivoting, brute-force partition
enumeration) ship in a numba ``@njit`` build and a pure-numpy fallback.
The environment variable ``SETINFO_BACKEND`` picks one:

    numba   require the compiled kernels (error if numba is missing)
    numpy   force the pure-numpy path
    auto    numba when importable, numpy otherwise (default)

``set_backend`` overrides the choice at runtime, mainly for tests and for
the benchmark script.
"""

from __future__ import annotations

import os

ENV_VAR = "SETINFO_BACKEND"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on numba-less installs
    HAVE_NUMBA = False

_active: str | None = None


def _resolve(name: str) -> str:
    name = name.strip().lower()
    if name == "numpy":
        return "numpy"
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError(f"{ENV_VAR}=numba but numba is not importable")
        return "numba"
    if name == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    raise ValueError(f"unknown backend {name!r}: expected numba, numpy, or auto")


def active_backend() -> str:
    global _active
    if _active is None:
        _active = _resolve(os.environ.get(ENV_VAR, "auto"))
    return _active


def set_backend(name: str) -> str:
    """Force a backend; returns the previously active one."""
    global _active
    old = active_backend()
    _active = _resolve(name)
    return old
