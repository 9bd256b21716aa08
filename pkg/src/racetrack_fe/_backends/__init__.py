"""Time-stepping backends: a jit-compiled kernel with a pure-numpy twin.

Selection order: an explicit name passed by the caller, then the
RACETRACK_FE_BACKEND environment variable (auto, numba, numpy), then
automatic fallback from numba to numpy when numba is unavailable.
"""

import os

from . import _numpy

BACKEND_ENV = "RACETRACK_FE_BACKEND"

STATUS_RAN = 0
STATUS_STATIONARY = 1
STATUS_NEGATIVE = 2
STATUS_WAGE_FAIL = 3


def select_backend(name: str | None = None):
    """Resolve a stepping backend module by name or environment variable."""
    if name is None:
        name = os.environ.get(BACKEND_ENV, "auto")
    name = name.strip().lower() or "auto"
    if name == "auto":
        try:
            from . import _numba
            return _numba
        except ImportError:
            return _numpy
    if name == "numpy":
        return _numpy
    if name == "numba":
        # explicit request: let the ImportError surface
        from . import _numba
        return _numba
    raise ValueError(f"unknown backend {name!r}; expected auto, numba, or numpy")


def available_backends() -> tuple:
    names = ["numpy"]
    try:
        from . import _numba  # noqa: F401
        names.append("numba")
    except ImportError:
        pass
    return tuple(names)
