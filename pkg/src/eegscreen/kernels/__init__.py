"""Hot inner loops, compiled with numba when available.

Set ``EEGSCREEN_BACKEND=numpy`` to force the pure-numpy path (useful for
debugging and for platforms without numba). ``get_backend`` returns either
implementation explicitly, which the equivalence tests and the benchmark use.
"""
import os

from . import _numpy

_REQUESTED = os.environ.get("EEGSCREEN_BACKEND", "numba").strip().lower()


def get_backend(name):
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _numba

        return _numba
    raise ValueError(f"unknown kernel backend {name!r} (expected 'numba' or 'numpy')")


if _REQUESTED not in ("numba", "numpy"):
    raise ImportError(f"EEGSCREEN_BACKEND must be 'numba' or 'numpy', got {_REQUESTED!r}")

try:
    _impl = get_backend(_REQUESTED)
except ImportError:
    _impl = _numpy

BACKEND = "numba" if _impl is not _numpy else "numpy"

pair_counts = _impl.pair_counts
lorenz_rk4 = _impl.lorenz_rk4
kalman_random_walk = _impl.kalman_random_walk
kalman_smooth = _impl.kalman_smooth
smo_solve = _impl.smo_solve

__all__ = ["BACKEND", "get_backend", "pair_counts", "lorenz_rk4", "kalman_random_walk", "kalman_smooth", "smo_solve"]
