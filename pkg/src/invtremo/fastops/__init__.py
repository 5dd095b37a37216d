"""Backend dispatch for the numeric hot kernels.

Two interchangeable implementations exist: numba-compiled loops
(:mod:`._numba`) and pure numpy (:mod:`._numpy`). Selection order:

* ``INVTREMO_BACKEND=numpy`` forces the numpy path,
* ``INVTREMO_BACKEND=numba`` requires numba and fails loudly if missing,
* unset: numba when importable, numpy otherwise.

``benchmarks/bench_fastops.py`` compares the two paths.
"""

import os

from . import _numpy as _np_impl

_ENV_VAR = "INVTREMO_BACKEND"
_requested = os.environ.get(_ENV_VAR, "").strip().lower()

if _requested not in ("", "numpy", "numba"):
    raise RuntimeError(
        f"{_ENV_VAR} must be 'numpy' or 'numba', got {_requested!r}"
    )

if _requested == "numpy":
    _impl = _np_impl
else:
    try:
        from . import _numba as _nb_impl

        _impl = _nb_impl
    except ImportError:
        if _requested == "numba":
            raise
        _impl = _np_impl

BACKEND = "numba" if _impl is not _np_impl else "numpy"

rbf_cross = _impl.rbf_cross
rbf_gram = _impl.rbf_gram
nondominated_mask = _impl.nondominated_mask
min_dist_mean = _impl.min_dist_mean
front_ranks = _impl.front_ranks

__all__ = [
    "BACKEND",
    "rbf_cross",
    "rbf_gram",
    "nondominated_mask",
    "min_dist_mean",
    "front_ranks",
]
