"""Kernel backend selection: numba-compiled loops or the pure-numpy fallback.

The environment variable HEDGERATE_BACKEND picks the implementation:

    HEDGERATE_BACKEND=numba   force the compiled kernels (error if unavailable)
    HEDGERATE_BACKEND=numpy   force the pure-numpy fallback
    unset                     numba when importable, numpy otherwise

Both backends implement identical contracts; `use()` switches at runtime
(used by the tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_numpy

_ENV_VAR = "HEDGERATE_BACKEND"
_impl = None
_name = None


def _load(name: str):
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        from . import _kernels_numba

        return _kernels_numba
    raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")


def use(name: str) -> None:
    """Select the kernel backend by name."""
    global _impl, _name
    _impl = _load(name)
    _name = name


def active_backend() -> str:
    """Name of the backend currently in use."""
    return _name


def _init_from_env() -> None:
    requested = os.environ.get(_ENV_VAR, "").strip().lower()
    if requested:
        use(requested)
        return
    try:
        use("numba")
    except ImportError:
        use("numpy")


def chaos_series_eval(coeffs, sigma2, x):
    return _impl.chaos_series_eval(coeffs, sigma2, x)


def hedge_errors_chunk(dvec, c0, f_terminal, dw, y, sig2_left, nu_scale):
    return _impl.hedge_errors_chunk(dvec, c0, f_terminal, dw, y, sig2_left, nu_scale)


_init_from_env()
