"""Pure-numpy reference implementations of the hot series kernels.

Always available; selected over the numba versions via HEDGERATE_BACKEND=numpy.
The recurrence q_0 = 1, q_1 = x, q_{k+1} = (x q_k - sqrt(k) s2 q_{k-1}) / sqrt(k+1)
evaluates q_k = sigma^k H_k(x/sigma) / sqrt(k!) without ever dividing by sigma,
so the sigma -> 0 limit needs no special casing.  Both backends apply the same
scalar factors in the same order, so they agree bit for bit.
"""

from __future__ import annotations

import numpy as np


def _root_tables(n: int):
    sq = np.sqrt(np.arange(n, dtype=np.float64))
    isq = np.zeros(n)
    isq[1:] = 1.0 / sq[1:]
    return sq, isq


def chaos_series_eval(coeffs: np.ndarray, sigma2: float, x: np.ndarray) -> np.ndarray:
    """sum_k coeffs[k] * q_k(x, sigma2), vectorized over x."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, coeffs[0], dtype=float)
    if coeffs.size == 1:
        return out
    sq, isq = _root_tables(coeffs.size)
    qm = np.ones_like(x)
    q = x.copy()
    out += coeffs[1] * q
    for k in range(1, coeffs.size - 1):
        qm, q = q, (x * q - (sq[k] * sigma2) * qm) * isq[k + 1]
        out += coeffs[k + 1] * q
    return out


def hedge_errors_chunk(
    dvec: np.ndarray,
    c0: float,
    f_terminal: np.ndarray,
    dw: np.ndarray,
    y: np.ndarray,
    sig2_left: np.ndarray,
    nu_scale: np.ndarray,
) -> np.ndarray:
    """Realized hedging errors for one chunk of paths.

    dw, y: (intervals, paths) increments; sig2_left[i] is the cumulative
    variance at the left endpoint of interval i; nu_scale[i] multiplies the
    projection factor to give the strategy value.
    """
    n_int = dw.shape[0]
    err = f_terminal - c0
    x = np.zeros(dw.shape[1])
    for i in range(n_int):
        pf = chaos_series_eval(dvec, float(sig2_left[i]), x)
        err = err - (pf * nu_scale[i]) * dw[i]
        x = x + y[i]
    return err
