"""Numba-compiled versions of the hot series kernels.

Same contracts and operation order as _kernels_numpy.  The loops run
coefficient-outer and path-inner, so the recurrence's serial dependency sits
across registers of independent paths and the inner loops vectorize; dw and y
arrive transposed to (intervals, paths) for unit-stride access.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _root_tables(n):
    sq = np.empty(n)
    isq = np.zeros(n)
    for k in range(n):
        sq[k] = math.sqrt(k)
        if k > 0:
            isq[k] = 1.0 / sq[k]
    return sq, isq


@njit(cache=True, nogil=True)
def _series_sweep(coeffs, sigma2, x, qm, q, out, sq, isq):
    n = x.shape[0]
    for j in range(n):
        out[j] = coeffs[0]
    if coeffs.size == 1:
        return
    for j in range(n):
        qm[j] = 1.0
        q[j] = x[j]
        out[j] += coeffs[1] * x[j]
    for k in range(1, coeffs.size - 1):
        a = sq[k] * sigma2
        b = isq[k + 1]
        c = coeffs[k + 1]
        for j in range(n):
            qn = (x[j] * q[j] - a * qm[j]) * b
            qm[j] = q[j]
            q[j] = qn
            out[j] += c * qn


@njit(cache=True, nogil=True)
def chaos_series_eval(coeffs, sigma2, x):
    sq, isq = _root_tables(coeffs.size)
    n = x.shape[0]
    out = np.empty(n)
    qm = np.empty(n)
    q = np.empty(n)
    _series_sweep(coeffs, sigma2, x, qm, q, out, sq, isq)
    return out


@njit(cache=True, nogil=True)
def hedge_errors_chunk(dvec, c0, f_terminal, dw, y, sig2_left, nu_scale):
    # dw, y: (intervals, paths)
    sq, isq = _root_tables(dvec.size)
    n_int, n_paths = dw.shape
    err = np.empty(n_paths)
    x = np.zeros(n_paths)
    qm = np.empty(n_paths)
    q = np.empty(n_paths)
    pf = np.empty(n_paths)
    for j in range(n_paths):
        err[j] = f_terminal[j] - c0
    for i in range(n_int):
        _series_sweep(dvec, sig2_left[i], x, qm, q, pf, sq, isq)
        nsc = nu_scale[i]
        for j in range(n_paths):
            err[j] = err[j] - (pf[j] * nsc) * dw[i, j]
            x[j] = x[j] + y[i, j]
    return err
