"""Probabilists' Hermite polynomials and their normalized variants.

H_0 = 1, H_1 = x, H_{n+1} = x H_n - n H_{n-1}.  The normalized family
h_n = H_n / sqrt(n!) is orthonormal for the standard Gaussian measure and is
evaluated by the scaled recurrence

    h_{n+1} = (x h_n - sqrt(n) h_{n-1}) / sqrt(n+1),

which stays in floating range for large n.
"""

from __future__ import annotations

import math

import numpy as np


def hermite_eval(n: int, x: float) -> float:
    """Evaluate the probabilists' Hermite polynomial H_n at x."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    if n == 0:
        return 1.0
    hm, h = 1.0, float(x)
    for k in range(1, n):
        hm, h = h, x * h - k * hm
    return h


def normalized_hermite_eval(n: int, x: float) -> float:
    """Evaluate h_n(x) = H_n(x) / sqrt(n!) by the scaled recurrence."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    if n == 0:
        return 1.0
    hm, h = 1.0, float(x)  # h_0, h_1
    for k in range(1, n):
        hm, h = h, (x * h - math.sqrt(k) * hm) / math.sqrt(k + 1)
    return h


def normalized_hermite_column(n_max: int, x) -> np.ndarray:
    """Stack h_0(x) .. h_{n_max}(x) along the first axis for array x."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x
    for k in range(1, n_max):
        out[k + 1] = (x * out[k] - math.sqrt(k) * out[k - 1]) / math.sqrt(k + 1)
    return out
