"""Singular deterministic volatility and rebalancing time nets.

The volatility family is eta(t) = sqrt(beta) * T^(-beta/2) * (T-t)^((beta-1)/2)
on [0, T): it blows up at t = T like (T-t)^(-alpha) with alpha = (1-beta)/2,
yet integrates to a unit L2 norm.  All consumers work through the closed-form
interval integrals, which are finite up to and including the endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SingularVolatility:
    """Parameters (beta, T) of the power-type volatility.

    beta = 1 is the regular boundary case (constant volatility); smaller beta
    means a stronger endpoint singularity.
    """

    beta: float
    horizon: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.beta <= 1.0):
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")
        if not (self.horizon > 0.0 and math.isfinite(self.horizon)):
            raise ValueError(f"horizon must be positive and finite, got {self.horizon}")

    @property
    def alpha(self) -> float:
        """Endpoint singularity exponent (1 - beta) / 2."""
        return (1.0 - self.beta) / 2.0

    def eta(self, t: float) -> float:
        """Pointwise volatility; defined on [0, T) only."""
        T = self.horizon
        if not (0.0 <= t < T):
            raise ValueError(f"t must be in [0, T={T}), got {t}")
        b = self.beta
        return math.sqrt(b) * T ** (-b / 2.0) * (T - t) ** ((b - 1.0) / 2.0)

    def cumvar(self, a: float, b: float) -> float:
        """Integral of eta^2 over [a, b] in closed form."""
        self._check_interval(a, b)
        T = self.horizon
        return (1.0 - a / T) ** self.beta - (1.0 - b / T) ** self.beta

    def eta_integral(self, a: float, b: float) -> float:
        """Integral of eta over [a, b]; finite including b = T."""
        self._check_interval(a, b)
        T, bb = self.horizon, self.beta
        p = (bb + 1.0) / 2.0
        pref = math.sqrt(bb) * T ** (-bb / 2.0) * 2.0 / (bb + 1.0)
        return pref * ((T - a) ** p - (T - b) ** p)

    def _check_interval(self, a: float, b: float) -> None:
        if not (0.0 <= a <= b <= self.horizon):
            raise ValueError(
                f"need 0 <= a <= b <= T={self.horizon}, got a={a}, b={b}"
            )


@dataclass(frozen=True)
class TimeNet:
    """Strictly increasing rebalancing grid t_0 = 0 < ... < t_n = T."""

    times: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", t)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("a time net needs at least two points")
        if t[0] != 0.0:
            raise ValueError("net must start at exactly 0")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("net times must be strictly increasing")

    @property
    def n(self) -> int:
        return self.times.size - 1

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def mesh(self) -> float:
        return float(np.max(np.diff(self.times)))


def equidistant_net(n: int, horizon: float = 1.0) -> TimeNet:
    """The net t_i = (i/n) T with exact endpoints."""
    if n < 1:
        raise ValueError(f"need at least one interval, got n={n}")
    t = np.arange(n + 1, dtype=float) * (horizon / n)
    t[-1] = horizon
    return TimeNet(t)


def transformed_net_mesh_stat(net: TimeNet, model: SingularVolatility, theta: float) -> float:
    """Mesh statistic of the net mapped through u = 1 - (1-t)^beta.

    Returns sup_i (u_i - u_{i-1}) / (1 - u_{i-1})^(1-theta).  Diagnostic for
    the normalized horizon only: both the net and the model must have T = 1.
    """
    if not (0.0 < theta < 1.0 or theta == 1.0):
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    if abs(net.horizon - 1.0) > 1e-12 or abs(model.horizon - 1.0) > 1e-12:
        raise ValueError("mesh statistic is defined for T = 1; rescale first")
    u = 1.0 - (1.0 - net.times) ** model.beta
    num = np.diff(u)
    den = (1.0 - u[:-1]) ** (1.0 - theta)
    return float(np.max(num / den))
