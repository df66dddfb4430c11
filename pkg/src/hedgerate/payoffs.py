"""Payoff specifications and their Hermite chaos coefficients.

A square-integrable payoff g has the orthonormal expansion
g = sum_n c_n H_n / sqrt(n!) under the standard Gaussian measure.  Indicator,
call and Hermite payoffs use closed-form coefficients; polynomials are
converted exactly; tabulated payoffs fall back to Gaussian-weight quadrature.
The module also evaluates the two fractional-smoothness criteria built from
the coefficient sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import hermite_e as _herme
from scipy.stats import norm

from .hermite import hermite_eval, normalized_hermite_column

PARSEVAL_TOL = 1e-8

KINDS = ("indicator", "call", "pure_hermite", "polynomial", "tabulated")


class QuadratureError(RuntimeError):
    """Quadrature failed to reach the requested coefficient tolerance."""

    def __init__(self, message: str, achieved_residual: float):
        super().__init__(f"{message} (achieved residual {achieved_residual:.3e})")
        self.achieved_residual = achieved_residual


@dataclass(frozen=True)
class QuadratureSettings:
    """Composite Gauss-Legendre settings for the Gaussian-weight integrals.

    The support is [-R, R] with R = 8, leaving Gaussian mass < 1e-14 outside;
    panels are doubled until successive coefficient estimates move by less
    than coeff_tol.
    """

    support_radius: float = 8.0
    panel_order: int = 16
    initial_panels: int = 16
    max_refinements: int = 8
    coeff_tol: float = 1e-10


@dataclass(frozen=True)
class PayoffSpec:
    """One payoff g: a kind tag plus its parameters."""

    kind: str
    strike: float = 0.0
    degree: int = 0
    coefficients: tuple = ()
    grid: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown payoff kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("indicator", "call") and not math.isfinite(self.strike):
            raise ValueError("strike must be finite")
        if self.kind == "pure_hermite" and self.degree < 0:
            raise ValueError("hermite degree must be >= 0")
        if self.kind == "polynomial" and len(self.coefficients) == 0:
            raise ValueError("polynomial payoff needs at least one coefficient")
        if self.kind == "tabulated":
            g = np.asarray(self.grid, dtype=float)
            if g.size < 2 or np.any(np.diff(g) <= 0):
                raise ValueError("tabulated grid must be strictly increasing with >= 2 points")
            if len(self.values) != g.size:
                raise ValueError("tabulated grid and values must have equal length")

    @classmethod
    def indicator(cls, strike: float) -> "PayoffSpec":
        """g(x) = 1{x >= K} (digital payoff)."""
        return cls(kind="indicator", strike=float(strike))

    @classmethod
    def call(cls, strike: float) -> "PayoffSpec":
        """g(x) = max(x - K, 0)."""
        return cls(kind="call", strike=float(strike))

    @classmethod
    def pure_hermite(cls, degree: int) -> "PayoffSpec":
        """g = H_m / sqrt(m!), the unit payoff of a single chaos order."""
        return cls(kind="pure_hermite", degree=int(degree))

    @classmethod
    def polynomial(cls, coefficients) -> "PayoffSpec":
        """g(x) = sum_k a_k x^k with the given monomial coefficients."""
        return cls(kind="polynomial", coefficients=tuple(float(a) for a in coefficients))

    @classmethod
    def tabulated(cls, grid, values) -> "PayoffSpec":
        """g given by linear interpolation of (grid, values)."""
        return cls(
            kind="tabulated",
            grid=tuple(float(x) for x in grid),
            values=tuple(float(y) for y in values),
        )

    def evaluate(self, x):
        """Evaluate g pointwise (vectorized)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "indicator":
            out = (x >= self.strike).astype(float)
        elif self.kind == "call":
            out = np.maximum(x - self.strike, 0.0)
        elif self.kind == "pure_hermite":
            out = normalized_hermite_column(self.degree, x)[self.degree]
        elif self.kind == "polynomial":
            out = np.polynomial.polynomial.polyval(x, np.asarray(self.coefficients))
        else:
            g = np.asarray(self.grid)
            if np.any(x < g[0]) or np.any(x > g[-1]):
                raise ValueError("evaluation point outside the tabulated grid")
            out = np.interp(x, g, np.asarray(self.values))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class ChaosCoefficients:
    """Truncated orthonormal chaos coefficients c_0..c_N of a payoff.

    l2_norm_sq_estimate holds (an estimate of) the squared L2(gamma) norm of
    the full payoff, so the Parseval residual quantifies what the truncation
    dropped.  payoff, when present, is the direct evaluator of g.
    """

    coeffs: np.ndarray = field(repr=False)
    truncation_order: int
    l2_norm_sq_estimate: float
    payoff: Optional[PayoffSpec] = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        object.__setattr__(self, "coeffs", c)
        if c.ndim != 1 or c.size != self.truncation_order + 1:
            raise ValueError("coeffs must be a vector of length truncation_order + 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("chaos coefficients must be finite")
        ss = float(np.sum(c * c))
        if ss > self.l2_norm_sq_estimate * (1.0 + PARSEVAL_TOL) + PARSEVAL_TOL:
            raise ValueError(
                f"Parseval violated: sum c_n^2 = {ss} exceeds ||g||^2 = {self.l2_norm_sq_estimate}"
            )

    @classmethod
    def from_dict(cls, entries: dict, truncation_order: int, l2_norm_sq_estimate=None):
        """Build from sparse {order: coefficient} entries (test convenience)."""
        c = np.zeros(truncation_order + 1)
        for n, v in entries.items():
            c[n] = v
        if l2_norm_sq_estimate is None:
            l2_norm_sq_estimate = float(np.sum(c * c))
        return cls(c, truncation_order, l2_norm_sq_estimate)

    @property
    def parseval_residual(self) -> float:
        """||g||^2 minus the retained coefficient mass (>= 0 up to tolerance)."""
        return float(self.l2_norm_sq_estimate - np.sum(self.coeffs**2))

    def truncate(self, order: int) -> "ChaosCoefficients":
        if order > self.truncation_order:
            raise ValueError("cannot extend a coefficient vector by truncation")
        return ChaosCoefficients(
            self.coeffs[: order + 1], order, self.l2_norm_sq_estimate, self.payoff
        )


def _closed_form_l2_norm_sq(payoff: PayoffSpec) -> float:
    K = payoff.strike
    if payoff.kind == "indicator":
        return float(norm.sf(K))
    if payoff.kind == "call":
        return float((1.0 + K * K) * norm.sf(K) - K * norm.pdf(K))
    raise AssertionError(payoff.kind)


def _indicator_coeffs(K: float, N: int) -> np.ndarray:
    # c_0 = 1 - Phi(K); c_n = phi(K) H_{n-1}(K) / sqrt(n!) for n >= 1
    c = np.zeros(N + 1)
    c[0] = norm.sf(K)
    phiK = norm.pdf(K)
    for n in range(1, N + 1):
        c[n] = phiK * hermite_eval(n - 1, K) * math.exp(-0.5 * math.lgamma(n + 1))
    return c


def _call_coeffs(K: float, N: int) -> np.ndarray:
    # c_0 = phi(K) - K(1 - Phi(K)); c_1 = 1 - Phi(K);
    # c_n = phi(K) H_{n-2}(K) / sqrt(n!) for n >= 2
    c = np.zeros(N + 1)
    c[0] = norm.pdf(K) - K * norm.sf(K)
    if N >= 1:
        c[1] = norm.sf(K)
    phiK = norm.pdf(K)
    for n in range(2, N + 1):
        c[n] = phiK * hermite_eval(n - 2, K) * math.exp(-0.5 * math.lgamma(n + 1))
    return c


def _polynomial_coeffs(payoff: PayoffSpec, N: int) -> tuple[np.ndarray, float]:
    # exact basis change: g = sum b_n He_n  =>  c_n = b_n sqrt(n!)
    b = _herme.poly2herme(np.asarray(payoff.coefficients, dtype=float))
    full = b * np.exp([0.5 * math.lgamma(n + 1) for n in range(b.size)])
    l2 = float(np.sum(full * full))
    c = np.zeros(N + 1)
    keep = min(N + 1, full.size)
    c[:keep] = full[:keep]
    return c, l2


def gaussian_quadrature_nodes(settings: QuadratureSettings, n_panels: int):
    """Composite Gauss-Legendre nodes/weights on [-R, R], weights folding in phi."""
    R = settings.support_radius
    xg, wg = np.polynomial.legendre.leggauss(settings.panel_order)
    edges = np.linspace(-R, R, n_panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel() * norm.pdf(nodes)
    return nodes, weights


def _quadrature_coeffs(
    g: Callable[[np.ndarray], np.ndarray], N: int, settings: QuadratureSettings
) -> tuple[np.ndarray, float]:
    prev = None
    achieved = math.inf
    n_panels = settings.initial_panels
    for _ in range(settings.max_refinements + 1):
        nodes, weights = gaussian_quadrature_nodes(settings, n_panels)
        gv = g(nodes)
        h = normalized_hermite_column(N, nodes)
        c = h @ (weights * gv)
        l2 = float(np.sum(weights * gv * gv))
        if prev is not None:
            achieved = float(np.max(np.abs(c - prev)))
            if achieved < settings.coeff_tol:
                return c, l2
        prev = c
        n_panels *= 2
    raise QuadratureError("coefficient quadrature did not converge", achieved)


def chaos_coefficients(
    payoff: PayoffSpec, truncation_order: int = 64, quad: QuadratureSettings | None = None
) -> ChaosCoefficients:
    """Chaos coefficients c_0..c_N of the payoff.

    Indicator, call, pure-Hermite and polynomial payoffs use exact
    constructors and ignore the quadrature settings; tabulated payoffs are
    integrated against the Gaussian weight.
    """
    N = int(truncation_order)
    if N < 0:
        raise ValueError("truncation order must be >= 0")
    if payoff.kind == "indicator":
        c, l2 = _indicator_coeffs(payoff.strike, N), _closed_form_l2_norm_sq(payoff)
    elif payoff.kind == "call":
        c, l2 = _call_coeffs(payoff.strike, N), _closed_form_l2_norm_sq(payoff)
    elif payoff.kind == "pure_hermite":
        if payoff.degree > N:
            raise ValueError(
                f"pure Hermite degree {payoff.degree} exceeds truncation order {N}"
            )
        c = np.zeros(N + 1)
        c[payoff.degree] = 1.0
        l2 = 1.0
    elif payoff.kind == "polynomial":
        c, l2 = _polynomial_coeffs(payoff, N)
    else:
        settings = quad or QuadratureSettings()
        R = settings.support_radius
        g = np.asarray(payoff.grid)
        if g[0] > -R or g[-1] < R:
            raise ValueError(
                f"tabulated grid [{g[0]}, {g[-1]}] does not cover the "
                f"quadrature support [-{R}, {R}]"
            )
        c, l2 = _quadrature_coeffs(payoff.evaluate, N, settings)
    return ChaosCoefficients(c, N, l2, payoff)


def besov_sum_criterion(c: ChaosCoefficients, theta: float) -> float:
    """Partial sum of c_n^2 n^theta over n >= 1 (the summability criterion).

    The dropped tail is controlled only through the Parseval residual, which
    the caller should report alongside (n^theta is unbounded, so no finite
    multiple of the residual bounds the tail).
    """
    _check_theta(theta)
    n = np.arange(1, c.coeffs.size, dtype=float)
    return float(np.sum(c.coeffs[1:] ** 2 * n**theta))


def besov_integral_criterion(c: ChaosCoefficients, theta: float) -> float:
    """Partial sum of n! c_n^2 / ((2-theta)(3-theta)...(n-theta)) over n >= 2.

    The n!/product ratio is accumulated in log space so large orders stay in
    floating range.
    """
    _check_theta(theta)
    total = 0.0
    for n in range(2, c.coeffs.size):
        cn = c.coeffs[n]
        if cn == 0.0:
            continue
        log_ratio = (
            math.lgamma(n + 1) + math.lgamma(2.0 - theta) - math.lgamma(n + 1.0 - theta)
        )
        total += cn * cn * math.exp(log_ratio)
    return total


def besov_tail_index(c: ChaosCoefficients, min_tail_points: int = 10) -> float:
    """Critical theta below which sum c_n^2 n^theta converges, from the tail decay.

    Fits log c_n^2 ~ slope * log n on the nonzero upper half of the sequence
    and returns -(1 + slope).  Finite chaos (exact trailing zeros) returns
    +inf, the super-polynomial flag.
    """
    sq = c.coeffs**2
    nonzero = np.nonzero(sq[1:])[0] + 1
    if nonzero.size == 0:
        return math.inf
    if nonzero[-1] <= c.truncation_order // 2:
        # the sequence terminates well before the truncation order
        return math.inf
    tail = nonzero[nonzero >= max(2, c.truncation_order // 2)]
    if tail.size < min_tail_points:
        raise ValueError(
            f"need at least {min_tail_points} nonzero tail coefficients, got {tail.size}"
        )
    x = np.log(tail.astype(float))
    y = np.log(sq[tail])
    slope = np.polyfit(x, y, 1)[0]
    return float(-(1.0 + slope))


def _check_theta(theta: float) -> None:
    if not (0.0 < theta < 1.0):
        raise ValueError(f"theta must be in (0, 1), got {theta}")
