"""Rate experiments: sweeps over the net size, slope fitting, smoothness report.

The fitted slope uses the analytic series errors (noise-free); the Monte Carlo
column is an independent check of that oracle, not the rate evidence.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .analytic import net_error_l2
from .model import SingularVolatility, equidistant_net
from .payoffs import ChaosCoefficients, besov_integral_criterion, besov_sum_criterion, besov_tail_index
from .simulate import mc_l2_error

DEFAULT_N_VALUES = (4, 8, 16, 32, 64, 128, 256)
THETA_CAP = 0.99
BOUNDARY_MARGIN = 0.05


class DegeneratePayoffError(ValueError):
    """The payoff produces an identically-zero hedging error; no rate to fit."""


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    ci: tuple[float, float]
    stderr: float


@dataclass(frozen=True)
class RateSweepResult:
    n_values: tuple[int, ...]
    analytic_errors: tuple[float, ...]
    mc_errors: tuple[float, ...]
    mc_std_errors: tuple[float, ...]
    fitted_slope: float
    fitted_intercept: float
    slope_ci: tuple[float, float]
    theoretical_slope: float
    theta_used: float
    config_digest: str

    def dominating_constant(self) -> float:
        """Smallest c with analytic_error <= c * n^(theoretical_slope) for all n."""
        return max(
            e * n ** (-self.theoretical_slope)
            for e, n in zip(self.analytic_errors, self.n_values)
        )


def fit_power_law(xs, ys) -> PowerLawFit:
    """Least squares of log(ys) on log(xs), with a 95% slope interval."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 3:
        raise ValueError("need at least 3 points to fit")
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("power-law fit needs strictly positive inputs")
    lx, ly = np.log(x), np.log(y)
    mx = lx.mean()
    sxx = float(np.sum((lx - mx) ** 2))
    slope = float(np.sum((lx - mx) * (ly - ly.mean())) / sxx)
    intercept = float(ly.mean() - slope * mx)
    resid = ly - (intercept + slope * lx)
    dof = x.size - 2
    sigma2 = float(np.sum(resid**2)) / dof
    stderr = math.sqrt(sigma2 / sxx)
    t = float(stats.t.ppf(0.975, dof))
    return PowerLawFit(
        slope=slope,
        intercept=intercept,
        ci=(slope - t * stderr, slope + t * stderr),
        stderr=stderr,
    )


def select_theta(c: ChaosCoefficients) -> float:
    """Smoothness parameter for the rate comparison.

    Finite chaos lies in every smoothness class, so theta is capped just below
    one; payoffs with a polynomial coefficient tail sit at the boundary
    theta_crit and get a safety margin below it.
    """
    tail = besov_tail_index(c)
    if math.isinf(tail):
        return THETA_CAP
    return min(THETA_CAP, tail - BOUNDARY_MARGIN)


def rate_sweep(
    c: ChaosCoefficients,
    model: SingularVolatility,
    n_values=DEFAULT_N_VALUES,
    n_paths: int = 100_000,
    seed: int = 0,
    theta: float | None = None,
    workers: int = 1,
) -> RateSweepResult:
    """Analytic and Monte Carlo errors over equidistant nets, with a slope fit."""
    n_values = tuple(int(n) for n in n_values)
    if len(set(n_values)) < 3:
        raise ValueError("need at least 3 distinct net sizes")
    if sorted(n_values) != list(n_values):
        raise ValueError("n_values must be strictly increasing")
    if n_paths < 1000:
        raise ValueError("need at least 1000 paths")

    analytic = []
    mc_means = []
    mc_ses = []
    for n in n_values:
        net = equidistant_net(n, model.horizon)
        analytic.append(net_error_l2(c, model, net))
        est = mc_l2_error(c, model, net, n_paths, seed, workers=workers)
        mc_means.append(est.mean)
        mc_ses.append(est.std_error)

    if min(analytic) <= 0.0:
        raise DegeneratePayoffError(
            "analytic hedging error vanishes; the payoff needs no hedge"
        )

    fit = fit_power_law(n_values, analytic)
    theta_used = float(theta) if theta is not None else select_theta(c)
    digest = _config_digest(c, model, n_values, n_paths, seed, theta_used)
    return RateSweepResult(
        n_values=n_values,
        analytic_errors=tuple(analytic),
        mc_errors=tuple(mc_means),
        mc_std_errors=tuple(mc_ses),
        fitted_slope=fit.slope,
        fitted_intercept=fit.intercept,
        slope_ci=fit.ci,
        theoretical_slope=-model.beta * theta_used / 2.0,
        theta_used=theta_used,
        config_digest=digest,
    )


@dataclass(frozen=True)
class SmoothnessReport:
    rows: tuple[tuple[float, float, float], ...]  # (theta, sum, integral)
    tail_index: float
    super_polynomial: bool
    parseval_residual: float


def smoothness_report(c: ChaosCoefficients, theta_grid) -> SmoothnessReport:
    """Both smoothness criteria across a theta grid, plus the tail exponent."""
    grid = tuple(float(t) for t in theta_grid)
    if not grid:
        raise ValueError("theta grid must be nonempty")
    rows = tuple(
        (t, besov_sum_criterion(c, t), besov_integral_criterion(c, t)) for t in grid
    )
    try:
        tail = besov_tail_index(c)
    except ValueError:
        tail = math.nan
    return SmoothnessReport(
        rows=rows,
        tail_index=tail,
        super_polynomial=math.isinf(tail),
        parseval_residual=c.parseval_residual,
    )


def _config_digest(c, model, n_values, n_paths, seed, theta_used) -> str:
    h = hashlib.sha256()
    h.update(repr((model.beta, model.horizon, n_values, n_paths, seed, theta_used)).encode())
    h.update(np.asarray(c.coeffs).tobytes())
    return h.hexdigest()[:12]
