"""Exact-in-distribution Monte Carlo of the discrete hedge.

Per interval, the Brownian increment and the volatility-weighted integral are
jointly Gaussian with closed-form covariance, so paths are sampled exactly by
a 2x2 Cholesky factor per interval; no fine-grid discretization bias exists,
including on the singular last interval.  Randomness is addressed by
(seed, path index, interval index) through a counter-based generator, which
makes every estimate independent of how paths are partitioned across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import backend
from .model import SingularVolatility, TimeNet
from .payoffs import ChaosCoefficients

CHUNK_PATHS = 8192  # fixed; part of the reproducibility contract
SIGMA2_SLACK = 1e-12


class CovarianceError(RuntimeError):
    """Interval covariance failed its Cholesky factorization.

    The covariance entries are closed-form, so a non-PSD matrix signals an
    inconsistency in those formulas, not bad luck.
    """


@dataclass(frozen=True)
class PathSample:
    """One simulated path: per-interval Brownian increments and eta-integrals."""

    dw: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_paths: int
    seed: int


@dataclass(frozen=True)
class _NetProfile:
    """Closed-form per-interval quantities shared by the sampling kernels."""

    dt: np.ndarray
    s11: np.ndarray
    s21: np.ndarray
    s22: np.ndarray
    sig2_left: np.ndarray
    nu_scale: np.ndarray


def _net_profile(net: TimeNet, model: SingularVolatility) -> _NetProfile:
    t = net.times
    dt = np.diff(t)
    var_y = np.array([model.cumvar(t[i], t[i + 1]) for i in range(net.n)])
    cov = np.array([model.eta_integral(t[i], t[i + 1]) for i in range(net.n)])
    s11 = np.sqrt(dt)
    s21 = cov / s11
    disc = var_y - s21 * s21
    bad = disc < -1e-12 * np.maximum(var_y, 1e-300)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise CovarianceError(
            f"interval {i}: Var(Y)={var_y[i]} < Cov^2/dt={s21[i]**2}"
        )
    if model.beta == 1.0:
        # constant volatility: Y is exactly proportional to dW
        s22 = np.zeros_like(dt)
    else:
        # shave rounding dust so near-degenerate correlations stay in [0, 1]
        disc[disc < 1e-15 * var_y] = 0.0
        s22 = np.sqrt(np.maximum(disc, 0.0))
    sig2 = np.array([model.cumvar(0.0, ti) for ti in t])
    return _NetProfile(
        dt=dt,
        s11=s11,
        s21=s21,
        s22=s22,
        sig2_left=sig2[:-1],
        nu_scale=cov / dt,
    )


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not (0 <= seed < 2**64):
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    return seed


def _standard_normal_block(seed: int, path_lo: int, path_hi: int, n_intervals: int):
    """Two (intervals, paths) arrays of N(0,1) draws, addressed by path index.

    Each path owns a fixed range of Philox counter blocks (4 draws per block),
    so the draws for path p never depend on which chunk p lands in.  Raw 64-bit
    words map to normals through the inverse Gaussian CDF.
    """
    blocks_per_path = (2 * n_intervals + 3) // 4
    n_paths = path_hi - path_lo
    bg = np.random.Philox(key=seed, counter=path_lo * blocks_per_path)
    raw = bg.random_raw(n_paths * blocks_per_path * 4).reshape(n_paths, -1)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    z = ndtri(u[:, : 2 * n_intervals])
    z1 = np.ascontiguousarray(z[:, 0::2].T)
    z2 = np.ascontiguousarray(z[:, 1::2].T)
    return z1, z2


def _sample_block(
    net: TimeNet, profile: _NetProfile, seed: int, path_lo: int, path_hi: int
):
    """(dw, y) arrays of shape (intervals, paths) for the given path range."""
    z1, z2 = _standard_normal_block(seed, path_lo, path_hi, net.n)
    dw = profile.s11[:, None] * z1
    y = profile.s21[:, None] * z1 + profile.s22[:, None] * z2
    return dw, y


def sample_path(
    net: TimeNet, model: SingularVolatility, seed: int, path_index: int = 0
) -> PathSample:
    """One exact path on the net, addressed by (seed, path_index)."""
    profile = _net_profile(net, model)
    dw, y = _sample_block(net, profile, _check_seed(seed), path_index, path_index + 1)
    return PathSample(dw=dw[:, 0].copy(), y=y[:, 0].copy())


def _series(coeffs: np.ndarray, sigma2: float, x):
    x_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=float)))
    out = backend.chaos_series_eval(np.ascontiguousarray(coeffs), float(sigma2), x_arr)
    return out if np.ndim(x) else float(out[0])


def _check_sigma2(sigma2: float) -> float:
    if not (0.0 <= sigma2 <= 1.0 + SIGMA2_SLACK):
        raise ValueError(f"sigma2 must lie in [0, 1], got {sigma2}")
    return min(float(sigma2), 1.0)


def conditional_value(c: ChaosCoefficients, sigma2: float, x):
    """E[F | F_t] evaluated from the truncated series at (sigma_t^2, X_t).

    At sigma2 = 0 this is the constant c_0, the analytic limit.
    """
    return _series(c.coeffs, _check_sigma2(sigma2), x)


def _projection_coeffs(c: ChaosCoefficients) -> np.ndarray:
    n = np.arange(1, c.coeffs.size, dtype=float)
    d = c.coeffs[1:] * np.sqrt(n)
    return d if d.size else np.zeros(1)


def projection_factor(c: ChaosCoefficients, sigma2: float, x):
    """State-dependent factor of the projected Malliavin derivative.

    The projected derivative at time t is eta(t) times this factor evaluated
    at (sigma_t^2, X_t); at sigma2 = 0 it reduces to c_1.
    """
    return _series(_projection_coeffs(c), _check_sigma2(sigma2), x)


def strategy_nu(
    c: ChaosCoefficients,
    model: SingularVolatility,
    net: TimeNet,
    i: int,
    x_left: float,
):
    """Hedge ratio on interval i (1-based), given X at the left endpoint.

    The interval average of the conditional projected derivative is
    closed-form: projection factor at the left endpoint times the mean of eta
    over the interval.
    """
    if not (1 <= i <= net.n):
        raise ValueError(f"interval index must be in 1..{net.n}, got {i}")
    a, b = float(net.times[i - 1]), float(net.times[i])
    pf = projection_factor(c, model.cumvar(0.0, a), x_left)
    return pf * model.eta_integral(a, b) / (b - a)


def _terminal_values(c: ChaosCoefficients, x_terminal: np.ndarray) -> np.ndarray:
    # direct payoff evaluation when available; series only as a fallback
    if c.payoff is not None:
        return np.asarray(c.payoff.evaluate(x_terminal), dtype=float)
    return _series(c.coeffs, 1.0, x_terminal)


def hedging_error_sample(
    c: ChaosCoefficients, model: SingularVolatility, net: TimeNet, path: PathSample
) -> float:
    """Realized hedging error g(X_T) - c_0 - sum_i nu_i dW_i for one path."""
    if path.dw.shape != (net.n,) or path.y.shape != (net.n,):
        raise ValueError("path was generated on a different net")
    profile = _net_profile(net, model)
    x_terminal = np.array([float(np.sum(path.y))])
    err = backend.hedge_errors_chunk(
        np.ascontiguousarray(_projection_coeffs(c)),
        float(c.coeffs[0]),
        _terminal_values(c, x_terminal),
        np.ascontiguousarray(path.dw[:, None]),
        np.ascontiguousarray(path.y[:, None]),
        profile.sig2_left,
        profile.nu_scale,
    )
    return float(err[0])


def _run_chunks(n_paths: int, workers: int, chunk_fn):
    """Evaluate chunk_fn(lo, hi) -> array over fixed chunks; reduce in order.

    Chunk boundaries depend only on n_paths, and partial results are combined
    in canonical chunk order, so the total is bit-identical for any worker
    count.
    """
    bounds = [
        (lo, min(lo + CHUNK_PATHS, n_paths)) for lo in range(0, n_paths, CHUNK_PATHS)
    ]
    if workers <= 1 or len(bounds) == 1:
        partials = [chunk_fn(lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda ab: chunk_fn(*ab), bounds))
    total = partials[0].copy()
    for p in partials[1:]:
        total += p
    return total


def mc_l2_error(
    c: ChaosCoefficients,
    model: SingularVolatility,
    net: TimeNet,
    n_paths: int,
    seed: int,
    workers: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of the L2 hedging error on the net.

    Returns the root of the mean squared realized error; the standard error of
    the root comes from the fourth sample moment by the delta method.
    """
    if n_paths < 2:
        raise ValueError("need at least 2 paths")
    seed = _check_seed(seed)
    profile = _net_profile(net, model)
    dvec = np.ascontiguousarray(_projection_coeffs(c))
    c0 = float(c.coeffs[0])

    def one_chunk(lo, hi):
        dw, y = _sample_block(net, profile, seed, lo, hi)
        f_term = _terminal_values(c, np.sum(y, axis=0))
        err = backend.hedge_errors_chunk(
            dvec, c0, f_term, dw, y, profile.sig2_left, profile.nu_scale
        )
        e2 = err * err
        return np.array([np.sum(e2), np.sum(e2 * e2)])

    s2, s4 = _run_chunks(n_paths, workers, one_chunk)
    return _l2_estimate(s2, s4, n_paths, seed)


def _l2_estimate(s2: float, s4: float, n_paths: int, seed: int) -> McEstimate:
    m2 = s2 / n_paths
    m4 = s4 / n_paths
    mean = math.sqrt(m2)
    if mean == 0.0:
        return McEstimate(mean=0.0, std_error=0.0, n_paths=n_paths, seed=seed)
    se_m2 = math.sqrt(max(m4 - m2 * m2, 0.0) / n_paths)
    return McEstimate(mean=mean, std_error=se_m2 / (2.0 * mean), n_paths=n_paths, seed=seed)


def delta_interval_moment(
    c: ChaosCoefficients,
    model: SingularVolatility,
    a: float,
    b: float,
    n_paths: int,
    seed: int,
    workers: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of E[Delta(a,b)^2], simulated from the definition.

    Delta is the conditional-mean increment minus the one-interval hedge; the
    estimate is directly comparable with a_term + b_term at the same
    truncation order.
    """
    if not (0.0 <= a < b <= model.horizon):
        raise ValueError(f"need 0 <= a < b <= T={model.horizon}, got a={a}, b={b}")
    if n_paths < 2:
        raise ValueError("need at least 2 paths")
    seed = _check_seed(seed)
    times = [0.0, a, b] if a > 0.0 else [0.0, b]
    net = TimeNet(np.array(times))
    profile = _net_profile(net, model)
    cvec = np.ascontiguousarray(c.coeffs)
    dvec = np.ascontiguousarray(_projection_coeffs(c))
    s2a = model.cumvar(0.0, a)
    s2b = model.cumvar(0.0, b)
    nu_scale = float(profile.nu_scale[-1])

    def one_chunk(lo, hi):
        dw, y = _sample_block(net, profile, seed, lo, hi)
        x_a = y[0] if a > 0.0 else np.zeros(hi - lo)
        x_b = x_a + y[-1]
        nu = backend.chaos_series_eval(dvec, s2a, np.ascontiguousarray(x_a)) * nu_scale
        delta = (
            backend.chaos_series_eval(cvec, s2b, np.ascontiguousarray(x_b))
            - backend.chaos_series_eval(cvec, s2a, np.ascontiguousarray(x_a))
            - dw[-1] * nu
        )
        d2 = delta * delta
        return np.array([np.sum(d2), np.sum(d2 * d2)])

    s2, s4 = _run_chunks(n_paths, workers, one_chunk)
    m2 = s2 / n_paths
    m4 = s4 / n_paths
    se = math.sqrt(max(m4 - m2 * m2, 0.0) / n_paths)
    return McEstimate(mean=m2, std_error=se, n_paths=n_paths, seed=seed)
