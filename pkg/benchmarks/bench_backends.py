"""Timing comparison of the numba kernels against the pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_backends.py

The first numba call is timed separately so JIT compilation never pollutes
the steady-state numbers.
"""

import time

import numpy as np

from hedgerate import PayoffSpec, SingularVolatility, chaos_coefficients, equidistant_net, mc_l2_error
from hedgerate import backend
from hedgerate.simulate import _net_profile, _sample_block, _projection_coeffs


def time_call(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_series_kernel(n_paths=200_000, order=64):
    coeffs = np.linspace(1.0, 0.01, order + 1)
    x = np.random.default_rng(0).standard_normal(n_paths)
    return lambda: backend.chaos_series_eval(coeffs, 0.7, x)


def bench_hedge_kernel(n_paths=20_000, n_intervals=64, order=64):
    m = SingularVolatility(0.5, 1.0)
    c = chaos_coefficients(PayoffSpec.indicator(0.0), order)
    net = equidistant_net(n_intervals)
    profile = _net_profile(net, m)
    dw, y = _sample_block(net, profile, seed=1, path_lo=0, path_hi=n_paths)
    dvec = np.ascontiguousarray(_projection_coeffs(c))
    f_term = c.payoff.evaluate(np.sum(y, axis=0))
    return lambda: backend.hedge_errors_chunk(
        dvec, float(c.coeffs[0]), f_term, dw, y, profile.sig2_left, profile.nu_scale
    )


def bench_mc(n_paths=100_000, n_intervals=64):
    m = SingularVolatility(0.5, 1.0)
    c = chaos_coefficients(PayoffSpec.indicator(0.0), 64)
    net = equidistant_net(n_intervals)
    return lambda: mc_l2_error(c, m, net, n_paths, seed=3)


def main():
    cases = [
        ("series eval (200k points, order 64)", bench_series_kernel()),
        ("hedge errors (20k paths x 64 intervals)", bench_hedge_kernel()),
        ("mc_l2_error (100k paths, n=64)", bench_mc()),
    ]

    print(f"{'kernel':45s} {'numpy':>10s} {'numba':>10s} {'speedup':>9s}")
    for label, fn in cases:
        backend.use("numpy")
        t_np = time_call(fn)
        backend.use("numba")
        fn()  # absorb JIT compilation outside the timed region
        t_nb = time_call(fn)
        print(f"{label:45s} {t_np:9.4f}s {t_nb:9.4f}s {t_np / t_nb:8.1f}x")
    backend.use("numba")


if __name__ == "__main__":
    main()
