import math

import numpy as np
import pytest
from scipy import integrate

from hedgerate import (
    ChaosCoefficients,
    PayoffSpec,
    SingularVolatility,
    TimeNet,
    a_double_integral,
    a_term,
    b_term,
    chaos_coefficients,
    delta_interval_moment,
    equidistant_net,
    interval_error,
    net_error_intervals,
    net_error_l2,
    theorem_rhs_bound,
    zeta,
)


def dblquad_oracle(beta, a, b):
    """Direct 2-D quadrature of the symmetrized volatility-difference integral."""
    f = lambda u, v: ((1 - u) ** ((beta - 1) / 2) - (1 - v) ** ((beta - 1) / 2)) ** 2
    val, err = integrate.dblquad(f, a, b, a, b, epsabs=1e-13, epsrel=1e-13)
    assert err < 1e-10
    return beta / (2.0 * (b - a)) * val


class TestADoubleIntegral:
    def test_zero_for_constant_volatility(self):
        m = SingularVolatility(1.0, 1.0)
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = rng.uniform(0.0, 0.9)
            b = rng.uniform(a + 1e-3, 1.0)
            assert a_double_integral(m, a, b) == 0.0

    def test_terminal_interval_closed_form(self):
        m = SingularVolatility(0.5, 1.0)
        assert a_double_integral(m, 0.0, 1.0) == pytest.approx(1.0 / 9.0, rel=1e-12)
        for beta in [0.2, 0.7]:
            m = SingularVolatility(beta, 1.0)
            a = 0.3
            expected = (1 - a) ** beta * ((1 - beta) / (1 + beta)) ** 2
            assert a_double_integral(m, a, 1.0) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize(
        "beta,a,b", [(0.5, 0.0, 0.5), (0.3, 0.2, 0.9), (0.8, 0.1, 0.4)]
    )
    def test_matches_double_quadrature(self, beta, a, b):
        m = SingularVolatility(beta, 1.0)
        assert a_double_integral(m, a, b) == pytest.approx(
            dblquad_oracle(beta, a, b), abs=1e-8
        )

    def test_horizon_scale_invariance(self):
        m1 = SingularVolatility(0.4, 1.0)
        m2 = SingularVolatility(0.4, 2.0)
        assert a_double_integral(m2, 0.6, 1.8) == pytest.approx(
            a_double_integral(m1, 0.3, 0.9), rel=1e-12
        )

    def test_interval_validation(self):
        m = SingularVolatility(0.5, 1.0)
        with pytest.raises(ValueError):
            a_double_integral(m, 0.5, 0.5)
        with pytest.raises(ValueError):
            a_double_integral(m, 0.7, 0.3)


class TestATerm:
    def test_constant_payoff_contributes_nothing(self):
        c = ChaosCoefficients.from_dict({0: 2.0}, 4)
        m = SingularVolatility(0.5, 1.0)
        assert a_term(c, m, 0.1, 0.6) == 0.0

    def test_first_chaos_identity(self, chaos1):
        # for the first chaos the A-term equals cumvar minus the squared mean
        # of eta over the interval
        rng = np.random.default_rng(9)
        for _ in range(20):
            beta = rng.uniform(0.1, 0.99)
            m = SingularVolatility(beta, 1.0)
            a = rng.uniform(0.0, 0.8)
            b = rng.uniform(a + 1e-3, 1.0)
            direct = m.cumvar(a, b) - m.eta_integral(a, b) ** 2 / (b - a)
            assert a_term(chaos1, m, a, b) == pytest.approx(direct, rel=1e-9, abs=1e-15)

    def test_constant_volatility_gives_zero(self, indicator64):
        m = SingularVolatility(1.0, 1.0)
        assert a_term(indicator64, m, 0.2, 0.7) == 0.0


class TestBTerm:
    def test_first_chaos_contributes_nothing(self, chaos1):
        m = SingularVolatility(0.5, 1.0)
        assert b_term(chaos1, m, 0.1, 0.6) == 0.0

    def test_second_chaos_square_identity(self, chaos2):
        rng = np.random.default_rng(13)
        for _ in range(20):
            beta = rng.uniform(0.1, 1.0)
            m = SingularVolatility(beta, 1.0)
            a = rng.uniform(0.0, 0.8)
            b = rng.uniform(a + 1e-3, 1.0)
            assert b_term(chaos2, m, a, b) == pytest.approx(
                m.cumvar(a, b) ** 2, rel=1e-12
            )

    def test_against_bigfloat_power_formula(self):
        import mpmath

        mpmath.mp.dps = 50
        c = ChaosCoefficients.from_dict({2: 0.7, 5: -0.3, 11: 0.1}, 16)
        m = SingularVolatility(0.35, 1.0)
        a, b = 0.3, 0.85
        x = mpmath.mpf(m.cumvar(0.0, b))
        y = mpmath.mpf(m.cumvar(0.0, a))
        oracle = mpmath.mpf(0)
        for n, cn in [(2, 0.7), (5, -0.3), (11, 0.1)]:
            oracle += mpmath.mpf(cn) ** 2 * (
                x**n - y**n - n * y ** (n - 1) * (x - y)
            )
        assert b_term(c, m, a, b) == pytest.approx(float(oracle), rel=1e-10)

    def test_nonnegative_everywhere(self, indicator64):
        rng = np.random.default_rng(21)
        for _ in range(30):
            beta = rng.uniform(0.05, 1.0)
            m = SingularVolatility(beta, 1.0)
            a = rng.uniform(0.0, 0.95)
            b = rng.uniform(a + 1e-4, 1.0)
            assert a_term(indicator64, m, a, b) >= 0.0
            assert b_term(indicator64, m, a, b) >= 0.0


class TestLemmaDecomposition:
    """A + B must reproduce the simulated second moment of the one-step error."""

    @pytest.mark.parametrize(
        "beta,a,b,entries",
        [
            (0.3, 0.1, 0.7, {1: 1.0}),
            (0.6, 0.0, 0.5, {2: 1.0}),
            (0.9, 0.25, 0.9, {1: 0.5, 2: 0.5, 3: 0.25}),
        ],
    )
    def test_matches_simulated_moment(self, beta, a, b, entries):
        c = ChaosCoefficients.from_dict(entries, 8)
        m = SingularVolatility(beta, 1.0)
        exact = a_term(c, m, a, b) + b_term(c, m, a, b)
        est = delta_interval_moment(c, m, a, b, 50_000, seed=101)
        assert abs(est.mean - exact) <= 4.0 * est.std_error

    def test_indicator_b_term_from_simulation(self, indicator64):
        # the simulated moment minus the A-term recovers the B-term
        m = SingularVolatility(0.5, 1.0)
        a, b = 0.0, 0.5
        est = delta_interval_moment(indicator64, m, a, b, 100_000, seed=77)
        residual = est.mean - a_term(indicator64, m, a, b)
        assert abs(residual - b_term(indicator64, m, a, b)) <= 3.0 * est.std_error


class TestNetError:
    def test_constant_payoff_needs_no_hedge(self):
        c = ChaosCoefficients.from_dict({0: 3.0}, 4)
        m = SingularVolatility(0.5, 1.0)
        assert net_error_l2(c, m, equidistant_net(8)) == 0.0

    def test_linear_payoff_constant_volatility_exact(self, chaos1):
        m = SingularVolatility(1.0, 1.0)
        assert net_error_l2(chaos1, m, equidistant_net(16)) <= 1e-12

    def test_second_chaos_constant_volatility_classical_rate(self, chaos2):
        m = SingularVolatility(1.0, 1.0)
        for n in [4, 16, 64, 256]:
            err = net_error_l2(chaos2, m, equidistant_net(n))
            assert abs(err - n**-0.5) <= 1e-10

    def test_midpoint_refinement_never_increases(self, indicator64):
        rng = np.random.default_rng(33)
        m = SingularVolatility(0.45, 1.0)
        for _ in range(10):
            interior = np.sort(rng.uniform(0.05, 0.95, size=4))
            times = np.concatenate([[0.0], interior, [1.0]])
            net = TimeNet(times)
            base = sum(p.total for p in net_error_intervals(indicator64, m, net))
            i = rng.integers(0, times.size - 1)
            mid = 0.5 * (times[i] + times[i + 1])
            refined = TimeNet(np.sort(np.append(times, mid)))
            after = sum(p.total for p in net_error_intervals(indicator64, m, refined))
            assert after <= base + 1e-15

    def test_analytic_rate_mild_singularity(self, chaos2):
        # log-log slope approaches -beta/2; at beta = 0.3 the desk-scale range
        # is already inside the asymptotic band
        from hedgerate import fit_power_law

        beta, theta = 0.3, 0.99
        m = SingularVolatility(beta, 1.0)
        ns = [4, 8, 16, 32, 64, 128, 256]
        errs = [net_error_l2(chaos2, m, equidistant_net(n)) for n in ns]
        assert np.all(np.diff(errs) < 0.0)
        fit = fit_power_law(ns, errs)
        assert abs(fit.slope - (-beta * theta / 2.0)) <= 0.05

    def test_residual_flag_fires_for_rough_payoff(self, indicator64):
        m = SingularVolatility(0.5, 1.0)
        with pytest.warns(UserWarning, match="truncation residual"):
            net_error_l2(indicator64, m, equidistant_net(4))

    def test_interval_error_fields(self, indicator64):
        m = SingularVolatility(0.5, 1.0)
        e = interval_error(indicator64, m, 0.25, 0.5)
        assert e.a_term >= 0.0 and e.b_term >= 0.0
        assert e.truncation_residual >= 0.0
        assert e.total == e.a_term + e.b_term

    def test_net_horizon_mismatch(self, indicator64):
        m = SingularVolatility(0.5, 2.0)
        with pytest.raises(ValueError, match="horizon"):
            net_error_l2(indicator64, m, equidistant_net(4, 1.0))


class TestZeta:
    def test_known_values(self):
        assert abs(zeta(2.0) - math.pi**2 / 6.0) < 1e-10
        assert abs(zeta(4.0) - math.pi**4 / 90.0) < 1e-10

    @pytest.mark.parametrize("s", [1.1, 1.5, 3.3])
    def test_against_mpmath(self, s):
        import mpmath

        mpmath.mp.dps = 30
        assert abs(zeta(s) - float(mpmath.zeta(s))) < 1e-10

    def test_domain(self):
        with pytest.raises(ValueError):
            zeta(1.0)
        with pytest.raises(ValueError):
            zeta(0.5)


class TestTheoremBound:
    def test_power_law_ratio(self):
        m = SingularVolatility(0.5, 1.0)
        theta = 0.8
        for n in [4, 10, 32]:
            ratio = theorem_rhs_bound(m, theta, 2 * n) / theorem_rhs_bound(m, theta, n)
            assert ratio == pytest.approx(2.0 ** (-m.beta * theta / 2.0), rel=1e-12)

    def test_exponent_at_theta_one(self):
        m = SingularVolatility(0.5, 1.0)
        ratio = theorem_rhs_bound(m, 1.0, 16, constant=1.0) / theorem_rhs_bound(
            m, 1.0, 4, constant=1.0
        )
        assert math.log(ratio) / math.log(4.0) == pytest.approx(-0.25, rel=1e-12)

    def test_closed_form_constant(self):
        import mpmath

        mpmath.mp.dps = 30
        expected = 1.0 / 9.0 + 0.25 * float(mpmath.zeta(1.5))
        m = SingularVolatility(0.5, 1.0)
        assert theorem_rhs_bound(m, 0.9, 1) == pytest.approx(expected, rel=1e-10)

    def test_constant_volatility_needs_explicit_constant(self):
        m = SingularVolatility(1.0, 1.0)
        with pytest.raises(ValueError):
            theorem_rhs_bound(m, 0.9, 4)
        assert theorem_rhs_bound(m, 0.9, 4, constant=2.0) > 0.0
