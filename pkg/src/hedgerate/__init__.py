"""Discrete hedging error of a Gaussian payoff under a singular volatility.

The payoff is g applied to the volatility-weighted Brownian integral; the
library computes the mean-square discrete hedging error exactly through its
chaos-series decomposition, simulates the discrete hedge by exact-in-law
Monte Carlo, and verifies the power-law convergence rate in the number of
rebalancing dates.
"""

from .analytic import (
    IntervalError,
    a_double_integral,
    a_term,
    b_term,
    interval_error,
    net_error_intervals,
    net_error_l2,
    net_truncation_residual,
    theorem_rhs_bound,
    zeta,
)
from .config import ConfigError, ExperimentConfig, parse_config
from .hermite import hermite_eval, normalized_hermite_eval
from .model import SingularVolatility, TimeNet, equidistant_net, transformed_net_mesh_stat
from .payoffs import (
    ChaosCoefficients,
    PayoffSpec,
    QuadratureError,
    QuadratureSettings,
    besov_integral_criterion,
    besov_sum_criterion,
    besov_tail_index,
    chaos_coefficients,
)
from .rates import (
    DegeneratePayoffError,
    PowerLawFit,
    RateSweepResult,
    SmoothnessReport,
    fit_power_law,
    rate_sweep,
    select_theta,
    smoothness_report,
)
from .simulate import (
    CovarianceError,
    McEstimate,
    PathSample,
    conditional_value,
    delta_interval_moment,
    hedging_error_sample,
    mc_l2_error,
    projection_factor,
    sample_path,
    strategy_nu,
)

__version__ = "0.1.0"

__all__ = [
    "ChaosCoefficients",
    "ConfigError",
    "CovarianceError",
    "DegeneratePayoffError",
    "ExperimentConfig",
    "IntervalError",
    "McEstimate",
    "PathSample",
    "PayoffSpec",
    "PowerLawFit",
    "QuadratureError",
    "QuadratureSettings",
    "RateSweepResult",
    "SingularVolatility",
    "SmoothnessReport",
    "TimeNet",
    "a_double_integral",
    "a_term",
    "b_term",
    "besov_integral_criterion",
    "besov_sum_criterion",
    "besov_tail_index",
    "chaos_coefficients",
    "conditional_value",
    "delta_interval_moment",
    "equidistant_net",
    "fit_power_law",
    "hedging_error_sample",
    "hermite_eval",
    "interval_error",
    "mc_l2_error",
    "net_error_intervals",
    "net_error_l2",
    "net_truncation_residual",
    "normalized_hermite_eval",
    "parse_config",
    "projection_factor",
    "rate_sweep",
    "sample_path",
    "select_theta",
    "smoothness_report",
    "strategy_nu",
    "theorem_rhs_bound",
    "transformed_net_mesh_stat",
    "zeta",
]
