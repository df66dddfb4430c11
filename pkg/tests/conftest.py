import warnings

import pytest

from hedgerate import PayoffSpec, chaos_coefficients


@pytest.fixture(autouse=True)
def _quiet_truncation_flag():
    # the indicator payoff at the default order legitimately trips the
    # truncation-residual flag; dedicated tests assert it fires
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="series truncation residual")
        yield


@pytest.fixture(scope="session")
def indicator64():
    return chaos_coefficients(PayoffSpec.indicator(0.0), 64)


@pytest.fixture(scope="session")
def chaos2():
    return chaos_coefficients(PayoffSpec.pure_hermite(2), 8)


@pytest.fixture(scope="session")
def chaos1():
    return chaos_coefficients(PayoffSpec.pure_hermite(1), 8)
