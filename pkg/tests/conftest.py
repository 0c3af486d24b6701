import numpy as np
import pytest

from periodic_euler.acceptance import Suite
from periodic_euler.config import RunConfig
from periodic_euler.forcing import BackgroundSolution, ForcingCoefficient
from periodic_euler.gasdyn import GasParams


@pytest.fixture(scope="session")
def params():
    return GasParams()


@pytest.fixture(scope="session")
def sine_forcing():
    return ForcingCoefficient.sine(0.5, 1, 1.0)


@pytest.fixture(scope="session")
def background(params, sine_forcing):
    return BackgroundSolution(params, sine_forcing)


@pytest.fixture(scope="session")
def suite():
    """Baseline runs shared by the analysis and acceptance tests."""
    return Suite()


@pytest.fixture(scope="session")
def small_cfg():
    """Baseline physics on coarse grids for quick end-to-end tests."""
    return RunConfig.load(overrides=["march.nt_per_period=64", "fv.nx=128", "march.t_max=4.0", "fv.t_end=4.0"])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n].report())
