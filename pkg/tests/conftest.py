import numpy as np
import pytest

from tcbm_credit import BrownianParams, GammaSubordinator


@pytest.fixture
def vg_params():
    """Model-B-like Brownian part: x = 1.5, sigma^2 = 0.0846, beta = -0.5."""
    return BrownianParams(1.5, np.sqrt(0.0846), -0.5)


@pytest.fixture
def vg_clock():
    return GammaSubordinator(1.0, 0.0, 1.0, normalized=True)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
