import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qradial import QContext
from qradial.verify import ALL_CONFIGS, Q_VALUES

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(params=[(q, n, m) for n, m in ALL_CONFIGS for q in Q_VALUES], ids=lambda p: f"q{p[0]}-n{p[1]}-m{p[2]}")
def any_ctx(request):
    q, n, m = request.param
    return QContext(q, n, m)


@pytest.fixture
def ctx12():
    return QContext(0.5, 1, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from tests.test_acceptance import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
