import math

import pytest
from hypothesis import settings

from cascade_dim.weights import LOG4, WeightModel

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

LN2 = math.log(2.0)


@pytest.fixture
def ln_half():
    """Log-normal with sigma^2 = ln 2, so gamma = 1/2."""
    return WeightModel.log_normal(LN2)


@pytest.fixture
def ln_near():
    return WeightModel.log_normal(LOG4 - 0.01)


@pytest.fixture
def tp_near():
    return WeightModel.two_point(0.99)


@pytest.fixture(params=["ln_half", "ln_near", "tp_near", "tp_half"])
def any_model(request):
    return {
        "ln_half": WeightModel.log_normal(LN2),
        "ln_near": WeightModel.log_normal(LOG4 - 0.01),
        "tp_near": WeightModel.two_point(0.99),
        "tp_half": WeightModel.two_point(0.5),
    }[request.param]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REPORT

    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
