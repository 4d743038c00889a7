import numpy as np
import pytest
from hypothesis import settings

from liftlab import build_join_graph

# the first call of each compiled kernel pays its load cost
settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture
def k5e():
    return build_join_graph(3, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
