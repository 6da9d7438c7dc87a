import numpy as np
import pytest

from schrodinger_kawahara import PhysParams, make_grid


@pytest.fixture
def params():
    return PhysParams()


@pytest.fixture
def grid():
    return make_grid(256, 40.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
