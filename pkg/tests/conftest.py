import numpy as np
import pytest

from helpers import ACCEPTANCE_LINES, exact_fifty_fifty


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def fifty_fifty():
    return exact_fifty_fifty()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
