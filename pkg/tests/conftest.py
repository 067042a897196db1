import numpy as np
import pytest

from dampedkdv.grid import make_grid


@pytest.fixture(scope="session")
def grid80():
    return make_grid(80.0, 512)


@pytest.fixture(scope="session")
def grid2pi():
    return make_grid(2 * np.pi, 64)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)
