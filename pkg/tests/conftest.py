import numpy as np
import pytest

from lagns.gas import GasParams
from lagns.grid import Grid, ProblemKind, Variant


@pytest.fixture
def unit_gas():
    return GasParams()


def cauchy_grid(length=16.0, n_cells=64):
    return Grid.for_problem(ProblemKind(Variant.CAUCHY, length), n_cells=n_cells)


@pytest.fixture
def grid64():
    return cauchy_grid()


def gauss(x, amp=0.5):
    return 1.0 + amp * np.exp(-np.asarray(x) ** 2)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
