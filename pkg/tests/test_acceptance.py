"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a ``PASS``/``FAIL`` line; the lines are repeated in the
terminal summary (see ``conftest.py``).
"""

import pytest

from lagns import acceptance as acc

pytestmark = pytest.mark.slow

RESULTS = []


@pytest.fixture(scope="module")
def refs():
    return acc.ReferenceRuns()


def report(capsys, result):
    RESULTS.append(result.line())
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()


def test_criterion_01_equilibrium(capsys):
    report(capsys, acc.criterion_equilibrium())


def test_criterion_02_energy_inequality(capsys, refs):
    report(capsys, acc.criterion_energy(refs))


def test_criterion_03_uniform_bounds(capsys, refs):
    report(capsys, acc.criterion_bounds(refs))


def test_criterion_04_large_time_decay(capsys, refs):
    report(capsys, acc.criterion_decay(refs))


def test_criterion_05_flux_decay(capsys, refs):
    report(capsys, acc.criterion_flux_decay(refs))


def test_criterion_06_jensen(capsys, refs):
    report(capsys, acc.criterion_jensen(refs))


def test_criterion_07_convergence(capsys):
    report(capsys, acc.criterion_convergence())


def test_criterion_08_oracle(capsys):
    report(capsys, acc.criterion_oracle())


def test_criterion_09_cold_spot(capsys):
    report(capsys, acc.criterion_cold_spot())


def test_criterion_10_roots(capsys):
    report(capsys, acc.criterion_roots())
