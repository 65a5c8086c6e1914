import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagns.errors import DomainError
from lagns.gas import GasParams, conductivity, entropy_potential, jensen_roots, pressure


def test_pressure_examples():
    assert pressure(GasParams(R=1.0), 1.0, 1.0) == 1.0
    assert pressure(GasParams(R=2.0), 4.0, 2.0) == 1.0
    # direct arithmetic oracle R * theta / v
    assert pressure(GasParams(R=287.0), 0.8, 1.2) == pytest.approx(287.0 * 1.2 / 0.8, rel=1e-15)
    assert pressure(GasParams(R=287.0), 0.8, 1.2) == pytest.approx(430.5, rel=1e-14)


@pytest.mark.parametrize("v, theta", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
def test_pressure_domain(v, theta):
    with pytest.raises(DomainError):
        pressure(GasParams(), v, theta)


def test_conductivity_examples():
    assert conductivity(GasParams(kappa_tilde=1.0, beta=0.5), 1.0) == 1.0
    assert conductivity(GasParams(kappa_tilde=1.0, beta=0.5), 4.0) == pytest.approx(2.0, rel=1e-15)
    assert conductivity(GasParams(kappa_tilde=3.0, beta=2.0), 0.1) == pytest.approx(3.0 * 0.1 ** 2, rel=1e-14)
    with pytest.raises(DomainError):
        conductivity(GasParams(), 0.0)


def test_entropy_potential_examples():
    assert entropy_potential(1.0) == 0.0
    assert entropy_potential(math.e) == pytest.approx(math.e - 2.0, abs=1e-15)
    assert entropy_potential(0.5) == pytest.approx(0.5 + math.log(2.0) - 1.0, abs=1e-15)
    with pytest.raises(DomainError):
        entropy_potential(-1.0)


def test_gas_params_invariants():
    with pytest.raises(DomainError):
        GasParams(gamma=0.5)
    with pytest.raises(DomainError):
        GasParams(beta=-1.0)
    for name in ("R", "c_v", "mu_tilde", "kappa_tilde"):
        with pytest.raises(DomainError):
            GasParams(**{name: 0.0})
    assert GasParams(beta=0.0).beta == 0.0


def _bisection_oracle(e0, lo, hi):
    f = lambda y: y - math.log(y) - 1.0 - e0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (f(lo) > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_jensen_roots_examples():
    assert jensen_roots(0.0) == (1.0, 1.0)
    e0 = 1.0 - math.log(2.0)
    a1, a2 = jensen_roots(e0)
    assert abs(a2 - 2.0) < 1e-10
    assert abs(a1 - _bisection_oracle(e0, 1e-9, 1.0)) < 1e-10
    assert a1 == pytest.approx(0.4064, abs=1e-4)
    with pytest.raises(DomainError):
        jensen_roots(-0.1)


@given(st.floats(1e-6, 700.0))
def test_jensen_roots_solve_defining_equation(e0):
    a1, a2 = jensen_roots(e0)
    assert 0 < a1 <= 1 <= a2
    for a in (a1, a2):
        # distance to the true root, estimated by one Newton correction
        resid = a - math.log(a) - 1.0 - e0
        assert abs(resid / (1.0 - 1.0 / a)) < 1e-10 * max(1.0, a)


@given(st.floats(0.01, 100.0), st.floats(0.01, 100.0), st.floats(1e-3, 1e3))
def test_pressure_homogeneous(v, theta, lam):
    p = GasParams(R=1.7)
    assert pressure(p, lam * v, lam * theta) == pytest.approx(pressure(p, v, theta), rel=1e-12)


@given(st.floats(0.0, 4.0), st.floats(1e-3, 50.0), st.floats(1e-3, 50.0))
def test_conductivity_monotone(beta, a, b):
    p = GasParams(kappa_tilde=2.5, beta=beta)
    lo, hi = sorted((a, b))
    assert conductivity(p, lo) <= conductivity(p, hi)
    assert conductivity(p, 1.0) == 2.5


@settings(max_examples=200)
@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(0.01, 0.99))
def test_entropy_potential_strictly_convex(y1, y2, t):
    if abs(y1 - y2) < 1e-3 * max(y1, y2):
        return
    mid = entropy_potential(t * y1 + (1 - t) * y2)
    assert mid < t * entropy_potential(y1) + (1 - t) * entropy_potential(y2)


def test_entropy_potential_vectorised():
    y = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(entropy_potential(y), y - np.log(y) - 1.0)


@given(st.floats(1e-30, 1e-6))
def test_jensen_roots_small_energy_asymptotics(e0):
    # y - ln y - 1 ~ (y-1)^2/2 near 1, so the roots are 1 -+ sqrt(2 e0) + O(e0)
    a1, a2 = jensen_roots(e0)
    r = math.sqrt(2.0 * e0)
    assert abs(a1 - (1.0 - r)) < 2 * e0 + 1e-7
    assert abs(a2 - (1.0 + r)) < 2 * e0 + 1e-7
