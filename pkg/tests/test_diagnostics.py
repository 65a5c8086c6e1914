import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagns.diagnostics import (CSV_HEADER, DiagnosticsRecord, DiagnosticsRecorder, bound_monitor,
                               deviation_norms, dissipation, energy_entropy, jensen_violation,
                               read_diagnostics, sigma_at, unit_mass_averages)
from lagns.errors import DomainError
from lagns.gas import GasParams
from lagns.grid import INSULATED_WALL, Grid, ProblemKind, State, Variant, apply_boundary
from lagns.profiles import equilibrium, large_data_composite
from lagns.solver import ProblemSetup, SchemeConfig, run, viscous_flux


def cauchy(L=10.0, n=100, walls=None):
    return Grid.for_problem(ProblemKind(Variant.CAUCHY, L), n_cells=n, walls=walls)


def const_state(n, v=1.0, theta=1.0):
    return State(0.0, np.full(n, v), np.full(n, theta), np.zeros(n + 1))


def test_energy_equilibrium_is_zero():
    g = cauchy()
    assert energy_entropy(const_state(100), g) == 0.0


def test_energy_uniform_expansion():
    g = cauchy()
    # W(e) = e - 2 on every cell of a window of mass 10
    assert energy_entropy(const_state(100, v=math.e), g) == pytest.approx(10 * (math.e - 2), rel=1e-13)


@pytest.mark.parametrize("field", ["v", "theta"])
def test_energy_single_cell_perturbation(field):
    g = cauchy()
    s = const_state(100)
    getattr(s, field)[37] = 2.0
    assert energy_entropy(s, g) == pytest.approx(g.dx * (1 - math.log(2)), rel=1e-13)


def test_energy_weights():
    g = cauchy()
    s = const_state(100, v=2.0, theta=3.0)
    p = GasParams(R=0.4, c_v=2.5)
    expect = 10 * (0.4 * (1 - math.log(2)) + 2.5 * (2 - math.log(3)))
    assert energy_entropy(s, g, p) == pytest.approx(expect, rel=1e-13)


def test_kinetic_energy_on_edges():
    g = cauchy(L=4.0, n=4)
    s = const_state(4)
    s.u[:] = [0.0, 1.0, 2.0, 1.0, 0.0]
    assert energy_entropy(s, g) == pytest.approx(0.5 * 1.0 * (1 + 4 + 1), rel=1e-15)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_energy_mirror_invariance(seed):
    rng = np.random.default_rng(seed)
    g = cauchy(L=8.0, n=16)
    v, th = rng.uniform(0.2, 4, 16), rng.uniform(0.2, 4, 16)
    u = np.concatenate(([0.0], rng.normal(size=15), [0.0]))
    a = State(0.0, v, th, u)
    b = State(0.0, v[::-1], th[::-1], -u[::-1])
    assert energy_entropy(a, g) == pytest.approx(energy_entropy(b, g), rel=1e-12)
    assert energy_entropy(a, g) >= 0


def test_energy_rejects_nonpositive():
    with pytest.raises(DomainError):
        energy_entropy(const_state(8, v=-1.0), cauchy(L=8.0, n=8))


def test_dissipation_linear_velocity():
    g = cauchy()
    s = const_state(100)
    slope = 0.3
    s.u[:] = slope * g.edges
    p = GasParams(mu_tilde=1.7)
    assert dissipation(s, g, p) == pytest.approx(1.7 * slope ** 2 * 10, rel=1e-13)


def test_dissipation_temperature_ramp_against_quadrature():
    # beta = 0, v = 1: heat term is int kappa theta_x^2 / theta^2 over the
    # span of cell centers (insulated walls carry no gradient)
    g = cauchy(L=10.0, n=50, walls=(INSULATED_WALL, INSULATED_WALL))
    slope = 0.2
    xc = g.centers
    theta = 1.5 + slope * (xc - xc[0])
    s = apply_boundary(State(0.0, np.ones(50), theta, np.zeros(51)), g)
    kappa = 0.8
    V = dissipation(s, g, GasParams(kappa_tilde=kappa, beta=0.0))
    m = 1_000_000
    h = (xc[-1] - xc[0]) / m
    xq = xc[0] + (np.arange(m) + 0.5) * h
    quad = h * np.sum(kappa * slope ** 2 / (1.5 + slope * (xq - xc[0])) ** 2)
    assert V == pytest.approx(quad, rel=1e-9)


def test_dissipation_zero_at_equilibrium():
    assert dissipation(const_state(100), cauchy()) == 0.0


def test_deviation_norm_example():
    g = cauchy()
    a = 0.3
    s = const_state(100, v=1 + a)
    n = deviation_norms(s, g, (2, math.inf))
    assert n["L2"] == pytest.approx(a * math.sqrt(10), rel=1e-13)
    assert n["Linf"] == pytest.approx(a, rel=1e-14)
    assert n["L2_grad"] == 0.0


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_deviation_norms_against_scan_and_holder(seed):
    rng = np.random.default_rng(seed)
    g = cauchy(L=8.0, n=32)
    s = State(0.0, rng.uniform(0.2, 3, 32), rng.uniform(0.2, 3, 32), rng.normal(size=33))
    n = deviation_norms(s, g, (1, 2, math.inf))
    scan = 0.0
    for f in (s.v - 1, s.theta - 1, 0.5 * (s.u[:-1] + s.u[1:])):
        for val in f:
            scan = max(scan, abs(val))
    assert n["Linf"] == scan
    assert n["L2"] ** 2 <= n["L1"] * n["Linf"] * (1 + 1e-12)
    assert n["L2"] <= n["Linf"] * math.sqrt(3 * 8.0) * (1 + 1e-12)


def test_deviation_norms_reject_small_p():
    with pytest.raises(DomainError):
        deviation_norms(const_state(8), cauchy(L=8.0, n=8), (0.5,))


def test_sigma_matches_stress_for_unit_gas():
    rng = np.random.default_rng(3)
    g = cauchy(L=8.0, n=16)
    s = State(0.0, rng.uniform(0.5, 2, 16), rng.uniform(0.5, 2, 16), rng.normal(size=17))
    stress = viscous_flux(s.u, s.v, g.dx, 1.0) - s.theta / s.v
    for N in range(16):
        assert sigma_at(s, g, N) == pytest.approx(stress[N], rel=1e-13, abs=1e-14)


def test_flux_probe_at_equilibrium():
    g = cauchy()
    rec = DiagnosticsRecorder(g, GasParams(), probe_N=g.cell_index(0.0))
    run(ProblemSetup(g, *equilibrium()), GasParams(), SchemeConfig(), 5.0, [rec])
    sig = rec.column("sigma_N")
    assert np.all(sig == -1.0)
    t, ly = rec.column("t"), rec.column("log_Y_N")
    np.testing.assert_allclose(ly, -t, rtol=0, atol=1e-12)
    assert rec.flux.D_N_at_x == 1.0
    assert np.all(rec.column("E") == 0.0) and np.all(rec.column("cumV") == 0.0)


def _record(inf_v, sup_v, inf_t, sup_t):
    return DiagnosticsRecord(0.0, 0.0, 0.0, 0.0, inf_v, sup_v, inf_t, sup_t, {}, 0.0, 0.0)


def test_bound_monitor():
    s = bound_monitor([_record(0.9, 1.2, 0.8, 1.1), _record(0.7, 1.1, 0.85, 1.3)])
    assert (s.min_inf_v, s.max_sup_v, s.min_inf_theta, s.max_sup_theta) == (0.7, 1.2, 0.8, 1.3)
    with pytest.raises(DomainError):
        bound_monitor([])


def test_unit_mass_averages_layout():
    g = cauchy(L=4.0, n=40)
    s = const_state(40)
    s.v[:] = np.repeat([1.0, 2.0, 3.0, 4.0], 10)
    v, th = unit_mass_averages(s, g)
    np.testing.assert_allclose(v, [1, 2, 3, 4])
    np.testing.assert_allclose(th, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.2, 3.0), st.floats(0.2, 3.0))
def test_unit_mass_averages_obey_jensen(seed, R, c_v):
    # every unit-mass average is bracketed by the roots built from E
    rng = np.random.default_rng(seed)
    g = cauchy(L=6.0, n=60)
    s = State(0.0, np.exp(rng.normal(0, 1, 60)), np.exp(rng.normal(0, 1, 60)), rng.normal(size=61))
    assert jensen_violation(s, g, GasParams(R=R, c_v=c_v)) == 0.0


def test_recorder_energy_inequality_and_csv(tmp_path):
    g = cauchy(L=10.0, n=100)
    path = tmp_path / "d.csv"
    rec = DiagnosticsRecorder(g, GasParams(), csv_path=path, jensen_check=True)
    run(ProblemSetup(g, *large_data_composite()), GasParams(), SchemeConfig(), 2.0, [rec])
    rec.close()
    E, cum = rec.column("E"), rec.column("cumV")
    assert np.all(np.diff(E) <= 0)
    assert np.max(E + cum) <= E[0] * (1 + 1e-3)
    assert rec.jensen_worst == 0.0
    assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    back = read_diagnostics(path)
    np.testing.assert_array_equal(back["E"], E)
    assert len(back["t"]) == len(rec.records)
