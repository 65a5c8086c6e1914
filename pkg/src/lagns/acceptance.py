"""Acceptance suite: property checks on reference runs, studies and root finding.

Each ``criterion_*`` function returns a :class:`CriterionResult`. The three
large-data reference runs are shared through :class:`ReferenceRuns`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .diagnostics import DiagnosticsRecorder
from .gas import GasParams, jensen_roots
from .grid import Grid, ProblemKind, Variant, build_initial_state
from .profiles import cold_spot, equilibrium, gaussian_bump, large_data_composite
from .solver import ProblemSetup, SchemeConfig, run, step
from .verification import convergence_study, oracle_compare, standard_case

REFERENCE_BETAS = (0.5, 1.0, 2.5)
REFERENCE_T_END = 50.0

ENERGY_TOL = 1e-3
MONOTONE_TOL = 1e-9
V_BOUNDS = (0.05, 20.0)
SATURATION_TOL = 0.05
DECAY_FRACTION = 0.2
TREND_NOISE = 1e-6
JENSEN_TOL = 1e-8
ROOT_TOL = 1e-10


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} [{self.number:2d}] {self.name}: {self.detail}"


def reference_setup() -> ProblemSetup:
    grid = Grid.for_problem(ProblemKind(Variant.CAUCHY, 80.0), dx=0.05)
    return ProblemSetup(grid, *large_data_composite())


@dataclass
class ReferenceRun:
    beta: float
    grid: Grid
    recorder: DiagnosticsRecorder
    rejections_after: dict = field(default_factory=dict)

    def col(self, name):
        return self.recorder.column(name)


class ReferenceRuns:
    """Lazily computed large-data runs, one per conductivity exponent."""

    def __init__(self, betas=REFERENCE_BETAS, t_end=REFERENCE_T_END):
        self.betas = tuple(betas)
        self.t_end = t_end
        self._runs = {}

    def get(self, beta) -> ReferenceRun:
        if beta not in self._runs:
            setup = reference_setup()
            params = GasParams(beta=beta)
            rec = DiagnosticsRecorder(setup.grid, params, probe_N=setup.grid.cell_index(0.0), jensen_check=True)
            run(setup, params, SchemeConfig(), self.t_end, [rec])
            self._runs[beta] = ReferenceRun(beta, setup.grid, rec)
        return self._runs[beta]

    def all(self):
        return [self.get(b) for b in self.betas]


def _combine(number, name, parts):
    ok = all(p for p, _ in parts)
    return CriterionResult(number, name, ok, "; ".join(d for _, d in parts))


def criterion_equilibrium(n_steps: int = 10_000) -> CriterionResult:
    parts = []
    for variant in Variant:
        grid = Grid.for_problem(ProblemKind(variant, 10.0), n_cells=40)
        state = build_initial_state(grid, *equilibrium())
        params, config = GasParams(), SchemeConfig()
        for _ in range(n_steps):
            state, _ = step(state, grid, params, config)
        dev = max(np.max(np.abs(state.v - 1)), np.max(np.abs(state.u)), np.max(np.abs(state.theta - 1)))
        parts.append((dev < 1e-12, f"{variant.value} dev={dev:.1e}"))
    return _combine(1, "equilibrium fixed point", parts)


def criterion_energy(refs: ReferenceRuns) -> CriterionResult:
    parts = []
    for r in refs.all():
        E, cum = r.col("E"), r.col("cumV")
        e0 = E[0]
        worst = float(np.max((E + cum) / e0))
        rise = float(np.max(np.diff(E))) / e0
        ok = worst <= 1 + ENERGY_TOL and rise <= MONOTONE_TOL
        parts.append((ok, f"beta={r.beta}: max(E+cumV)/e0={worst:.6f}, max dE/e0={rise:.1e}"))
    return _combine(2, "energy-entropy inequality", parts)


def _running(r, name, fn):
    return fn.accumulate(r.col(name))


def criterion_bounds(refs: ReferenceRuns) -> CriterionResult:
    parts = []
    lo, hi = V_BOUNDS
    for r in refs.all():
        t = r.col("t")
        i_mid = int(np.searchsorted(t, 0.5 * refs.t_end))
        ok = True
        spread = 0.0
        for name, fn in (("inf_v", np.minimum), ("sup_v", np.maximum),
                         ("inf_theta", np.minimum), ("sup_theta", np.maximum)):
            run_ext = _running(r, name, fn)
            ok &= bool(lo < run_ext[-1] < hi)
            spread = max(spread, abs(run_ext[-1] - run_ext[i_mid]) / abs(run_ext[i_mid]))
        ok &= spread < SATURATION_TOL
        s = r.recorder.summary()
        parts.append((ok, f"beta={r.beta}: v in [{s.min_inf_v:.3f}, {s.max_sup_v:.3f}], "
                          f"theta in [{s.min_inf_theta:.3f}, {s.max_sup_theta:.3f}], late drift {spread:.1e}"))
    return _combine(3, "uniform bounds", parts)


def criterion_decay(refs: ReferenceRuns) -> CriterionResult:
    parts = []
    for r in refs.all():
        t = r.col("t")
        late = t >= 0.75 * refs.t_end
        ok = True
        msg = []
        for name in ("Linf_dev", "L2_grad"):
            y = r.col(name)
            frac = y[-1] / np.max(y)
            rise = float(np.max(np.diff(y[late])))
            ok &= frac < DECAY_FRACTION and rise <= TREND_NOISE
            msg.append(f"{name} end/max={frac:.3f}")
        parts.append((ok, f"beta={r.beta}: " + ", ".join(msg)))
    return _combine(4, "large-time decay", parts)


def criterion_flux_decay(refs: ReferenceRuns) -> CriterionResult:
    parts = []
    for r in refs.all():
        t, ly = r.col("t"), r.col("log_Y_N")
        after = ly[t >= 5.0]
        ok = ly[-1] < -10 and bool(np.all(np.diff(after) < 0))
        parts.append((ok, f"beta={r.beta}: log_Y_N(end)={ly[-1]:.2f}"))
    return _combine(5, "Y_N decay", parts)


def criterion_jensen(refs: ReferenceRuns) -> CriterionResult:
    parts = []
    for r in refs.all():
        w = r.recorder.jensen_worst
        parts.append((w <= JENSEN_TOL, f"beta={r.beta}: worst excursion {w:.1e}"))
    return _combine(6, "Jensen consistency", parts)


def criterion_convergence(levels: int = 4) -> CriterionResult:
    case = standard_case()
    space = convergence_study(case, levels, "space")
    time = convergence_study(case, levels, "time", n0=1024, dt0=case.t_end / 2)
    ps, pt = space[-1].order, time[-1].order
    return CriterionResult(7, "manufactured-solution convergence", ps >= 1.9 and pt >= 0.9,
                           f"spatial order {ps:.3f}, temporal order {pt:.3f}")


def oracle_setups():
    grid = Grid.for_problem(ProblemKind(Variant.CAUCHY, 16.0), n_cells=64)
    return [
        ("theta bump", 1.0, ProblemSetup(grid, *gaussian_bump("theta", 0.5))),
        ("v bump", 2.0, ProblemSetup(grid, *gaussian_bump("v", 0.5))),
    ]


def criterion_oracle(dt: float = 2.5e-4, ratio: float = 1e4, t_end: float = 0.1) -> CriterionResult:
    parts = []
    config = SchemeConfig(dt_initial=dt, dt_min=1e-12)
    for name, beta, setup in oracle_setups():
        d = oracle_compare(setup, GasParams(beta=beta), t_end, config, ratio)
        parts.append((d < 1e-4, f"{name} beta={beta}: {d:.2e}"))
    return _combine(8, "oracle equivalence", parts)


def criterion_cold_spot(t_end: float = 20.0) -> CriterionResult:
    grid = Grid.for_problem(ProblemKind(Variant.CAUCHY, 40.0), dx=0.05)
    setup = ProblemSetup(grid, *cold_spot(0.1, 1.0))
    params = GasParams(beta=2.5)
    rec = DiagnosticsRecorder(grid, params)
    late_rejections = []

    def on_step(state, report):
        if state.time > 1.0 and report.rejected_attempts:
            late_rejections.append(state.time)

    run(setup, params, SchemeConfig(), t_end, [rec], on_step=on_step)
    t, m = rec.column("t"), rec.column("inf_theta")
    after = m[t >= 1.0]
    increasing = bool(np.all(np.diff(after) > 0))
    ok = increasing and not late_rejections
    return CriterionResult(9, "degenerate-beta cold spot", ok,
                           f"min theta {m[0]:.3f} -> {m[-1]:.3f}, increasing after t=1: {increasing}, "
                           f"late rejections: {len(late_rejections)}")


def criterion_roots() -> CriterionResult:
    e0 = 1.0 - math.log(2.0)
    a1, a2 = jensen_roots(e0)
    ref1 = bisect(lambda y: y - math.log(y) - 1.0 - e0, 1e-6, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    ok = abs(a2 - 2.0) < ROOT_TOL and abs(a1 - ref1) < ROOT_TOL
    return CriterionResult(10, "root solver", ok, f"alpha1={a1:.12f} (oracle {ref1:.12f}), alpha2={a2:.12f}")


def run_all(refs: ReferenceRuns = None, echo=print) -> list[CriterionResult]:
    refs = refs or ReferenceRuns()
    checks = [
        criterion_equilibrium,
        lambda: criterion_energy(refs),
        lambda: criterion_bounds(refs),
        lambda: criterion_decay(refs),
        lambda: criterion_flux_decay(refs),
        lambda: criterion_jensen(refs),
        criterion_convergence,
        criterion_oracle,
        criterion_cold_spot,
        criterion_roots,
    ]
    results = []
    for check in checks:
        res = check()
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
