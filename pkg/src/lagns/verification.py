"""Manufactured-solution convergence, explicit-reference oracle and truncation studies."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import sympy as sp
from numba import njit

from .errors import LagnsError, OracleUnstable
from .gas import GasParams
from .grid import INSULATED_WALL, Grid, ProblemKind, State, Variant, apply_boundary
from .solver import ProblemSetup, SchemeConfig, run, stable_dt, step

_x, _t = sp.symbols("x t", real=True)


@dataclass
class ManufacturedCase:
    """Exact smooth fields on a closed box ``[0, length]`` with their source terms.

    ``u`` must vanish and ``theta`` must have zero slope at both walls, which
    are treated as impermeable and insulated. The expressions are sympy
    expressions in ``x`` and ``t``; the sources are the residuals of the
    three balance laws evaluated on them.
    """

    v: sp.Expr
    u: sp.Expr
    theta: sp.Expr
    params: GasParams
    length: float = 1.0
    t_end: float = 0.1
    name: str = "mms"
    _fns: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        p = self.params
        v, u, th = (sp.sympify(e) for e in (self.v, self.u, self.theta))
        ux = sp.diff(u, _x)
        s_mass = sp.diff(v, _t) - ux
        s_mom = sp.diff(u, _t) + sp.diff(p.R * th / v, _x) - sp.diff(p.mu_tilde * ux / v, _x)
        s_energy = (p.c_v * sp.diff(th, _t) + p.R * th * ux / v
                    - sp.diff(p.kappa_tilde * th ** p.beta * sp.diff(th, _x) / v, _x)
                    - p.mu_tilde * ux ** 2 / v)
        for name, expr in (("v", v), ("u", u), ("theta", th),
                           ("mass", s_mass), ("momentum", s_mom), ("energy", s_energy)):
            f = sp.lambdify((_x, _t), expr, "numpy")
            self._fns[name] = (lambda f: lambda x, t: np.broadcast_to(f(x, t), np.shape(x)).astype(float))(f)

    def exact(self, name, x, t):
        return self._fns[name](x, t)

    def mass(self, x, t):
        return self._fns["mass"](x, t)

    def momentum(self, x, t):
        return self._fns["momentum"](x, t)

    def energy(self, x, t):
        return self._fns["energy"](x, t)

    def grid(self, n_cells: int) -> Grid:
        pk = ProblemKind(Variant.HALF_LINE_INSULATED, self.length)
        return Grid.for_problem(pk, n_cells=n_cells, walls=(INSULATED_WALL, INSULATED_WALL))

    def initial_state(self, grid: Grid) -> State:
        s = State(0.0, self.exact("v", grid.centers, 0.0), self.exact("theta", grid.centers, 0.0),
                  self.exact("u", grid.edges, 0.0))
        return apply_boundary(s, grid)

    def error(self, state: State, grid: Grid) -> float:
        """Max over the three fields of the max-norm error at ``state.time``."""
        t = state.time
        return float(max(
            np.max(np.abs(state.v - self.exact("v", grid.centers, t))),
            np.max(np.abs(state.u - self.exact("u", grid.edges, t))),
            np.max(np.abs(state.theta - self.exact("theta", grid.centers, t))),
        ))


def equilibrium_case(params: GasParams, **kw) -> ManufacturedCase:
    return ManufacturedCase(sp.Integer(1), sp.Integer(0), sp.Integer(1), params, name="equilibrium", **kw)


def standard_case(params: GasParams = GasParams(beta=1.0), length: float = 1.0, t_end: float = 0.1) -> ManufacturedCase:
    k = sp.pi / length
    decay = sp.exp(-_t)
    return ManufacturedCase(
        1 + sp.Rational(1, 10) * sp.sin(k * _x) * decay,
        sp.Rational(1, 10) * sp.sin(k * _x) * decay,
        1 + sp.Rational(1, 10) * sp.cos(k * _x) * decay,
        params, length, t_end, name="standard",
    )


def alternate_case(params: GasParams = GasParams(beta=2.0), length: float = 1.0, t_end: float = 0.1) -> ManufacturedCase:
    k = sp.pi / length
    return ManufacturedCase(
        1 + sp.Rational(1, 5) * sp.cos(2 * k * _x) / (1 + _t),
        sp.Rational(1, 20) * sp.sin(2 * k * _x) * sp.cos(3 * _t),
        1 + sp.Rational(3, 20) * sp.cos(k * _x) * sp.exp(-_t / 2),
        params, length, t_end, name="alternate",
    )


def run_fixed_dt(case: ManufacturedCase, n_cells: int, dt: float, config: SchemeConfig = SchemeConfig()):
    """Integrate a manufactured case to ``case.t_end`` with a constant step."""
    grid = case.grid(n_cells)
    state = case.initial_state(grid)
    n_steps = max(1, int(round(case.t_end / dt)))
    dt = case.t_end / n_steps
    for _ in range(n_steps):
        state, _ = step(state, grid, case.params, config, dt=dt, sources=case)
    return state, grid


@dataclass(frozen=True)
class ConvergenceRow:
    level: int
    dx: float
    dt: float
    error: float
    order: float


def convergence_study(case: ManufacturedCase, levels: int = 4, mode: str = "space",
                      n0: int = 16, dt0: Optional[float] = None,
                      config: SchemeConfig = SchemeConfig()) -> list[ConvergenceRow]:
    """Refinement study against the exact manufactured fields.

    ``mode="space"`` halves ``dx`` and quarters ``dt`` per level, so that the
    first-order time error stays proportional to ``dx**2``. ``mode="time"``
    keeps ``n0`` cells and halves only ``dt``. The order of a level is
    ``log2(e_{k-1} / e_k)``; the first level reports nan.
    """
    if levels < 3:
        raise ValueError("levels must be >= 3")
    if mode not in ("space", "time"):
        raise ValueError(f"mode must be 'space' or 'time', got {mode!r}")
    if dt0 is None:
        dt0 = 0.5 * (case.length / n0) ** 2 if mode == "space" else case.t_end / 4
    rows = []
    for k in range(levels):
        n = n0 * 2 ** k if mode == "space" else n0
        dt = dt0 / 4 ** k if mode == "space" else dt0 / 2 ** k
        try:
            state, grid = run_fixed_dt(case, n, dt, config)
        except LagnsError as exc:
            raise type(exc)(f"level {k}: {exc}") from exc
        err = case.error(state, grid)
        order = float("nan")
        if rows and err > 0 and rows[-1].error > 0:
            order = math.log2(rows[-1].error / err)
        rows.append(ConvergenceRow(k, grid.dx, case.t_end / max(1, round(case.t_end / dt)), err, order))
    return rows


def write_convergence_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["level", "dx", "dt", "error", "order"])
        for r in rows:
            w.writerow([r.level, repr(r.dx), repr(r.dt), repr(r.error), repr(r.order)])


# --- explicit reference ----------------------------------------------------

_MODES = {"value": 0, "reflect": 1, "reconstruct": 2}


@njit(cache=True)
def _ghost(mode, value, inner):
    if mode == 0:
        return value
    if mode == 1:
        return inner
    return 2.0 * value - inner


def _wall_code(rule):
    # (theta mode, theta value, reflect v?, v value)
    reflect_v = rule.v_value is None
    return np.array([_MODES[rule.theta_mode], rule.theta_value,
                     1.0 if reflect_v else 0.0, 1.0 if reflect_v else rule.v_value])


@njit(cache=True)
def _explicit_march(v, u, th, dx, dt, n_steps, R, cv, mu, kap, beta, wl, wr):
    """Forward-Euler march of all three fields from the same old state."""
    n = v.size
    vn = np.empty(n)
    thn = np.empty(n)
    un = np.empty(n + 1)
    for _ in range(n_steps):
        vg0 = v[0] if wl[2] > 0 else wl[3]
        vg1 = v[n - 1] if wr[2] > 0 else wr[3]
        tg0 = _ghost(int(wl[0]), wl[1], th[0])
        tg1 = _ghost(int(wr[0]), wr[1], th[n - 1])
        for i in range(n):
            ux = (u[i + 1] - u[i]) / dx
            vn[i] = v[i] + dt * ux
            tl = th[i - 1] if i > 0 else tg0
            tr = th[i + 1] if i < n - 1 else tg1
            vl = v[i - 1] if i > 0 else vg0
            vr = v[i + 1] if i < n - 1 else vg1
            kl = kap * (0.5 * (tl + th[i])) ** beta * (vl + v[i]) / (2.0 * vl * v[i])
            kr = kap * (0.5 * (tr + th[i])) ** beta * (vr + v[i]) / (2.0 * vr * v[i])
            heat = (kr * (tr - th[i]) - kl * (th[i] - tl)) / (dx * dx)
            thn[i] = th[i] + dt / cv * (heat - R * th[i] * ux / v[i] + mu * ux * ux / v[i])
        un[0] = u[0]
        un[n] = u[n]
        for e in range(1, n):
            fl = mu * (u[e] - u[e - 1]) / (dx * v[e - 1])
            fr = mu * (u[e + 1] - u[e]) / (dx * v[e])
            dp = R * th[e] / v[e] - R * th[e - 1] / v[e - 1]
            un[e] = u[e] + dt * (fr - fl - dp) / dx
        for i in range(n):
            v[i] = vn[i]
            th[i] = thn[i]
        for e in range(n + 1):
            u[e] = un[e]
    return v, u, th


def explicit_reference(state: State, grid: Grid, params: GasParams, t_end: float, dt_ref: float) -> State:
    """Fully explicit integration of the same spatial discretization.

    Used only as an independent oracle; it is stable only for small
    ``dt_ref`` and raises OracleUnstable otherwise.
    """
    left, right = grid.boundary_rules
    n_steps = max(1, int(math.ceil(t_end / dt_ref - 1e-9)))
    dt = t_end / n_steps
    v, u, th = _explicit_march(state.v.copy(), state.u.copy(), state.theta.copy(), grid.dx, dt,
                               n_steps, params.R, params.c_v, params.mu_tilde,
                               params.kappa_tilde, params.beta, _wall_code(left), _wall_code(right))
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(th)) and np.all(np.isfinite(u))
            and np.all(v > 0) and np.all(th > 0)):
        raise OracleUnstable(f"explicit reference unstable with dt_ref={dt:g}")
    return apply_boundary(State(state.time + t_end, v, th, u), grid)


def max_discrepancy(a: State, b: State) -> float:
    return float(max(np.max(np.abs(a.v - b.v)), np.max(np.abs(a.u - b.u)),
                     np.max(np.abs(a.theta - b.theta))))


def oracle_compare(setup: ProblemSetup, params: GasParams, t_end: float,
                   config: SchemeConfig = SchemeConfig(dt_initial=1e-3, dt_min=1e-12),
                   ratio: float = 1e4) -> float:
    """Max-norm gap between the semi-implicit scheme and an explicit reference.

    The reference runs on the same grid with ``dt_ref = dt / ratio``, where
    ``dt`` is the production scheme's first step.
    """
    start = setup.initial_state()
    prod = run(setup, params, config, t_end, state=start)
    dt = min(config.dt_initial, stable_dt(start, setup.grid, params, config), t_end)
    ref = explicit_reference(start, setup.grid, params, t_end, dt / ratio)
    return max_discrepancy(prod, ref)


# --- truncation ------------------------------------------------------------

def truncation_study(make_setup: Callable[[float], ProblemSetup], params: GasParams,
                     lengths: Sequence[float], t_end: float,
                     config: SchemeConfig = SchemeConfig(), interior: Optional[tuple] = None):
    """Compare runs on windows of increasing length on a common interior.

    ``make_setup(L)`` builds the problem for truncation length ``L``; all
    grids must share ``dx``. The comparison window defaults to the smallest
    grid's window with a quarter trimmed from each artificial end. Returns
    ``[(L, discrepancy vs largest L), ...]`` for all but the largest L.
    """
    lengths = sorted(lengths)
    finals = []
    for L in lengths:
        setup = make_setup(L)
        finals.append((setup.grid, run(setup, params, config, t_end)))
    dxs = {round(g.dx, 12) for g, _ in finals}
    if len(dxs) != 1:
        raise ValueError("all truncation lengths must share dx")
    if interior is None:
        g0 = finals[0][0]
        lo, hi = g0.edges[0], g0.edges[-1]
        trim = 0.25 * (hi - lo)
        interior = (lo if g0.problem.variant is not Variant.CAUCHY else lo + trim, hi - trim)
    ref_grid, ref = finals[-1]

    def cut(grid, state):
        xc = grid.centers
        m = (xc > interior[0]) & (xc < interior[1])
        return np.concatenate((state.v[m], state.theta[m], state.u_centers()[m]))

    ref_vals = cut(ref_grid, ref)
    return [(L, float(np.max(np.abs(cut(g, s) - ref_vals)))) for L, (g, s) in zip(lengths[:-1], finals[:-1])]


def write_truncation_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["L", "discrepancy"])
        for L, d in rows:
            w.writerow([repr(float(L)), repr(d)])
