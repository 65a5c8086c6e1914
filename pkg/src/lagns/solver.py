"""Semi-implicit time stepping for the Lagrangian Navier-Stokes system.

One step performs, in order:

(a) the mass update ``v += dt * u_x`` (exact per cell on the staggered mesh),
(b) an implicit viscous momentum solve with pressure ``P(v_new, theta_old)``,
(c) an implicit temperature solve with lagged conductivity, refreshed
    ``max_newton_lag`` times,
(d) boundary re-application.

Each implicit solve is tridiagonal and is written in increment form so that
the equilibrium state is reproduced exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError, SolverBreakdown, StepFailure
from .gas import GasParams, sound_speed
from .grid import Grid, ProblemKind, State, apply_boundary, build_initial_state
from .tridiag import solve_tridiagonal

log = logging.getLogger(__name__)

_WALL_WEIGHT = {"value": 1.0, "reflect": 0.0, "reconstruct": 2.0}


@dataclass(frozen=True)
class SchemeConfig:
    dt_initial: float = 0.1
    cfl_safety: float = 0.5
    dt_min: float = 1e-10
    max_newton_lag: int = 2
    positivity_floor: float = 1e-10
    max_rejections: int = 60

    def __post_init__(self):
        if not (self.dt_initial > 0 and self.dt_min > 0 and self.dt_min <= self.dt_initial):
            raise DomainError("need 0 < dt_min <= dt_initial")
        if not 0 < self.cfl_safety <= 1:
            raise DomainError("cfl_safety must lie in (0, 1]")
        if self.max_newton_lag < 0 or int(self.max_newton_lag) != self.max_newton_lag:
            raise DomainError("max_newton_lag must be a nonnegative integer")
        if not self.positivity_floor > 0:
            raise DomainError("positivity_floor must be > 0")


@dataclass(frozen=True)
class StepReport:
    dt_used: float
    rejected_attempts: int
    max_flux_residual: float


@dataclass(frozen=True)
class ProblemSetup:
    """A problem variant on a concrete grid together with its initial profiles."""

    grid: Grid
    v0: Callable
    u0: Callable
    theta0: Callable

    @property
    def problem(self) -> ProblemKind:
        return self.grid.problem

    def initial_state(self) -> State:
        return build_initial_state(self.grid, self.v0, self.u0, self.theta0)


class _Rejected(Exception):
    pass


def harmonic_mean(a, b):
    return 2.0 * a * b / (a + b)


def stable_dt(state: State, grid: Grid, params: GasParams, config: SchemeConfig) -> float:
    """Acoustic CFL bound ``cfl_safety * dx / max(c)``.

    Diffusion is treated implicitly and does not restrict the step.
    """
    c = sound_speed(params, state.v, state.theta)
    return float(config.cfl_safety * grid.dx / np.max(c))


def viscous_flux(u, v, dx, mu):
    """``mu * u_x / v`` at cell centers."""
    return mu * np.diff(u) / (dx * v)


def momentum_residual(u_new, u_old, v_new, theta_old, grid, params, dt, source=None):
    """Max residual of the discrete momentum equation over interior edges."""
    dx = grid.dx
    flux = viscous_flux(u_new, v_new, dx, params.mu_tilde)
    p = params.R * theta_old / v_new
    rhs = (np.diff(flux) - np.diff(p)) / dx
    if source is not None:
        rhs = rhs + source
    r = u_new[1:-1] - u_old[1:-1] - dt * rhs
    return float(np.max(np.abs(r))) if r.size else 0.0


def momentum_substep(u_old, v_new, theta_old, grid, params, dt, source=None):
    """Implicit viscous velocity update on interior edges; wall velocities are kept."""
    dx, mu = grid.dx, params.mu_tilde
    flux = viscous_flux(u_old, v_new, dx, mu)
    p = params.R * theta_old / v_new
    rhs = dt * (np.diff(flux) - np.diff(p)) / dx
    if source is not None:
        rhs = rhs + dt * source
    w = mu * dt / (dx * dx * v_new)  # coupling weight per cell
    left, right = w[:-1], w[1:]
    du = solve_tridiagonal(-left, 1.0 + left + right, -right, rhs)
    u_new = u_old.copy()
    u_new[1:-1] += du
    return u_new


def edge_conductance(theta_lag, v, grid, params):
    """Heat conductance ``kappa(theta_e) / v_e`` on all ``n+1`` edges (walls included).

    ``theta_e`` is the arithmetic mean of the adjacent lagged temperatures and
    ``v_e`` the harmonic mean of the adjacent specific volumes.
    """
    left, right = grid.boundary_rules
    th = np.concatenate(([left.theta_ghost(theta_lag[0])], theta_lag, [right.theta_ghost(theta_lag[-1])]))
    vv = np.concatenate(([left.v_ghost(v[0])], v, [right.v_ghost(v[-1])]))
    th_e = 0.5 * (th[:-1] + th[1:])
    if np.any(th_e <= 0):
        raise _Rejected("non-positive edge temperature")
    return params.kappa_tilde * th_e ** params.beta / harmonic_mean(vv[:-1], vv[1:])


def heat_divergence(theta, cond, grid):
    """``(cond * theta_x)_x`` at centers using the wall ghost rules."""
    left, right = grid.boundary_rules
    th = np.concatenate(([left.theta_ghost(theta[0])], theta, [right.theta_ghost(theta[-1])]))
    q = cond * np.diff(th) / grid.dx
    return np.diff(q) / grid.dx


def temperature_substep(theta_old, theta_lag, v_new, u_new, grid, params, dt, source=None):
    """One implicit temperature solve with conductivity frozen at ``theta_lag``.

    Solves ``c_v (theta - theta_old) + dt R theta u_x / v
    = dt [(kappa(theta_lag) theta_x / v)_x + mu u_x^2 / v + source]``.
    """
    dx = grid.dx
    left, right = grid.boundary_rules
    ux = np.diff(u_new) / dx
    cond = edge_conductance(theta_lag, v_new, grid, params)
    s = dt / (params.c_v * dx * dx)
    k = s * cond
    rhs = heat_divergence(theta_old, cond, grid) - params.R * theta_old * ux / v_new
    rhs += params.mu_tilde * ux * ux / v_new
    if source is not None:
        rhs = rhs + source
    rhs *= dt / params.c_v
    diag = 1.0 + dt * params.R * ux / (params.c_v * v_new) + k[:-1] + k[1:]
    # wall edges: ghost cells depend on the unknown per the wall rule
    diag[0] += k[0] * (_WALL_WEIGHT[left.theta_mode] - 1.0)
    diag[-1] += k[-1] * (_WALL_WEIGHT[right.theta_mode] - 1.0)
    lower = np.concatenate(([0.0], -k[1:-1]))
    upper = np.concatenate((-k[1:-1], [0.0]))
    return theta_old + solve_tridiagonal(lower, diag, upper, rhs)


def _attempt(state, grid, params, config, dt, sources):
    dx, floor = grid.dx, config.positivity_floor
    t_old, t_new = state.time, state.time + dt
    xc, xe = grid.centers, grid.edges

    rate = np.diff(state.u) / dx
    if sources is not None:
        rate = rate + sources.mass(xc, t_old)
    v_new = state.v + dt * rate
    if np.min(v_new) < floor:
        raise _Rejected("v below floor")

    su = sources.momentum(xe[1:-1], t_new) if sources is not None else None
    u_new = momentum_substep(state.u, v_new, state.theta, grid, params, dt, su)

    se = sources.energy(xc, t_new) if sources is not None else None
    theta_lag = state.theta
    for _ in range(config.max_newton_lag + 1):
        theta_new = temperature_substep(state.theta, theta_lag, v_new, u_new, grid, params, dt, se)
        if np.min(theta_new) < floor:
            raise _Rejected("theta below floor")
        theta_lag = theta_new

    resid = momentum_residual(u_new, state.u, v_new, state.theta, grid, params, dt, su)
    new = replace(state, time=t_new, v=v_new, theta=theta_new, u=u_new)
    return apply_boundary(new, grid), resid


def step(state: State, grid: Grid, params: GasParams, config: SchemeConfig,
         dt: Optional[float] = None, dt_max: Optional[float] = None, sources=None):
    """Advance ``state`` by one accepted step.

    ``dt`` defaults to ``min(config.dt_initial, stable_dt)``; ``dt_max`` caps
    it (used to land on an end time). An attempt that drives ``v`` or
    ``theta`` below ``config.positivity_floor`` is retried with half the
    step. ``sources`` is an optional object with ``mass``, ``momentum`` and
    ``energy`` methods ``f(x, t)`` added to the right-hand sides.

    Returns ``(new_state, StepReport)``.
    """
    if dt is None:
        dt = min(config.dt_initial, stable_dt(state, grid, params, config))
    if dt_max is not None:
        dt = min(dt, dt_max)
    rejected = 0
    while True:
        try:
            new, resid = _attempt(state, grid, params, config, dt, sources)
            return new, StepReport(dt, rejected, resid)
        except _Rejected as exc:
            rejected += 1
            dt *= 0.5
            log.debug("step rejected at t=%g (%s); retrying with dt=%g", state.time, exc, dt)
            if dt < config.dt_min or rejected > config.max_rejections:
                raise StepFailure(
                    f"time step underflow at t={state.time:g}: dt={dt:g} < dt_min={config.dt_min:g}",
                    state,
                ) from None
        except SolverBreakdown as exc:
            raise SolverBreakdown(f"{exc} at t={state.time:g}", state) from None


def run(setup: ProblemSetup, params: GasParams, config: SchemeConfig, t_end: float,
        observers: Sequence[Callable] = (), cadence: int = 1, sources=None,
        on_step: Optional[Callable] = None, state: Optional[State] = None,
        checkpoints: Iterable[float] = (), on_checkpoint: Optional[Callable] = None) -> State:
    """Integrate from the initial state to ``t_end``.

    Each observer is called as ``obs(state)`` on the initial state, every
    ``cadence`` accepted steps, and on the final state. ``on_step(state,
    report)`` is called after every accepted step. The integrator lands
    exactly on every time in ``checkpoints`` and calls
    ``on_checkpoint(state)`` there. Failures re-raise with the last valid
    state attached.
    """
    if not t_end >= 0:
        raise DomainError("t_end must be >= 0")
    grid = setup.grid
    if state is None:
        state = setup.initial_state()
    for obs in observers:
        obs(state)
    eps = 1e-12 * max(1.0, t_end)
    stops = sorted(t for t in set(checkpoints) if state.time + eps < t < t_end - eps) + [t_end]
    n = 0
    last_observed = 0
    while t_end - state.time > eps:
        target = stops[0]
        try:
            new, report = step(state, grid, params, config, dt_max=target - state.time, sources=sources)
        except (StepFailure, SolverBreakdown) as exc:
            exc.state = state
            raise
        if target - new.time <= eps:
            new.time = target
            stops.pop(0)
            if on_checkpoint is not None and target < t_end:
                on_checkpoint(new)
        state = new
        n += 1
        if on_step is not None:
            on_step(state, report)
        if n % cadence == 0:
            last_observed = n
            for obs in observers:
                obs(state)
    if n and last_observed != n:
        for obs in observers:
            obs(state)
    return state
