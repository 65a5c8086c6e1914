"""Lagrangian mass mesh, staggered state layout and boundary handling.

``v`` and ``theta`` live at cell centers, ``u`` at cell edges. The unbounded
problems are truncated to a finite mass window whose artificial ends carry
the far-field state ``(v, u, theta) = (1, 0, 1)``.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, IncompatibleData, InvalidInitialData

FAR_FIELD = (1.0, 0.0, 1.0)
COMPAT_TOL = 1e-8


class Variant(str, enum.Enum):
    CAUCHY = "cauchy"
    HALF_LINE_INSULATED = "insulated"
    HALF_LINE_ISOTHERMAL = "isothermal"


@dataclass(frozen=True)
class ProblemKind:
    variant: Variant
    truncation_length: float

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not self.truncation_length > 0:
            raise DomainError("truncation_length must be > 0")

    @property
    def window(self) -> tuple[float, float]:
        L = self.truncation_length
        if self.variant is Variant.CAUCHY:
            return -0.5 * L, 0.5 * L
        return 0.0, L


@dataclass(frozen=True)
class WallRule:
    """Boundary treatment at one end of the window.

    ``theta_mode`` is one of ``"value"`` (ghost cell holds ``theta_value``),
    ``"reflect"`` (zero-gradient ghost) or ``"reconstruct"`` (ghost chosen so
    the arithmetic mean across the wall equals ``theta_value``). ``v_value``
    of None reflects ``v`` into the ghost cell.
    """

    theta_mode: str
    theta_value: float = 1.0
    v_value: Optional[float] = 1.0
    u_value: float = 0.0

    def theta_ghost(self, inner: float) -> float:
        if self.theta_mode == "value":
            return self.theta_value
        if self.theta_mode == "reflect":
            return inner
        if self.theta_mode == "reconstruct":
            return 2.0 * self.theta_value - inner
        raise DomainError(f"unknown theta_mode {self.theta_mode!r}")

    def v_ghost(self, inner: float) -> float:
        return inner if self.v_value is None else self.v_value


FAR_FIELD_WALL = WallRule("value", 1.0, 1.0, 0.0)
INSULATED_WALL = WallRule("reflect", v_value=None)
ISOTHERMAL_WALL = WallRule("reconstruct", 1.0, v_value=None)


@dataclass(frozen=True)
class Grid:
    """Uniform mass mesh; cell ``i`` spans ``[x_left + i dx, x_left + (i+1) dx]``."""

    n_cells: int
    dx: float
    x_left: float
    problem: ProblemKind
    walls: Optional[tuple[WallRule, WallRule]] = None

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 4:
            raise DomainError("n_cells must be an integer >= 4")
        if not self.dx > 0:
            raise DomainError("dx must be > 0")

    @classmethod
    def for_problem(cls, problem: ProblemKind, n_cells: int = None, dx: float = None, walls=None) -> "Grid":
        """Cover the problem's window with either ``n_cells`` cells or cells of width ``dx``."""
        lo, hi = problem.window
        if (n_cells is None) == (dx is None):
            raise DomainError("give exactly one of n_cells or dx")
        if n_cells is None:
            n_cells = int(round((hi - lo) / dx))
            if abs(n_cells * dx - (hi - lo)) > 1e-9 * (hi - lo):
                raise DomainError("dx does not divide the truncation length")
        return cls(int(n_cells), (hi - lo) / n_cells, lo, problem, walls)

    @property
    def length(self) -> float:
        return self.n_cells * self.dx

    @property
    def centers(self) -> np.ndarray:
        return self.x_left + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.x_left + np.arange(self.n_cells + 1) * self.dx

    @property
    def boundary_rules(self) -> tuple[WallRule, WallRule]:
        if self.walls is not None:
            return self.walls
        variant = self.problem.variant
        if variant is Variant.CAUCHY:
            return FAR_FIELD_WALL, FAR_FIELD_WALL
        if variant is Variant.HALF_LINE_INSULATED:
            return INSULATED_WALL, FAR_FIELD_WALL
        return ISOTHERMAL_WALL, FAR_FIELD_WALL

    def cell_index(self, x: float) -> int:
        i = int(np.floor((x - self.x_left) / self.dx))
        if not 0 <= i < self.n_cells:
            raise DomainError(f"x={x} lies outside the window")
        return i


@dataclass
class State:
    """Staggered discrete fields at one instant.

    ``ghost_v`` and ``ghost_theta`` hold the (left, right) ghost-cell values
    written by :func:`apply_boundary`.
    """

    time: float
    v: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    ghost_v: tuple[float, float] = (1.0, 1.0)
    ghost_theta: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.v.shape != self.theta.shape or self.u.shape != (self.v.size + 1,):
            raise DomainError("inconsistent state array lengths")

    def copy(self) -> "State":
        return replace(self, v=self.v.copy(), theta=self.theta.copy(), u=self.u.copy())

    def check_positive(self):
        if not (np.all(self.v > 0) and np.all(self.theta > 0)):
            raise DomainError("state violates positivity of v or theta")

    def v_ext(self) -> np.ndarray:
        return np.concatenate(([self.ghost_v[0]], self.v, [self.ghost_v[1]]))

    def theta_ext(self) -> np.ndarray:
        return np.concatenate(([self.ghost_theta[0]], self.theta, [self.ghost_theta[1]]))

    def u_centers(self) -> np.ndarray:
        return 0.5 * (self.u[:-1] + self.u[1:])


def apply_boundary(state: State, grid: Grid) -> State:
    """Return a copy of ``state`` with wall velocities and ghost cells set."""
    left, right = grid.boundary_rules
    out = state.copy()
    out.u[0] = left.u_value
    out.u[-1] = right.u_value
    out.ghost_v = (left.v_ghost(out.v[0]), right.v_ghost(out.v[-1]))
    out.ghost_theta = (left.theta_ghost(out.theta[0]), right.theta_ghost(out.theta[-1]))
    return out


def _sample(f, x):
    return np.broadcast_to(np.asarray(f(x), dtype=float), x.shape).copy()


def build_initial_state(grid: Grid, v0: Callable, u0: Callable, theta0: Callable) -> State:
    """Sample the initial profiles on the staggered grid and validate them.

    The profiles are vectorised callables of the mass coordinate. Positivity
    is checked at every center and edge; far-field values are checked at the
    artificial window ends and the wall conditions at ``x = 0`` for the
    half-line problems.
    """
    xc, xe = grid.centers, grid.edges
    v, theta, u = _sample(v0, xc), _sample(theta0, xc), _sample(u0, xe)
    for name, f in (("v0", v0), ("theta0", theta0)):
        if not (np.all(_sample(f, xc) > 0) and np.all(_sample(f, xe) > 0)):
            raise InvalidInitialData(f"{name} must be strictly positive on the grid")

    lo, hi = xe[0], xe[-1]
    far_ends = [hi] if grid.problem.variant is not Variant.CAUCHY else [lo, hi]
    if grid.walls is not None:
        far_ends = [x for x, w in zip((lo, hi), grid.walls) if w == FAR_FIELD_WALL]
    for x in far_ends:
        pt = np.array([x])
        for name, f, target in (("v0", v0, 1.0), ("u0", u0, 0.0), ("theta0", theta0, 1.0)):
            val = float(_sample(f, pt)[0])
            if abs(val - target) >= COMPAT_TOL:
                raise IncompatibleData(
                    f"far-field condition violated: {name}({x:g}) = {val:.10g}, expected {target:g}"
                )
    if grid.walls is None and grid.problem.variant is not Variant.CAUCHY:
        pt = np.array([lo])
        if abs(float(_sample(u0, pt)[0])) >= COMPAT_TOL:
            raise IncompatibleData("wall condition violated: u0(0) must be 0")
        if grid.problem.variant is Variant.HALF_LINE_ISOTHERMAL:
            th = float(_sample(theta0, pt)[0])
            if abs(th - 1.0) >= COMPAT_TOL:
                raise IncompatibleData(f"wall condition violated: theta0(0) = {th:.10g}, expected 1")
    return apply_boundary(State(0.0, v, theta, u), grid)


def write_snapshot(path, state: State, grid: Grid):
    """Write ``x,v,u,theta`` rows at cell centers (``u`` averaged from edges)."""
    uc = state.u_centers()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "v", "u", "theta"])
        for row in zip(grid.centers, state.v, uc, state.theta):
            w.writerow([repr(float(c)) for c in row])


def read_snapshot(path) -> dict[str, np.ndarray]:
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {k: np.atleast_1d(data[k]) for k in data.dtype.names}
