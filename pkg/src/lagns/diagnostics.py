"""Energy-entropy functional, dissipation, norms and decay observables.

All spatial functionals use the midpoint rule on the staggered layout:
centered quantities are weighted by ``dx`` per cell, edge quantities by
``dx`` per interior edge.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .gas import GasParams, entropy_potential, jensen_roots
from .grid import Grid, State
from .solver import edge_conductance

CSV_HEADER = ["t", "E", "V", "cumV", "inf_v", "sup_v", "inf_theta", "sup_theta",
              "L2_dev", "Linf_dev", "L2_grad", "sigma_N", "log_Y_N"]

UNIT_GAS = GasParams()


def energy_entropy(state: State, grid: Grid, params: GasParams = UNIT_GAS) -> float:
    """``int u^2/2 + R W(v) + c_v W(theta) dx`` with ``W(y) = y - ln y - 1``.

    The kinetic part is summed over edges, where ``u`` lives; the wall
    edges get half weight. With the default unit gas the weights drop out.
    """
    state.check_positive()
    u2 = state.u ** 2
    kinetic = 0.5 * grid.dx * (np.sum(u2[1:-1]) + 0.5 * (u2[0] + u2[-1]))
    pot = params.R * entropy_potential(state.v) + params.c_v * entropy_potential(state.theta)
    return float(kinetic + grid.dx * np.sum(pot))


def dissipation(state: State, grid: Grid, params: GasParams = UNIT_GAS) -> float:
    """Rate ``V = int kappa theta_x^2 / (v theta^2) + mu u_x^2 / (v theta) dx``.

    The heat term lives on edges (wall edges included, using the ghost
    cells) with ``theta^2`` replaced by the product of the neighbours; the
    viscous term uses the exact cell-centered ``u_x``.
    """
    state.check_positive()
    dx = grid.dx
    th = state.theta_ext()
    cond = edge_conductance(state.theta, state.v, grid, params)
    grad = np.diff(th) / dx
    heat = cond * grad ** 2 / (th[:-1] * th[1:])
    ux = np.diff(state.u) / dx
    visc = params.mu_tilde * ux ** 2 / (state.v * state.theta)
    return float(dx * (np.sum(heat) + np.sum(visc)))


def deviation_norms(state: State, grid: Grid, p_list: Sequence[float] = (2, math.inf)) -> dict:
    """Joint ``L^p`` norms of ``(v-1, u, theta-1)`` and the ``L^2`` norm of the gradients.

    Returns ``{"L<p>": value, ..., "L2_grad": value}``; ``p = inf`` is keyed
    ``"Linf"``. ``u`` is averaged to centers so all three fields share cells.
    """
    fields = (state.v - 1.0, state.u_centers(), state.theta - 1.0)
    out = {}
    for p in p_list:
        if not p >= 1:
            raise DomainError(f"p must be >= 1, got {p!r}")
        if math.isinf(p):
            out["Linf"] = float(max(np.max(np.abs(f)) for f in fields))
        else:
            total = sum(np.sum(np.abs(f) ** p) for f in fields) * grid.dx
            out[f"L{p:g}"] = float(total ** (1.0 / p))
    grads = [np.gradient(f, grid.dx) for f in (state.v, state.u_centers(), state.theta)]
    out["L2_grad"] = float(math.sqrt(grid.dx * sum(np.sum(g * g) for g in grads)))
    return out


def unit_mass_averages(state: State, grid: Grid):
    """Averages of ``v`` and ``theta`` over consecutive unit-mass windows ``[N, N+1]``.

    Only windows fully inside the grid are used; each must contain a whole
    number of cells.
    """
    per = int(round(1.0 / grid.dx))
    if per < 1 or abs(per * grid.dx - 1.0) > 1e-9:
        raise DomainError("unit-mass averages need 1/dx to be an integer")
    x0 = grid.x_left
    start = int(round((math.ceil(x0 - 1e-9) - x0) / grid.dx))
    count = (grid.n_cells - start) // per
    sl = slice(start, start + count * per)
    v = state.v[sl].reshape(count, per).mean(axis=1)
    th = state.theta[sl].reshape(count, per).mean(axis=1)
    return v, th


def jensen_violation(state: State, grid: Grid, params: GasParams = UNIT_GAS) -> float:
    """Largest distance by which a unit-mass average leaves ``[alpha1, alpha2]``.

    The roots are computed from the current energy-entropy value divided by
    the weight of the corresponding potential (``R`` for ``v``, ``c_v`` for
    ``theta``). Zero means every average is inside its bracket.
    """
    e = energy_entropy(state, grid, params)
    vbar, thbar = unit_mass_averages(state, grid)
    worst = 0.0
    for avg, weight in ((vbar, params.R), (thbar, params.c_v)):
        a1, a2 = jensen_roots(e / weight)
        worst = max(worst, float(np.max(a1 - avg, initial=0.0)), float(np.max(avg - a2, initial=0.0)))
    return worst


@dataclass
class DiagnosticsRecord:
    time: float
    energy_entropy: float
    dissipation_V: float
    e0: float
    inf_v: float
    sup_v: float
    inf_theta: float
    sup_theta: float
    norm_Lp_dev: dict
    norm_L2_grad: float
    cum_dissipation: float
    sigma_N: float = float("nan")
    log_Y_N: float = float("nan")

    def csv_row(self) -> list:
        return [self.time, self.energy_entropy, self.dissipation_V, self.cum_dissipation,
                self.inf_v, self.sup_v, self.inf_theta, self.sup_theta,
                self.norm_Lp_dev.get("L2", float("nan")), self.norm_Lp_dev.get("Linf", float("nan")),
                self.norm_L2_grad, self.sigma_N, self.log_Y_N]


@dataclass
class FluxDecayRecord:
    """Running record of the effective flux ``sigma = (u_x - theta)/v`` at cell ``N``.

    ``log_Y_N`` is the trapezoid-rule time integral of ``sigma_N``;
    ``D_N_at_x`` is ``v0(x) exp(int_N^x (u - u0) dy)`` at ``probe_x``.
    """

    N: int
    probe_x: float
    v0: np.ndarray
    u0: np.ndarray
    time: Optional[float] = None
    sigma_N: float = float("nan")
    log_Y_N: float = 0.0
    D_N_at_x: float = float("nan")


def sigma_at(state: State, grid: Grid, N: int) -> float:
    ux = (state.u[N + 1] - state.u[N]) / grid.dx
    return float((ux - state.theta[N]) / state.v[N])


def flux_decay_probe(state: State, grid: Grid, params: GasParams, N: int,
                     accum: FluxDecayRecord) -> FluxDecayRecord:
    """Fold ``state`` into ``accum`` and return the updated record."""
    if not 0 <= N < grid.n_cells:
        raise DomainError(f"cell index N={N} out of range")
    sigma = sigma_at(state, grid, N)
    log_y = accum.log_Y_N
    if accum.time is not None:
        log_y += 0.5 * (state.time - accum.time) * (sigma + accum.sigma_N)
    # int_N^x (u - u0) dy with u averaged to centers and summed over whole cells
    j = grid.cell_index(accum.probe_x)
    du = state.u_centers() - 0.5 * (accum.u0[:-1] + accum.u0[1:])
    if j >= N:
        integral = grid.dx * float(np.sum(du[N:j]))
    else:
        integral = -grid.dx * float(np.sum(du[j:N]))
    d_n = float(accum.v0[j] * math.exp(integral))
    return FluxDecayRecord(N, accum.probe_x, accum.v0, accum.u0, state.time, sigma, log_y, d_n)


@dataclass(frozen=True)
class BoundSummary:
    min_inf_v: float
    max_sup_v: float
    min_inf_theta: float
    max_sup_theta: float


def bound_monitor(records) -> BoundSummary:
    """Running extrema of the field bounds over a whole record stream."""
    records = list(records)
    if not records:
        raise DomainError("bound_monitor needs at least one record")
    return BoundSummary(
        min(r.inf_v for r in records),
        max(r.sup_v for r in records),
        min(r.inf_theta for r in records),
        max(r.sup_theta for r in records),
    )


class DiagnosticsRecorder:
    """Observer that turns states into :class:`DiagnosticsRecord` rows.

    Keeps the running time integral of ``V`` and the flux-decay record, and
    optionally streams rows to a CSV file.
    """

    def __init__(self, grid: Grid, params: GasParams, p_list=(2, math.inf), probe_N=None,
                 probe_x=None, csv_path=None, jensen_check=False):
        self.grid = grid
        self.params = params
        self.p_list = tuple(p_list)
        self.probe_N = grid.n_cells // 2 if probe_N is None else int(probe_N)
        if not 0 <= self.probe_N < grid.n_cells:
            raise DomainError(f"probe cell {self.probe_N} out of range")
        self.probe_x = probe_x
        self.records: list[DiagnosticsRecord] = []
        self.flux: Optional[FluxDecayRecord] = None
        self.jensen_check = jensen_check
        self.jensen_worst = 0.0
        self._csv_path = csv_path
        self._fh = None
        self._writer = None

    def __call__(self, state: State):
        grid, params = self.grid, self.params
        E = energy_entropy(state, grid, params)
        V = dissipation(state, grid, params)
        if not self.records:
            e0, cum = E, 0.0
            px = self.probe_x
            if px is None:
                px = grid.centers[min(self.probe_N + int(round(1.0 / grid.dx)), grid.n_cells - 1)]
            self.flux = FluxDecayRecord(self.probe_N, px, state.v.copy(), state.u.copy())
        else:
            prev = self.records[-1]
            e0 = prev.e0
            # right-endpoint rule: the implicit scheme dissipates at the new time level
            cum = prev.cum_dissipation + (state.time - prev.time) * V
        self.flux = flux_decay_probe(state, grid, params, self.probe_N, self.flux)
        norms = deviation_norms(state, grid, self.p_list)
        grad = norms.pop("L2_grad")
        rec = DiagnosticsRecord(
            state.time, E, V, e0,
            float(np.min(state.v)), float(np.max(state.v)),
            float(np.min(state.theta)), float(np.max(state.theta)),
            norms, grad, cum, self.flux.sigma_N, self.flux.log_Y_N,
        )
        self.records.append(rec)
        if self.jensen_check:
            self.jensen_worst = max(self.jensen_worst, jensen_violation(state, grid, params))
        if self._csv_path is not None:
            self._write(rec)
        return rec

    def _write(self, rec):
        if self._fh is None:
            self._fh = open(self._csv_path, "w", newline="")
            self._writer = csv.writer(self._fh)
            self._writer.writerow(CSV_HEADER)
        self._writer.writerow([repr(float(x)) for x in rec.csv_row()])

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def column(self, name: str) -> np.ndarray:
        """One CSV column over all records, e.g. ``column("E")``."""
        i = CSV_HEADER.index(name)
        return np.array([r.csv_row()[i] for r in self.records])

    def summary(self) -> BoundSummary:
        return bound_monitor(self.records)


def read_diagnostics(path) -> dict[str, np.ndarray]:
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {k: np.atleast_1d(data[k]) for k in data.dtype.names}
