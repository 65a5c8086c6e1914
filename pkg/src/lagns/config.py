"""Flat ``section.key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment. Unknown keys are errors.
See ``DEFAULTS`` for every accepted key and its default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError, LagnsError
from .gas import GasParams
from .grid import Grid, ProblemKind, Variant
from .profiles import BUILTINS, build
from .solver import ProblemSetup, SchemeConfig


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _float_list(s):
    return tuple(float(tok) for tok in s.split(",") if tok.strip())


# key -> (converter, default); None means "unset"
DEFAULTS = {
    "problem.variant": (str, "cauchy"),
    "problem.length": (float, 80.0),
    "grid.dx": (float, 0.05),
    "grid.n_cells": (int, None),
    "gas.R": (float, 1.0),
    "gas.c_v": (float, 1.0),
    "gas.mu": (float, 1.0),
    "gas.kappa": (float, 1.0),
    "gas.beta": (float, 1.0),
    "gas.gamma": (float, 0.0),
    "initial.profile": (str, "equilibrium"),
    "initial.field": (str, None),
    "initial.amplitude": (float, None),
    "initial.width": (float, None),
    "initial.center": (float, None),
    "initial.theta_min": (float, None),
    "initial.v_amplitude": (float, None),
    "initial.theta_amplitude": (float, None),
    "initial.u_amplitude": (float, None),
    "scheme.dt_initial": (float, 0.1),
    "scheme.cfl_safety": (float, 0.5),
    "scheme.dt_min": (float, 1e-10),
    "scheme.max_newton_lag": (int, 2),
    "scheme.positivity_floor": (float, 1e-10),
    "run.t_end": (float, 10.0),
    "run.cadence": (int, 1),
    "run.output_dir": (str, "out"),
    "run.p_list": (_float_list, (2.0, math.inf)),
    "run.probe_N": (int, None),
    "run.snapshots": (_bool, True),
    "run.figures": (_bool, True),
    "verify.case": (str, "standard"),
    "verify.levels": (int, 4),
    "verify.n0": (int, 16),
    "verify.time_cells": (int, 1024),
    "verify.t_end": (float, 0.1),
    "verify.oracle_dt": (float, 2.5e-4),
    "verify.oracle_ratio": (float, 1e4),
    "verify.lengths": (_float_list, (20.0, 40.0, 80.0)),
}


@dataclass
class RunConfig:
    problem: ProblemKind
    dx: float
    n_cells: Optional[int]
    gas: GasParams
    profile: str
    profile_args: dict
    scheme: SchemeConfig
    t_end: float
    cadence: int
    output_dir: str
    p_list: tuple
    probe_N: Optional[int]
    snapshots: bool = True
    figures: bool = True
    verify: dict = field(default_factory=dict)

    def grid(self, length: Optional[float] = None) -> Grid:
        problem = self.problem if length is None else ProblemKind(self.problem.variant, length)
        if self.n_cells is not None and length is None:
            return Grid.for_problem(problem, n_cells=self.n_cells)
        return Grid.for_problem(problem, dx=self.dx)

    def setup(self, length: Optional[float] = None) -> ProblemSetup:
        grid = self.grid(length)
        args = dict(self.profile_args)
        if "center" in BUILTINS[self.profile][1] and "center" not in args:
            lo, hi = grid.problem.window
            args["center"] = 0.5 * (lo + hi)
        return ProblemSetup(grid, *build(self.profile, **args))


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration text."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        conv = DEFAULTS[key][0]
        try:
            values[key] = conv(val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return _validate(values)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _validate(values: dict) -> RunConfig:
    cfg = {k: values.get(k, d) for k, (_, d) in DEFAULTS.items()}

    def need(key, ok, constraint):
        if not ok:
            raise ConfigError(f"{key}: {constraint}, got {cfg[key]!r}")

    try:
        variant = Variant(cfg["problem.variant"])
    except ValueError:
        raise ConfigError(
            f"problem.variant: must be one of {[v.value for v in Variant]}, got {cfg['problem.variant']!r}"
        ) from None
    need("problem.length", cfg["problem.length"] > 0, "must be > 0")
    need("grid.dx", cfg["grid.dx"] > 0, "must be > 0")
    if cfg["grid.n_cells"] is not None:
        need("grid.n_cells", cfg["grid.n_cells"] >= 4, "must be >= 4")
    beta = cfg["gas.beta"]
    need("gas.beta", beta >= 0, "beta must be >= 0 (and > 0 for runs)")
    need("gas.beta", beta > 0, "beta must be > 0 for runs (global existence needs beta > 0)")
    need("gas.gamma", cfg["gas.gamma"] == 0, "gamma must be 0")
    for key in ("gas.R", "gas.c_v", "gas.mu", "gas.kappa"):
        need(key, cfg[key] > 0, "must be > 0")

    profile = cfg["initial.profile"]
    need("initial.profile", profile in BUILTINS, f"must be one of {sorted(BUILTINS)}")
    allowed = BUILTINS[profile][1]
    profile_args = {}
    for key in DEFAULTS:
        if key.startswith("initial.") and key != "initial.profile" and key in values:
            name = key.split(".", 1)[1]
            if name not in allowed:
                raise ConfigError(f"{key}: not an argument of profile {profile!r} (accepts {list(allowed)})")
            profile_args[name] = values[key]
    if "width" in profile_args:
        need("initial.width", profile_args["width"] > 0, "must be > 0")
    if "theta_min" in profile_args:
        need("initial.theta_min", 0 < profile_args["theta_min"] < 1, "must lie in (0, 1)")
    if "field" in profile_args:
        need("initial.field", profile_args["field"] in ("v", "u", "theta"), "must be v, u or theta")
    if profile == "gaussian-bump" and profile_args.get("field", "theta") in ("v", "theta"):
        need("initial.amplitude", profile_args.get("amplitude", 0.5) > -1, "must keep the field positive (> -1)")
    if profile == "large-data-composite":
        need("initial.v_amplitude", profile_args.get("v_amplitude", 0.8) > -1, "must keep v positive (> -1)")
        need("initial.theta_amplitude", profile_args.get("theta_amplitude", 0.5) < 1,
             "must keep theta positive (< 1)")

    need("run.t_end", cfg["run.t_end"] >= 0, "must be >= 0")
    need("run.cadence", cfg["run.cadence"] >= 1, "must be >= 1")
    need("run.p_list", all(p >= 1 for p in cfg["run.p_list"]) and cfg["run.p_list"], "exponents must be >= 1")
    need("verify.levels", cfg["verify.levels"] >= 3, "must be >= 3")
    need("verify.case", cfg["verify.case"] in ("standard", "alternate", "equilibrium"),
         "must be standard, alternate or equilibrium")

    try:
        gas = GasParams(cfg["gas.R"], cfg["gas.c_v"], cfg["gas.mu"], cfg["gas.kappa"], beta, cfg["gas.gamma"])
        scheme = SchemeConfig(cfg["scheme.dt_initial"], cfg["scheme.cfl_safety"], cfg["scheme.dt_min"],
                              cfg["scheme.max_newton_lag"], cfg["scheme.positivity_floor"])
        problem = ProblemKind(variant, cfg["problem.length"])
        run_cfg = RunConfig(
            problem, cfg["grid.dx"], cfg["grid.n_cells"], gas, profile, profile_args, scheme,
            cfg["run.t_end"], cfg["run.cadence"], cfg["run.output_dir"], tuple(cfg["run.p_list"]),
            cfg["run.probe_N"], cfg["run.snapshots"], cfg["run.figures"],
            {k.split(".", 1)[1]: v for k, v in cfg.items() if k.startswith("verify.")},
        )
        grid = run_cfg.grid()
    except LagnsError as exc:
        raise ConfigError(str(exc)) from None
    if run_cfg.probe_N is not None:
        need("run.probe_N", 0 <= run_cfg.probe_N < grid.n_cells, f"must index a cell in [0, {grid.n_cells})")
    # amplitudes are checked against the sampled profiles before any run
    try:
        run_cfg.setup().initial_state()
    except LagnsError as exc:
        raise ConfigError(f"initial.*: {exc}") from None
    return run_cfg
