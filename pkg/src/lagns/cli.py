"""Command line: ``lagns run|verify|accept|version``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import random
import sys

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .diagnostics import DiagnosticsRecorder, deviation_norms, read_diagnostics
from .errors import LagnsError
from .grid import read_snapshot, write_snapshot
from .solver import SchemeConfig, run

log = logging.getLogger("lagns")


def geometric_times(t_end):
    """0, 1, 2, 4, 8, ... up to and including ``t_end``."""
    times = [0.0]
    t = 1.0
    while t < t_end:
        times.append(t)
        t *= 2.0
    if t_end > 0:
        times.append(t_end)
    return times


def _write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _finite(x):
    return x if math.isfinite(x) else str(x)


def do_run(cfg: RunConfig, out: str, cadence: int) -> dict:
    os.makedirs(out, exist_ok=True)
    setup = cfg.setup()
    grid = setup.grid
    rec = DiagnosticsRecorder(grid, cfg.gas, p_list=cfg.p_list, probe_N=cfg.probe_N,
                              csv_path=os.path.join(out, "diagnostics.csv"))
    snaps = []

    def snapshot(state):
        if cfg.snapshots:
            path = os.path.join(out, f"snapshot_t{state.time:g}.csv")
            write_snapshot(path, state, grid)
            snaps.append((state.time, path))

    state = setup.initial_state()
    snapshot(state)
    times = geometric_times(cfg.t_end)
    rejected = [0]

    def on_step(s, report):
        rejected[0] += report.rejected_attempts

    failure = None
    try:
        state = run(setup, cfg.gas, cfg.scheme, cfg.t_end, [rec], cadence=cadence, on_step=on_step,
                    state=state, checkpoints=times[1:-1], on_checkpoint=snapshot)
        if cfg.t_end > 0:
            snapshot(state)
    except LagnsError as exc:
        failure = exc
        state = getattr(exc, "state", None) or state
    finally:
        rec.close()

    norms = deviation_norms(state, grid, cfg.p_list)
    bounds = rec.summary()
    last = rec.records[-1]
    summary = {
        "t_final": state.time,
        "n_cells": grid.n_cells,
        "dx": grid.dx,
        "beta": cfg.gas.beta,
        "variant": cfg.problem.variant.value,
        "e0": last.e0,
        "E_final": last.energy_entropy,
        "cumV_final": last.cum_dissipation,
        "min_inf_v": bounds.min_inf_v,
        "max_sup_v": bounds.max_sup_v,
        "min_inf_theta": bounds.min_inf_theta,
        "max_sup_theta": bounds.max_sup_theta,
        "log_Y_N_final": last.log_Y_N,
        "rejected_attempts": rejected[0],
        "pass_energy_inequality": all(r.energy_entropy + r.cum_dissipation <= last.e0 * (1 + 1e-3)
                                      for r in rec.records),
        "pass_positivity": bounds.min_inf_v > 0 and bounds.min_inf_theta > 0,
        "completed": failure is None,
    }
    for k, v in norms.items():
        summary[f"final_{k}_dev" if k != "L2_grad" else "final_L2_grad"] = _finite(v)
    _write_json(os.path.join(out, "summary.json"), summary)

    if cfg.figures:
        from .plotting import plot_diagnostics, plot_snapshots
        plot_diagnostics(read_diagnostics(os.path.join(out, "diagnostics.csv")),
                         os.path.join(out, "diagnostics.png"),
                         title=f"{cfg.problem.variant.value}, beta={cfg.gas.beta:g}")
        if snaps:
            plot_snapshots([(t, read_snapshot(p)) for t, p in snaps], os.path.join(out, "profiles.png"))
    if failure is not None:
        raise failure
    return summary


def _case(cfg):
    from .verification import alternate_case, equilibrium_case, standard_case
    kw = dict(length=1.0, t_end=cfg.verify["t_end"])
    name = cfg.verify["case"]
    if name == "equilibrium":
        return equilibrium_case(cfg.gas, **kw)
    return (standard_case if name == "standard" else alternate_case)(cfg.gas, **kw)


def do_verify(kind: str, cfg: RunConfig, out: str) -> dict:
    from .plotting import plot_convergence, plot_truncation
    from .verification import (convergence_study, oracle_compare, truncation_study,
                               write_convergence_csv, write_truncation_csv)
    os.makedirs(out, exist_ok=True)
    vcfg = cfg.verify
    if kind == "convergence":
        case = _case(cfg)
        space = convergence_study(case, vcfg["levels"], "space", n0=vcfg["n0"])
        time = convergence_study(case, vcfg["levels"], "time", n0=vcfg["time_cells"], dt0=case.t_end / 2)
        write_convergence_csv(os.path.join(out, "convergence_space.csv"), space)
        write_convergence_csv(os.path.join(out, "convergence_time.csv"), time)
        if cfg.figures:
            plot_convergence(space, os.path.join(out, "convergence_space.png"), "space")
            plot_convergence(time, os.path.join(out, "convergence_time.png"), "time")
        for label, rows in (("space", space), ("time", time)):
            print(f"{label}: level,dx,dt,error,order")
            for r in rows:
                print(f"  {r.level},{r.dx:.6g},{r.dt:.6g},{r.error:.6e},{r.order:.4f}")
        ps, pt = space[-1].order, time[-1].order
        if case.name == "equilibrium":
            ok = max(r.error for r in space + time) < 1e-13
            result = {"max_error": max(r.error for r in space + time), "pass": ok}
        else:
            result = {"spatial_order": ps, "temporal_order": pt, "pass": ps >= 1.9 and pt >= 0.9}
    elif kind == "oracle":
        sc = SchemeConfig(dt_initial=vcfg["oracle_dt"], dt_min=min(1e-12, vcfg["oracle_dt"]),
                          cfl_safety=cfg.scheme.cfl_safety, max_newton_lag=cfg.scheme.max_newton_lag,
                          positivity_floor=cfg.scheme.positivity_floor)
        d = oracle_compare(cfg.setup(), cfg.gas, cfg.t_end, sc, vcfg["oracle_ratio"])
        print(f"max-norm discrepancy: {d:.6e}")
        result = {"discrepancy": d, "pass": d < 1e-4}
    elif kind == "truncation":
        rows = truncation_study(cfg.setup, cfg.gas, vcfg["lengths"], cfg.t_end, cfg.scheme)
        write_truncation_csv(os.path.join(out, "truncation.csv"), rows)
        if cfg.figures:
            plot_truncation(rows, os.path.join(out, "truncation.png"))
        print("L,discrepancy")
        for L, d in rows:
            print(f"  {L:g},{d:.6e}")
        ds = [d for _, d in rows]
        result = {"discrepancies": ds, "pass": all(a >= b for a, b in zip(ds, ds[1:]))}
    else:
        raise ValueError(kind)
    _write_json(os.path.join(out, f"verify_{kind}.json"), result)
    return result


def do_accept(out: str) -> bool:
    from .acceptance import run_all
    os.makedirs(out, exist_ok=True)
    results = run_all(echo=lambda line: print(line, flush=True))
    _write_json(os.path.join(out, "acceptance.json"),
                {f"criterion_{r.number}": {"name": r.name, "pass": r.passed, "detail": r.detail}
                 for r in results})
    return all(r.passed for r in results)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (overrides run.output_dir)")
    common.add_argument("--cadence", type=int, help="observer cadence in steps (overrides run.cadence)")
    common.add_argument("--seedless", action="store_true",
                        help="fail if any random number generator state changes during the command")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="lagns", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="integrate one configuration")
    r.add_argument("config")
    v = sub.add_parser("verify", parents=[common], help="run a verification study")
    v.add_argument("study", choices=["convergence", "oracle", "truncation"])
    v.add_argument("config")
    sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    sub.add_parser("version", help="print the version")
    return p


def _rng_fingerprint():
    return repr(random.getstate()), repr(np.random.get_state())


def _error_line(exc):
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    if args.command == "version":
        print(__version__)
        return 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    before = _rng_fingerprint() if args.seedless else None
    try:
        if args.command == "accept":
            ok = do_accept(args.out or "accept_out")
            code = 0 if ok else 1
        else:
            cfg = load_config(args.config)
            out = args.out or cfg.output_dir
            if args.command == "run":
                cadence = args.cadence or cfg.cadence
                if cadence < 1:
                    raise LagnsError("--cadence must be >= 1")
                summary = do_run(cfg, out, cadence)
                print(json.dumps({k: summary[k] for k in ("t_final", "final_Linf_dev", "e0", "E_final")}))
                code = 0
            else:
                code = 0 if do_verify(args.study, cfg, out)["pass"] else 1
    except (LagnsError, OSError) as exc:
        _error_line(exc)
        return 1
    if args.seedless and _rng_fingerprint() != before:
        _error_line(LagnsError("random number generator state changed during a --seedless command"))
        return 3
    return code


if __name__ == "__main__":
    sys.exit(main())
