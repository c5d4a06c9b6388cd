"""Command-line interface: run scenarios, verify against closed-form targets.

Commands:
    epwave run (--config FILE | --scenario NAME) [--set KEY=VALUE]
               [--out DIR] [--snapshot-every N] [--quiet]
    epwave verify {speeds | plateaus | convergence}
    epwave scenarios
"""
from __future__ import annotations

import argparse
import copy
import datetime
import json
import os
import sys
import time as _time
from dataclasses import asdict, dataclass

import numpy as np

from . import analysis, oracle
from .cese1d import SolverParams, compute_cfl, run, step as march_step
from .material import copper, elastic_wave_speed, general_wave_speed
from .scenarios import (ConfigError, ScenarioConfig, build_scenario, builtin_configs,
                        config_from_dict, snapshot_filename, write_manifest,
                        write_snapshot)

__all__ = ["main", "run_scenario", "RunReport"]


@dataclass
class RunReport:
    """Summary written to report.json at the end of each run."""

    kind: str
    out_dir: str
    steps: int
    final_time: float
    cfl_max: float
    wall_seconds: float
    snapshots: list[str]


def _apply_override(data: dict, assignment: str) -> None:
    """Apply one --set KEY=VALUE override with a dotted key path."""
    if "=" not in assignment:
        raise ConfigError(f"--set needs KEY=VALUE, got {assignment!r}")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.split(".")
    node = data
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set key {key!r} descends into a non-object")
    node[parts[-1]] = value


def run_scenario(cfg: ScenarioConfig, out_dir: str | None = None,
                 snapshot_every: int | None = None, quiet: bool = True) -> RunReport:
    """Run a configured scenario, writing snapshots, manifest, and report."""
    out = out_dir or cfg.output.directory
    os.makedirs(out, exist_ok=True)
    every = cfg.output.snapshot_every_steps if snapshot_every is None else snapshot_every
    if every > 0 and every % 2 == 1:
        every += 1   # keep all snapshots on the same (edge) node family

    level, bc = build_scenario(cfg)
    mat = cfg.material
    written: list[str] = []

    def callback(lv, step_index):
        name = snapshot_filename(step_index)
        write_snapshot(lv, mat, os.path.join(out, name))
        written.append(name)
        if not quiet:
            print(f"  step {step_index:6d}  t = {lv.t * 1e3:8.4f} ms  -> {name}")

    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    t0 = _time.perf_counter()
    final, steps, cfl_max = run(level, cfg.time.t_end, bc, cfg.solver, mat,
                                callback=callback if every > 0 else None,
                                snapshot_every=every)
    if not final.is_edge_family():
        # finish on the edge family so every snapshot shares one grid
        cfl_max = max(cfl_max, compute_cfl(final, mat))
        final = march_step(final, bc, cfg.solver, mat)
        steps += 1
    wall = _time.perf_counter() - t0
    finished = datetime.datetime.now(datetime.timezone.utc).isoformat()

    # always capture the final state, even off the snapshot cadence
    final_name = snapshot_filename(steps)
    if not written or written[-1] != final_name:
        write_snapshot(final, mat, os.path.join(out, final_name))
        written.append(final_name)

    write_manifest(out, cfg.raw, started, finished, steps, cfl_max, written)
    report = RunReport(kind=cfg.kind, out_dir=out, steps=steps,
                       final_time=final.t, cfl_max=cfl_max,
                       wall_seconds=wall, snapshots=written)
    with open(os.path.join(out, "report.json"), "w") as fh:
        json.dump(asdict(report), fh, indent=2)
        fh.write("\n")
    if not quiet:
        print(f"done: {steps} steps to t = {final.t * 1e3:.4f} ms "
              f"(max CFL {cfl_max:.3f}, {wall:.1f} s)")
    return report


# ---------------------------------------------------------------------------
# verify subcommands
# ---------------------------------------------------------------------------

def _check(label: str, ok: bool, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    return ok


def _verify_speeds() -> bool:
    mat = copper()
    ok = True
    c_e = general_wave_speed(mat, 0.0)
    c_e_ref = oracle.linear_wave_speed(mat, 0.0)
    ok &= _check("elastic speed", abs(c_e - c_e_ref) < 1e-9 * c_e_ref,
                 f"{c_e:.2f} m/s (target {c_e_ref:.2f})")
    c_p = general_wave_speed(mat, 1.0, 0.0)
    c_p_ref = oracle.linear_wave_speed(mat, 1.0, 0.0)
    ok &= _check("plastic speed", abs(c_p - c_p_ref) < 1e-9 * c_p_ref,
                 f"{c_p:.2f} m/s (target {c_p_ref:.2f})")

    # measured pulse speed from a short elastic run
    from .cese1d import MeshLevel
    from .scenarios import BoundaryPolicy
    n, length = 801, 2.0
    dx = length / (n - 1)
    dt = 0.6 * dx / c_e
    x = np.linspace(0.0, length, n)
    g = 0.01 * np.exp(-((x - 0.5) / 0.05) ** 2)
    gp = -2.0 * (x - 0.5) / 0.05**2 * g
    rho0 = mat.rest_density
    a = 4.0 * mat.shear_modulus / 3.0
    u = np.stack([rho0 + rho0 * g / c_e, (rho0 + rho0 * g / c_e) * g,
                  (rho0 + rho0 * g / c_e) * (-a * g / c_e)], axis=1)
    ux = np.stack([rho0 * gp / c_e,
                   rho0 * gp / c_e * g + (rho0 + rho0 * g / c_e) * gp,
                   rho0 * gp / c_e * (-a * g / c_e)
                   + (rho0 + rho0 * g / c_e) * (-a * gp / c_e)], axis=1)
    level = MeshLevel(x=x, u=u, ux=ux,
                      yield_radius=np.full(n, 2.0 * mat.initial_yield / 3.0),
                      eps_plastic=np.zeros(n), stage=np.zeros(n, dtype=int),
                      gamma=np.zeros(n, dtype=int), t=0.0, dx=dx, dt=dt,
                      x_min=0.0, x_max=length)
    bc = BoundaryPolicy("non_reflective", "non_reflective")
    t_end = 0.2 / c_e
    final, _, _ = run(level, t_end, bc, SolverParams(), mat)
    v = final.u[:, 1] / final.u[:, 0]
    x_peak = float(final.x[np.argmax(v)])
    c_meas = (x_peak - 0.5) / final.t
    ok &= _check("measured pulse speed", abs(c_meas - c_e) / c_e < 0.01,
                 f"{c_meas:.2f} m/s vs {c_e:.2f} (err {abs(c_meas - c_e) / c_e:.2%})")
    return ok


def _verify_plateaus() -> bool:
    cfg = config_from_dict(builtin_configs()["impact40"])
    level, bc = build_scenario(cfg)
    mat = cfg.material
    final, _, _ = run(level, cfg.time.t_end, bc, cfg.solver, mat)
    pred = oracle.impact_plateaus(40.0, mat)

    rho, v, s11 = final.primitives()
    from .material import pressure_from_density
    t11 = -pressure_from_density(rho, mat) + s11

    c_e = elastic_wave_speed(mat)
    x_if = 1.0
    x_prec_lo = x_if + 0.85 * c_e * final.t
    x_prec_hi = x_if + 0.97 * c_e * final.t
    prec_t11 = analysis.plateau_value(final.x, t11, x_prec_lo, x_prec_hi)
    plat_t11 = analysis.plateau_value(final.x, t11, x_if + 0.01, x_if + 0.3 * c_e * final.t)
    v_if = analysis.plateau_value(final.x, v, x_if - 0.02, x_if + 0.02)

    ok = True
    ok &= _check("precursor stress",
                 abs(prec_t11 - pred.precursor_axial_stress)
                 < 0.02 * abs(pred.precursor_axial_stress),
                 f"{prec_t11:.4e} Pa (target {pred.precursor_axial_stress:.4e})")
    ok &= _check("plateau stress",
                 abs(plat_t11 - pred.plateau_axial_stress)
                 < 0.02 * abs(pred.plateau_axial_stress),
                 f"{plat_t11:.4e} Pa (target {pred.plateau_axial_stress:.4e})")
    ok &= _check("interface speed", abs(v_if - 20.0) < 0.02 * 20.0,
                 f"{v_if:.3f} m/s (target 20.000)")
    return ok


def _gaussian_level(n_cells: int, mat, cfl: float):
    """Exact right-travelling elastic pulse on n_cells cells of a 2 m domain."""
    from .cese1d import MeshLevel
    length = 2.0
    c = elastic_wave_speed(mat)
    n = n_cells + 1
    dx = length / n_cells
    dt = cfl * dx / c
    x = np.linspace(0.0, length, n)
    amp, width, x0 = 0.01, 0.05, 0.7
    g = amp * np.exp(-((x - x0) / width) ** 2)
    gp = -2.0 * (x - x0) / width**2 * g
    rho0 = mat.rest_density
    a = 4.0 * mat.shear_modulus / 3.0
    rho = rho0 + rho0 * g / c
    u = np.stack([rho, rho * g, rho * (-a * g / c)], axis=1)
    drho = rho0 * gp / c
    ux = np.stack([drho, drho * g + rho * gp,
                   drho * (-a * g / c) + rho * (-a * gp / c)], axis=1)
    return MeshLevel(x=x, u=u, ux=ux,
                     yield_radius=np.full(n, 2.0 * mat.initial_yield / 3.0),
                     eps_plastic=np.zeros(n), stage=np.zeros(n, dtype=int),
                     gamma=np.zeros(n, dtype=int), t=0.0, dx=dx, dt=dt,
                     x_min=0.0, x_max=length), (amp, width, x0, c)


def measure_convergence(resolutions=(200, 400, 800), cfl: float = 0.6,
                        alpha: float = 0.0):
    """L2 velocity errors of an exact elastic pulse at several resolutions.

    Returns (errors, order) where order is the slope of log(error) against
    log(dx) fitted across the resolutions.
    """
    from .scenarios import BoundaryPolicy
    mat = copper()
    bc = BoundaryPolicy("non_reflective", "non_reflective")
    params = SolverParams(alpha=alpha)
    errors = []
    for n_cells in resolutions:
        level, (amp, width, x0, c) = _gaussian_level(n_cells, mat, cfl)
        t_end = 0.6 / c
        final, _, _ = run(level, t_end, bc, params, mat)
        v = final.u[:, 1] / final.u[:, 0]
        exact = amp * np.exp(-((final.x - x0 - c * final.t) / width) ** 2)
        err = float(np.sqrt(np.mean((v - exact) ** 2)))
        errors.append(err)
    h = np.log([2.0 / n for n in resolutions])
    order, _ = np.polyfit(h, np.log(errors), 1)
    return errors, float(order)


def _verify_convergence() -> bool:
    errors, order = measure_convergence()
    detail = ", ".join(f"{e:.3e}" for e in errors)
    return _check("convergence order", order >= 1.8,
                  f"order {order:.2f} (errors {detail})")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epwave",
        description="1-D elastic-plastic wave solver (space-time CESE scheme)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and write snapshots")
    group = p_run.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="path to a JSON scenario config")
    group.add_argument("--scenario", help="name of a built-in scenario")
    p_run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry (dotted key path)")
    p_run.add_argument("--out", help="output directory (default from config)")
    p_run.add_argument("--snapshot-every", type=int, default=None, metavar="N",
                       help="snapshot cadence in steps (0 disables)")
    p_run.add_argument("--quiet", action="store_true", help="suppress progress")

    p_ver = sub.add_parser("verify", help="check against closed-form targets")
    p_ver.add_argument("what", choices=["speeds", "plateaus", "convergence"])

    sub.add_parser("scenarios", help="list built-in scenarios")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "scenarios":
        for name, data in builtin_configs().items():
            scen = data["scenario"]
            desc = ", ".join(f"{k}={v}" for k, v in scen.items() if k != "kind")
            print(f"{name:24s} {scen['kind']:18s} {desc}")
        return 0

    if args.command == "verify":
        ok = {"speeds": _verify_speeds,
              "plateaus": _verify_plateaus,
              "convergence": _verify_convergence}[args.what]()
        return 0 if ok else 1

    # run
    try:
        if args.config:
            with open(args.config) as fh:
                data = json.load(fh)
        else:
            configs = builtin_configs()
            if args.scenario not in configs:
                print(f"unknown scenario {args.scenario!r}; "
                      f"choices: {', '.join(configs)}", file=sys.stderr)
                return 2
            data = copy.deepcopy(configs[args.scenario])
        for assignment in args.set:
            _apply_override(data, assignment)
        cfg = config_from_dict(data)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        run_scenario(cfg, out_dir=args.out, snapshot_every=args.snapshot_every,
                     quiet=args.quiet)
    except Exception as exc:   # solver failures should exit cleanly, not traceback
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
