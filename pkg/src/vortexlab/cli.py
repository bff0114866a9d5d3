"""Command-line entry point.

Subcommands: gen-data, run, pair, tracers, sweep, verify.  Every
subcommand accepts --config (flat key=value file) with flag overrides;
exit codes: 0 success, 1 check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io as vio
from .errors import VortexLabError
from .evolve import FlowState, StepConfig, DiagnosticsRecord, measure, run_to, step
from .gaps import GapRecord, paired_run, scaling_fit
from .harness import (SWEEP_COLUMNS, choose_resolution, estimate_b0, run_one,
                      sweep, _auto_dt)
from .params import (build_ladder, build_large_scale, build_small_scale,
                     measure_initial_norms)
from .spectral import (ScalarField2D, TorusGrid, dealias, lp_norm,
                       velocity_from_vorticity)
from .tracers import (TracerEnsemble, advance, cauchy_check, check_lld,
                      standard_seeds)
from .velgrad import TWO_OVER_PI, grad_at, pv_oracle

TRACER_COLUMNS = ("seed_x1", "seed_x2", "t", "eta_1", "eta_2",
                  "D11", "D12", "D21", "D22", "det")


def _maybe_figure(kind: str, csv_path) -> None:
    """Render the companion figure next to the CSV when the plots
    package is installed; the data product never depends on it."""
    try:
        from vortexlab_plots import FigureSpec, PlotsError, render
    except ImportError:
        print(f"figure skipped: vortexlab-plots not installed ({kind})")
        return
    out = Path(csv_path).with_suffix(".png")
    try:
        render(FigureSpec(inputs=(str(csv_path),), kind=kind,
                          output=str(out)))
    except PlotsError as exc:
        print(f"figure skipped ({kind}): {exc}")
    else:
        print(f"wrote {out}")


def _common(sub):
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--n", type=int)
    sub.add_argument("--delta", type=float)
    sub.add_argument("--a0", type=float, dest="a0_bar")
    sub.add_argument("--kappa", type=float)
    sub.add_argument("--c-small", type=float, dest="c_small")
    sub.add_argument("--N", type=int, dest="resolution",
                     help="grid resolution (default: auto from the ladder)")
    sub.add_argument("--out", default=None, help="output directory or file")


DEFAULTS = {"n": 4, "delta": 0.1, "a0_bar": 0.4, "kappa": 0.5,
            "c_small": 1.0, "resolution": None, "out": "."}

_CASTS = {"n": int, "delta": float, "a0_bar": float, "kappa": float,
          "c_small": float, "resolution": int, "nu": float,
          "t_end": float, "out": str}


def _settings(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        for key, val in vio.read_config(args.config).items():
            cfg[key] = _CASTS.get(key, str)(val)
    for key in cfg:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    return cfg


def _setup(cfg, with_small=True):
    ladder = build_ladder(cfg["n"], cfg["delta"], cfg["a0_bar"],
                          kappa=cfg["kappa"], c_small=cfg["c_small"])
    N = cfg["resolution"] or choose_resolution(ladder, with_small_scale=with_small)
    grid = TorusGrid(ladder.L, N)
    omega_L0 = build_large_scale(ladder, grid)
    u_S0 = build_small_scale(ladder, grid) if with_small else \
        ScalarField2D(grid, np.zeros((N, N)))
    # project onto the solver's dealiased band so the recorded initial
    # norms match what the stepper actually evolves (it drops beyond-cap
    # modes on the first step otherwise)
    omega_L0 = ScalarField2D.from_hat(grid, dealias(omega_L0.hat, grid))
    u_S0 = ScalarField2D.from_hat(grid, dealias(u_S0.hat, grid))
    return ladder, grid, omega_L0, u_S0


def _dt_for(ladder, grid, omega_L0):
    vel = velocity_from_vorticity(omega_L0)
    umax = max(np.max(np.abs(vel.u1.values)), np.max(np.abs(vel.u2.values)))
    return _auto_dt(ladder.t_n, grid.h, 1.5 * umax)


def cmd_gen_data(args) -> int:
    cfg = _settings(args)
    ladder, grid, omega_L0, u_S0 = _setup(cfg)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    vio.save_field(out / "omega_L0.field", omega_L0, 0.0, "omega_L")
    vio.save_field(out / "u_S0.field", u_S0, 0.0, "u_S")
    norms = measure_initial_norms(omega_L0, u_S0)
    vio.write_manifest(out / "manifest.json", cfg,
                       {"ladder": ladder.as_dict(), "resolution": grid.resolution,
                        "initial_norms": norms})
    print(f"wrote fields and manifest to {out}")
    return 0


def cmd_run(args) -> int:
    cfg = _settings(args)
    ladder, grid, omega_L0, u_S0 = _setup(cfg)
    nu = ladder.nu_n if args.nu in (None, "auto") else float(args.nu)
    t_end = ladder.t_n if args.t_end in (None, "auto") else float(args.t_end)
    dt = _dt_for(ladder, grid, omega_L0)
    state = FlowState(0.0, omega_L0, u_S0, nu)
    history = []
    counter = {"k": 0}

    def obs(s):
        if counter["k"] % args.sample_every == 0:
            history.append(measure(s))
        counter["k"] += 1

    final = run_to(state, t_end, StepConfig(dt=dt), observers=[obs])
    if history[-1].time < final.time - 1e-14:
        history.append(measure(final))
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    vio.write_csv(out / "diagnostics.csv", DiagnosticsRecord.COLUMNS,
                  [r.row() for r in history])
    vio.write_manifest(out / "manifest.json", cfg,
                       {"ladder": ladder.as_dict(), "nu": nu, "t_end": t_end,
                        "dt": dt, "resolution": grid.resolution,
                        "steps": counter["k"] - 1})
    print(f"run n={ladder.n} nu={nu:g} to t={t_end:g}: "
          f"{counter['k'] - 1} steps, wrote {out / 'diagnostics.csv'}")
    return 0


def cmd_pair(args) -> int:
    cfg = _settings(args)
    ladder, grid, omega_L0, u_S0 = _setup(cfg)
    nu = ladder.nu_n if args.nu in (None, "auto") else float(args.nu)
    t_end = ladder.t_n if args.t_end in (None, "auto") else float(args.t_end)
    dt = _dt_for(ladder, grid, omega_L0)
    records = paired_run(omega_L0, u_S0, nu, t_end, StepConfig(dt=dt),
                         sample_every=args.sample_every)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    vio.write_csv(out / "gaps.csv", GapRecord.COLUMNS,
                  [r.row() for r in records])
    vio.write_manifest(out / "manifest.json", cfg,
                       {"ladder": ladder.as_dict(), "nu": nu, "t_end": t_end,
                        "dt": dt, "resolution": grid.resolution})
    print(f"paired run n={ladder.n} nu={nu:g}: wrote {out / 'gaps.csv'}")
    _maybe_figure("gaps", out / "gaps.csv")
    return 0


def cmd_tracers(args) -> int:
    cfg = _settings(args)
    ladder, grid, omega_L0, u_S0 = _setup(cfg)
    t_end = ladder.t_n if args.t_end in (None, "auto") else float(args.t_end)
    dt = _dt_for(ladder, grid, omega_L0)
    ens = TracerEnsemble.from_seeds(standard_seeds(ladder))
    state = FlowState(0.0, omega_L0, u_S0, 0.0)
    ens, final = advance(ens, state, t_end, StepConfig(dt=dt))
    rows = []
    for s, x, D, det in zip(ens.seeds, ens.positions, ens.deformations,
                            ens.det()):
        rows.append((s[0], s[1], ens.time, x[0], x[1],
                     D[0, 0], D[0, 1], D[1, 0], D[1, 1], det))
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    vio.write_csv(out / "tracers.csv", TRACER_COLUMNS, rows)
    checks = check_lld(ens, ladder)
    residual = cauchy_check(FlowState(0.0, omega_L0, u_S0, 0.0), final, ens)
    ok = all(c.passed for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: "
              f"{c.measured:.4g} in [{c.lower_envelope:.4g}, {c.upper_envelope:.4g}]")
    print(f"transport-identity residual: {residual:.3g}")
    print(f"wrote {out / 'tracers.csv'}")
    _maybe_figure("deformation", out / "tracers.csv")
    return 0 if ok else 1


def cmd_sweep(args) -> int:
    cfg = _settings(args)
    n_list = [int(v) for v in str(args.n_list).split(",")]
    results = sweep(n_list, cfg["delta"], cfg["a0_bar"], kappa=cfg["kappa"],
                    c_small=cfg["c_small"], sample_every=args.sample_every)
    out = Path(cfg["out"] if cfg["out"] != "." else "sweep.csv")
    if out.suffix != ".csv":
        out.mkdir(parents=True, exist_ok=True)
        out = out / "sweep.csv"
    vio.write_csv(out, SWEEP_COLUMNS, [r.row() for r in results])
    line = ", ".join(f"S_{r.n}={r.S_n:.4g}" for r in results)
    print(f"sweep {n_list}: {line}")
    if len(results) >= 3:
        print(f"b0_hat = {estimate_b0(results):.4g} (a0_bar = {cfg['a0_bar']})")
    print(f"wrote {out}")
    _maybe_figure("sweep", out)
    return 0


def _verify_checks(quick: bool):
    """Yield (name, passed, detail) for the built-in property table."""
    # 1. single-mode viscous decay against the closed form
    grid = TorusGrid(1.0, 64)
    x1, x2 = grid.meshes()
    w0 = ScalarField2D(grid, np.sin(np.pi * x1) * np.sin(np.pi * x2))
    nu, t_end = 1e-3, 0.5
    state = FlowState(0.0, w0.copy(), ScalarField2D(grid, np.zeros_like(x1)), nu)
    final = run_to(state, t_end, StepConfig(dt=2e-3))
    exact = math.exp(-2 * math.pi**2 * nu * t_end) * w0.values
    err = np.max(np.abs(final.omega_L.values - exact)) / np.max(np.abs(exact))
    yield "single-mode decay", err <= 1e-8, f"rel err {err:.2e}"

    # 2. ladder sanity
    lad = build_ladder(4, 0.1, 0.4)
    nus = [build_ladder(n, 0.1, 0.4).nu_n for n in range(3, 9)]
    yield "ladder monotone nu_n", all(a > b for a, b in zip(nus, nus[1:])), \
        f"nu_3={nus[0]:.3g} .. nu_8={nus[-1]:.3g}"

    # 3. log-law point check vs the quadrature oracle
    n_check = 4
    ladn = build_ladder(n_check, 0.1, 0.4)
    grid_n = TorusGrid(ladn.L, choose_resolution(ladn, with_small_scale=False))
    wL = build_large_scale(ladn, grid_n)
    st = FlowState(0.0, wL, ScalarField2D(grid_n, np.zeros((grid_n.resolution,) * 2)), 0.0)
    spec = grad_at(st, (0.0, 0.0)).matrix[0, 0]
    orac = pv_oracle(wL, (0.0, 0.0))[0, 0]
    rel = abs(spec - orac) / abs(orac)
    yield "gradient oracle agreement", rel <= 1e-2, \
        f"spectral {spec:.4f} vs quadrature {orac:.4f}"
    ratio = spec / (TWO_OVER_PI * math.log(1 / ladn.ell_bar))
    yield "log-law magnitude", 0.6 <= ratio <= 1.4, f"ratio {ratio:.3f}"

    if quick:
        return

    # 4. inviscid conservation at a desk-scale point
    res = run_one(3, 0.1, 0.4, nu=0.0)
    yield "inviscid energy drift", res.energy_residual <= 1e-4, \
        f"residual {res.energy_residual:.2e}"
    yield "stretching ratio > 1", res.S_n > 1.0, f"S_3 = {res.S_n:.4g}"


def cmd_verify(args) -> int:
    failures = 0
    for name, ok, detail in _verify_checks(args.quick):
        print(f"{'PASS' if ok else 'FAIL'}  {name:32s} {detail}")
        failures += 0 if ok else 1
    print(f"{failures} failure(s)" if failures else "all checks passed")
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vortexlab",
        description="Desk-scale laboratory for 2+1/2-dimensional vortex "
                    "stretching and inviscid-limit dissipation scalings.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen-data", help="emit initial fields and manifest")
    _common(p)
    p.set_defaults(func=cmd_gen_data)

    p = subs.add_parser("run", help="single evolution with diagnostics")
    _common(p)
    p.add_argument("--nu", default=None, help="viscosity or 'auto' (= nu_n)")
    p.add_argument("--t-end", default=None, dest="t_end",
                   help="final time or 'auto' (= t_n)")
    p.add_argument("--sample-every", type=int, default=10)
    p.set_defaults(func=cmd_run)

    p = subs.add_parser("pair", help="paired viscous/inviscid gap run")
    _common(p)
    p.add_argument("--nu", default=None)
    p.add_argument("--t-end", default=None, dest="t_end")
    p.add_argument("--sample-every", type=int, default=10)
    p.set_defaults(func=cmd_pair)

    p = subs.add_parser("tracers", help="Lagrangian deformation checks")
    _common(p)
    p.add_argument("--t-end", default=None, dest="t_end")
    p.set_defaults(func=cmd_tracers)

    p = subs.add_parser("sweep", help="dissipation sweep over n")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--n", default="3,4,5", dest="n_list",
                   help="comma-separated indices, e.g. 3,4,5")
    p.add_argument("--delta", type=float)
    p.add_argument("--a0", type=float, dest="a0_bar")
    p.add_argument("--kappa", type=float)
    p.add_argument("--c-small", type=float, dest="c_small")
    p.add_argument("--out", default="sweep.csv")
    p.add_argument("--sample-every", type=int, default=10)
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("verify", help="run the built-in property table")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VortexLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
