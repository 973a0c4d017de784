"""Command-line interface: simulate, sweep, diagnose, profile table,
check-geometry, trajectories."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np


def _add_common(p):
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--print-defaults", action="store_true",
                   help="print the fully resolved default config and exit")


def _load_config(args):
    from .config import ExperimentConfig
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out:
        cfg.out_dir = args.out
    return cfg


def cmd_simulate(args):
    from .config import print_defaults
    if args.print_defaults:
        print(print_defaults())
        return 0
    cfg = _load_config(args)
    if args.emit_selfsim is not None:
        cfg.solver.emit_selfsim_ds = args.emit_selfsim
        cfg.snapshots_csv = True
    from .harness import run_experiment
    rec = run_experiment(cfg)
    print(f"status: {rec.status}  samples: {len(rec.samples)}  "
          f"T*: {rec.summary.get('T_star')}")
    return 0 if rec.status in ("blew_up", "max_time") else 1


def cmd_sweep(args):
    from .config import print_defaults
    if args.print_defaults:
        print(print_defaults())
        return 0
    cfg = _load_config(args)
    from .harness import sweep
    print(f"sweep cross-product: {cfg.sweep.size()} run(s)")
    rows = sweep(cfg, max_workers=args.workers)
    print(f"sweep finished: {len(rows)} runs -> {cfg.out_dir}/sweep.csv")
    bad = [r for r in rows if r["status"] == "error"]
    for r in bad:
        print(f"  failed {r['config_hash']}: {r['error']}")
    return 1 if bad else 0


def cmd_diagnose(args):
    from .diagnostics import DiagnosticUndefinedError, blowup_report
    from .records import RunRecord
    rec = RunRecord.read_jsonl(args.record)
    try:
        rep = blowup_report(rec, holder_cap=args.holder_cap,
                            rate_tol=args.rate_tol)
    except DiagnosticUndefinedError as err:
        print(f"diagnostics undefined: {err}")
        return 2
    print(f"T*                : {rep.T_star:.8g}")
    print(f"tau tracker (end) : {rep.tau_tracker:.8g}")
    print(f"rate exponent     : {rep.rate_exponent:+.4f} "
          f"(span {rep.rate_span:.1f}x)")
    print(f"xi*               : {rep.xi_star:.8g}")
    print(f"holder seminorm   : {rep.holder_seminorm_max:.4f}")
    print(f"min sigma         : {rep.min_sigma:.4f}")
    for name, ok in rep.flags.items():
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    return 0 if rep.passed else 1


def cmd_profile_table(args):
    from . import profile
    y1 = np.linspace(args.y1min, args.y1max, args.n)
    y2 = np.linspace(args.y2min, args.y2max, args.n)
    out = csv.writer(open(args.out, "w", newline="") if args.out else sys.stdout)
    out.writerow(["y1", "y2", "W", "dW1", "dW2", "residual"])
    for b in y2:
        T = profile.w2d_jet(y1, np.full_like(y1, b))
        res = profile.selfsimilar_burgers_residual(y1, np.full_like(y1, b))
        for j in range(len(y1)):
            out.writerow([f"{v:.17g}" for v in
                          (y1[j], b, T[0][0][j], T[1][0][j], T[0][1][j], res[j])])
    return 0


def cmd_check_geometry(args):
    from .geometry import DerivationMismatchError, origin_derivative_table
    Q = np.array([[0.0, args.q12, args.q13],
                  [-args.q12, 0.0, args.q23],
                  [-args.q13, -args.q23, 0.0]])
    try:
        table = origin_derivative_table(args.psi, Q, args.r0)
    except DerivationMismatchError as err:
        print(f"FAIL: {err}")
        return 1
    width = max(len(k) for k in table)
    for name, (ana, num) in table.items():
        print(f"{name:<{width}}  analytic {ana:+.10e}  fd {num:+.10e}")
    print("PASS: all origin-table entries agree")
    return 0


def cmd_trajectories(args):
    from .harness import load_snapshots
    from .trajectories import FrozenTransportField, integrate_trajectory, \
        weighted_integral
    snaps = load_snapshots(args.from_run)
    field = FrozenTransportField.from_snapshots(snaps)
    s_lo, s_hi = field.s_span
    seeds = [float(line) for line in open(args.seeds)
             if line.strip() and not line.startswith("#")]
    out = csv.writer(open(args.out, "w", newline="") if args.out else sys.stdout)
    ps = (0.5, 1.0, 2.0)
    out.writerow(["y0", "s_end", "Phi_end"] + [f"wint_p{p:g}" for p in ps])
    for y0 in seeds:
        path = integrate_trajectory(field, s_lo, y0, s_hi)
        out.writerow([f"{v:.12g}" for v in
                      (y0, path.s_end, path(path.s_end),
                       *(weighted_integral(path, p) for p in ps))])
    return 0


def build_parser():
    top = argparse.ArgumentParser(prog="sphereshock",
                                  description="Equivariant shock-formation laboratory")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one experiment")
    _add_common(p)
    p.add_argument("--emit-selfsim", type=float, metavar="DS",
                   help="dump self-similar snapshots every DS in s")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run the sweep cross-product")
    _add_common(p)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("diagnose", help="verify a recorded run")
    p.add_argument("record", help="run.jsonl path")
    p.add_argument("--holder-cap", type=float, default=2.5)
    p.add_argument("--rate-tol", type=float, default=0.05)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("profile", help="blow-up profile tools")
    psub = p.add_subparsers(dest="subcommand", required=True)
    pt = psub.add_parser("table", help="tabulate the 2D profile on a grid")
    pt.add_argument("--y1min", type=float, required=True)
    pt.add_argument("--y1max", type=float, required=True)
    pt.add_argument("--y2min", type=float, required=True)
    pt.add_argument("--y2max", type=float, required=True)
    pt.add_argument("--n", type=int, required=True)
    pt.add_argument("--out")
    pt.set_defaults(func=cmd_profile_table)

    p = sub.add_parser("check-geometry", help="certify the origin table")
    p.add_argument("--psi", type=float, default=0.0)
    p.add_argument("--q12", type=float, default=0.0)
    p.add_argument("--q13", type=float, default=0.0)
    p.add_argument("--q23", type=float, default=0.0)
    p.add_argument("--r0", type=float, default=1.0)
    p.set_defaults(func=cmd_check_geometry)

    p = sub.add_parser("trajectories", help="integrate frozen-field trajectories")
    p.add_argument("--from-run", required=True,
                   help="run directory containing snapshots.npz")
    p.add_argument("--seeds", required=True, help="file of y0 seeds, one per line")
    p.add_argument("--out")
    p.set_defaults(func=cmd_trajectories)
    return top


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
