#!/usr/bin/env python3
"""Reference blow-up experiment: integrate the equivariant system to the
gradient singularity, then print the full diagnostic verdict.

Usage:  python scripts/run_blowup.py [out_dir]
"""

import math
import sys

from sphereshock.config import DiagnosticsConfig, ExperimentConfig
from sphereshock.diagnostics import blowup_report
from sphereshock.equivariant import SolverConfig
from sphereshock.harness import run_experiment


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "runs/blowup"
    cfg = ExperimentConfig(
        solver=SolverConfig(n_cells=8192, tau0=1e-2, sigma_inf=1.2,
                            xi0=math.pi / 12.0, record_every=4,
                            blowup_slope_cap=1150.0, emit_selfsim_ds=0.2),
        diagnostics=DiagnosticsConfig(),
        out_dir=out,
        snapshots_csv=True,
    )
    rec = run_experiment(cfg)
    print(f"status: {rec.status}  steps: {rec.summary['steps']}")
    rep = blowup_report(rec, holder_cap=cfg.diagnostics.holder_cap,
                        rate_tol=cfg.diagnostics.rate_tol)
    print(f"T* = {rep.T_star:.8f}   rate = {rep.rate_exponent:+.4f}   "
          f"min sigma = {rep.min_sigma:.4f}")
    for name, ok in rep.flags.items():
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
