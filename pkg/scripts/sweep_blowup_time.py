#!/usr/bin/env python3
"""Blow-up time scaling sweep: T* - tau0 across tau0 = 1e-2, 5e-3, 2.5e-3.

The fitted log-log slope should come out at 2 (the O(tau0^2) correction to
the predicted time).  Usage:  python scripts/sweep_blowup_time.py [out_dir]
"""

import math
import sys

import numpy as np

from sphereshock import diagnostics as dg
from sphereshock.equivariant import SolverConfig, run_until_blowup


def sweep_config(tau0):
    dx = 3.0 * tau0 / 8191
    slope_hi = (0.02 * tau0**2 / (150.0 * dx**4)) ** 0.2
    return SolverConfig(n_cells=8192, tau0=tau0, sigma_inf=1.2,
                        xi0=math.pi / 12.0, record_every=4,
                        t_max=1.6 * tau0, theta_min=-1.5 * tau0,
                        theta_max=1.5 * tau0,
                        blowup_slope_cap=1.35 * slope_hi)


def main():
    taus = (1e-2, 5e-3, 2.5e-3)
    devs = []
    for tau0 in taus:
        rec = run_until_blowup(sweep_config(tau0))
        T = dg.blowup_time_refined(rec)
        devs.append(abs(T - tau0))
        print(f"tau0 = {tau0:.4g}   T* = {T:.10f}   |T* - tau0| = {devs[-1]:.3e}")
    slope = np.polyfit(np.log(taus), np.log(devs), 1)[0]
    print(f"log-log slope of |T* - tau0| vs tau0: {slope:.3f}  (expect 2)")
    return 0 if abs(slope - 2.0) <= 0.2 else 1


if __name__ == "__main__":
    sys.exit(main())
