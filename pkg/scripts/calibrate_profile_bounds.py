#!/usr/bin/env python3
"""Measure the profile derivative-bound constants that profile.py freezes.

For each multi-index gamma with |gamma| <= 4 this sweeps quasi-random points
plus structured axis/ridge samples and reports

    C_gamma = sup |d^gamma W| * eta^(g1/2 + g2/6 - 1/6),

the smallest constant making |d^gamma W| <= C_gamma eta^{1/6-g1/2-g2/6} hold
on the sample.  Run once, round up, and commit into DERIV_BOUND_C.
"""

import numpy as np

from sphereshock import profile as pf
from sphereshock.util import r2_points

def main():
    n = 2_000_000
    pts = r2_points(n, (-1e3, -1e3), (1e3, 1e3))
    # Structured samples: axes, near-origin refinement, |y1| ~ <y2>^3 ridge.
    extra = [np.column_stack([np.linspace(-1e3, 1e3, 40001), np.zeros(40001)]),
             np.column_stack([np.zeros(40001), np.linspace(-1e3, 1e3, 40001)]),
             r2_points(200001, (-3.0, -3.0), (3.0, 3.0))]
    t = np.linspace(-10, 10, 20001)
    for c in (0.25, 0.5, 1.0, 2.0, 4.0):
        y2 = np.linspace(-31, 31, 20001)
        extra.append(np.column_stack([c * np.sign(t) * (1 + y2 * y2) ** 1.5, y2]))
    pts = np.vstack([pts] + extra)
    y1, y2 = pts[:, 0], pts[:, 1]

    T = pf.w2d_jet(y1, y2)
    print(f"{'gamma':>8} {'C_gamma':>12} {'argmax (y1, y2)':>28}")
    for total in range(5):
        for g1 in range(total, -1, -1):
            g2 = total - g1
            weight = pf.eta(y1, y2, g1 / 2.0 + g2 / 6.0 - 1.0 / 6.0)
            vals = np.abs(T[g1][g2]) * weight
            i = int(np.argmax(vals))
            print(f"  ({g1},{g2}) {vals[i]:12.6f}   ({y1[i]:10.3f}, {y2[i]:10.3f})")

if __name__ == "__main__":
    main()
