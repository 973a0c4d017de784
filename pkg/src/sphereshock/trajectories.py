"""Lagrangian trajectories of self-similar transport fields, with growth
certificates and weighted path integrals for the trajectory lemmas.

Fields come in as callables V(s, y); frozen simulation snapshots are wrapped
into such callables by FrozenTransportField, keeping this module decoupled
from the solver loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class EscapeStatus:
    INSIDE = "inside"
    ESCAPED = "escaped"


@dataclass
class TrajectoryPath:
    """Dense-output trajectory: cubic Hermite between accepted steps."""

    s: np.ndarray
    y: np.ndarray
    f: np.ndarray            # field values at the nodes
    s1: float
    y0: float
    status: str = EscapeStatus.INSIDE
    field_tag: str = ""

    def __post_init__(self):
        if len(self.s) < 2 or np.any(np.diff(self.s) <= 0):
            raise ValueError("trajectory samples must increase strictly in s")

    @property
    def s_end(self):
        return float(self.s[-1])

    def __call__(self, s_query):
        """Cubic Hermite interpolation of the path (vectorized)."""
        sq = np.atleast_1d(np.asarray(s_query, dtype=float))
        if np.any(sq < self.s[0] - 1e-12) or np.any(sq > self.s[-1] + 1e-12):
            raise ValueError("query outside the integrated span")
        sq = np.clip(sq, self.s[0], self.s[-1])
        idx = np.clip(np.searchsorted(self.s, sq, side="right") - 1, 0, len(self.s) - 2)
        h = self.s[idx + 1] - self.s[idx]
        t = (sq - self.s[idx]) / h
        y0, y1 = self.y[idx], self.y[idx + 1]
        f0, f1 = self.f[idx] * h, self.f[idx + 1] * h
        t2, t3 = t * t, t * t * t
        out = ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * f0
               + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * f1)
        return out if np.ndim(s_query) else float(out[0])


_RKF_A = (0.0, 0.25, 3.0 / 8.0, 12.0 / 13.0, 1.0, 0.5)
_RKF_B = (
    (),
    (0.25,),
    (3.0 / 32.0, 9.0 / 32.0),
    (1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0),
    (439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0),
    (-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0),
)
_RKF_C5 = (16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0)
_RKF_C4 = (25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0)


def integrate_trajectory(V, s1, y0, s_end, tol=1e-10, escape_box=None,
                         max_steps=200000, field_tag="") -> TrajectoryPath:
    """Adaptive RKF45 integration of dPhi/ds = V(s, Phi) from (s1, y0).

    Local error is controlled to tol per step; leaving escape_box (lo, hi)
    terminates early with status 'escaped' (not an error).
    """
    if not s_end > s1:
        raise ValueError("s_end must exceed s1")
    y0 = float(y0)
    ss, ys, fs = [s1], [y0], [float(np.asarray(V(s1, y0)))]
    h = min(1e-2, s_end - s1)
    s, y = s1, y0
    status = EscapeStatus.INSIDE
    for _ in range(max_steps):
        if s >= s_end - 1e-14:
            break
        if escape_box is not None and not escape_box[0] <= y <= escape_box[1]:
            status = EscapeStatus.ESCAPED
            break
        h = min(h, s_end - s)
        k = []
        for stage in range(6):
            ys_stage = y + h * sum(b * kk for b, kk in zip(_RKF_B[stage], k))
            k.append(float(np.asarray(V(s + _RKF_A[stage] * h, ys_stage))))
        y5 = y + h * sum(c * kk for c, kk in zip(_RKF_C5, k))
        y4 = y + h * sum(c * kk for c, kk in zip(_RKF_C4, k))
        err = abs(y5 - y4)
        scale = tol * max(1.0, abs(y), abs(y5))
        if err <= scale or h <= 1e-12:
            s += h
            y = y5
            ss.append(s)
            ys.append(y)
            fs.append(float(np.asarray(V(s, y))))
        ratio = (scale / err) ** 0.2 if err > 0 else 2.0
        h = max(1e-12, h * min(2.0, max(0.2, 0.9 * ratio)))
    else:
        raise RuntimeError("trajectory integration exceeded max_steps")
    return TrajectoryPath(s=np.array(ss), y=np.array(ys), f=np.array(fs),
                          s1=s1, y0=y0, status=status, field_tag=field_tag)


def growth_certificate(path: TrajectoryPath, rate, n_dense=800):
    """Signed margin of |Phi(s)| >= |y0| e^{rate (s - s1)} along the path.

    Nonnegative certifies the exponential lower bound; quantitative slack
    is the margin itself.
    """
    s = np.linspace(path.s1, path.s_end, n_dense + 1)[1:]
    phi = np.abs(path(s))
    bound = abs(path.y0) * np.exp(rate * (s - path.s1))
    return float(np.min(phi - bound))


def weighted_integral(path: TrajectoryPath, p, rtol=1e-10, max_doublings=18):
    """Integral of <Phi(s')>^-p along the path by Richardson-refined Simpson."""
    if not 0.1 < p < 10.0:
        raise ValueError("p must lie in (1/10, 10)")

    def quad(n):
        s = np.linspace(path.s1, path.s_end, n + 1)
        g = (1.0 + path(s) ** 2) ** (-0.5 * p)
        h = (path.s_end - path.s1) / n
        return h / 3.0 * (g[0] + g[-1] + 4 * np.sum(g[1:-1:2]) + 2 * np.sum(g[2:-2:2]))

    n = 64
    prev = quad(n)
    for _ in range(max_doublings):
        n *= 2
        cur = quad(n)
        if abs(cur - prev) <= rtol * max(1.0, abs(cur)):
            return float(cur)
        prev = cur
    return float(prev)


def z_drift_certificate(V_Z, path: TrajectoryPath, beta3, kappa0, n_dense=400):
    """Margin of the leftward-drift property of the Z-transport field.

    Wherever Phi(s) <= beta3 kappa0 e^{s/2}, the drift must satisfy
    dPhi/ds <= -(1/2) beta3 kappa0 e^{s/2}; returns the minimum of
    (-(1/2) beta3 kappa0 e^{s/2} - V_Z) over qualifying samples (None if
    the region is never entered).
    """
    s = np.linspace(path.s1, path.s_end, n_dense)
    phi = path(s)
    gate = beta3 * kappa0 * np.exp(0.5 * s)
    mask = phi <= gate
    if not np.any(mask):
        return None
    drifts = np.array([float(np.asarray(V_Z(si, pi))) for si, pi in
                       zip(s[mask], phi[mask])])
    return float(np.min(-0.5 * beta3 * kappa0 * np.exp(0.5 * s[mask]) - drifts))


@dataclass
class FrozenTransportField:
    """Time-sliced interpolant of g_R snapshots: V(s, y) = 3/2 y + g_R(s, y).

    Built from run snapshots; linear in s between slices, linear in y along
    each slice, constant-extrapolated outside.
    """

    s_slices: np.ndarray
    y_slices: list
    g_slices: list
    tag: str = "g_w"

    @classmethod
    def from_snapshots(cls, snapshots, key="g_w"):
        if not snapshots:
            raise ValueError("no snapshots to build a transport field from")
        snaps = sorted(snapshots, key=lambda r: r["s"])
        return cls(s_slices=np.array([r["s"] for r in snaps]),
                   y_slices=[np.asarray(r["y"]) for r in snaps],
                   g_slices=[np.asarray(r[key]) for r in snaps],
                   tag=key)

    def g(self, s, y):
        i = int(np.clip(np.searchsorted(self.s_slices, s) - 1, 0,
                        len(self.s_slices) - 2))
        s0, s1 = self.s_slices[i], self.s_slices[i + 1]
        frac = 0.0 if s1 == s0 else np.clip((s - s0) / (s1 - s0), 0.0, 1.0)
        g0 = np.interp(y, self.y_slices[i], self.g_slices[i])
        g1 = np.interp(y, self.y_slices[i + 1], self.g_slices[i + 1])
        return (1.0 - frac) * g0 + frac * g1

    def __call__(self, s, y):
        return 1.5 * y + self.g(s, y)

    @property
    def s_span(self):
        return float(self.s_slices[0]), float(self.s_slices[-1])
