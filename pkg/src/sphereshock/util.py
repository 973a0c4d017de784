"""Small shared numerics: low-discrepancy sampling, bump functions, local interpolation."""

from __future__ import annotations

import numpy as np

# Plastic-ratio (R2) low-discrepancy sequence constants.
_PLASTIC = 1.3247179572447460  # real root of x^3 = x + 1
_R2_ALPHA = np.array([1.0 / _PLASTIC, 1.0 / _PLASTIC**2])


def r2_points(n, lows, highs, skip=0):
    """n quasi-uniform points in the box [lows, highs] (2D), deterministic."""
    lows = np.asarray(lows, dtype=float)
    highs = np.asarray(highs, dtype=float)
    idx = np.arange(skip + 1, skip + n + 1, dtype=float)[:, None]
    frac = (0.5 + idx * _R2_ALPHA[None, :]) % 1.0
    return lows + frac * (highs - lows)


def smoothstep(t):
    """C^4 monotone ramp: 0 for t<=0, 1 for t>=1 (degree-9 polynomial)."""
    t = np.clip(t, 0.0, 1.0)
    t4 = t * t * t * t
    return t4 * t * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + t * 70.0))))


def bump(x, inner, outer):
    """C^4 plateau cutoff: 1 on |x|<=inner, 0 on |x|>=outer."""
    if outer <= inner:
        raise ValueError("bump needs outer > inner")
    return smoothstep((outer - np.abs(x)) / (outer - inner))


def lagrange_fit(x, f, x0, npts=6):
    """Coefficients of the local Lagrange polynomial through npts nodes nearest x0.

    Returns (c, x0) with p(x) = sum c_k (x - x0)^k; c_k = p^{(k)}(x0)/k!.
    """
    x = np.asarray(x)
    f = np.asarray(f)
    if len(x) < npts:
        raise ValueError("grid too short for interpolation stencil")
    i = int(np.searchsorted(x, x0))
    lo = min(max(i - npts // 2, 0), len(x) - npts)
    xs = x[lo:lo + npts] - x0
    V = np.vander(xs, npts, increasing=True)
    return np.linalg.solve(V, f[lo:lo + npts])


def lagrange_value_and_derivs(x, f, x0, nderiv=3, npts=6):
    """Interpolated value and derivatives 1..nderiv of samples f(x) at x0."""
    c = lagrange_fit(x, f, x0, npts=npts)
    fact = 1.0
    out = [c[0]]
    for k in range(1, nderiv + 1):
        fact *= k
        out.append(c[k] * fact if k < len(c) else 0.0)
    return np.array(out)
