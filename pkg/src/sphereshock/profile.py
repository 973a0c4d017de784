"""Stable self-similar Burgers blow-up profile and its certified calculus.

The 1D profile solves the implicit relation  -W - W^3 = y  (equivalently the
stationary self-similar Burgers equation); the 2D profile is the anisotropic
lift  W(y1, y2) = <y2> * W1d(<y2>^-3 y1)  with <a> = sqrt(1 + a^2).  All
partial derivatives up to total order 4 are produced by explicit implicit
differentiation so tests can cross-check an independent finite-difference
path.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

# Switch point below which the cube-root closed form loses digits to
# cancellation; a Newton solve of W + W^3 = -y takes over there.
_NEWTON_CUTOVER = 1e-3

ETA_EXPONENTS = {"value": 1.0 / 6.0, "d1": -1.0 / 3.0, "d2": 0.0}

# sup over y of |d^g W| * eta^(g1/2 + g2/6 - 1/6), measured by
# scripts/calibrate_profile_bounds.py (boxes up to [-1e4, 1e4]^2 plus axis
# and |y1| ~ <y2>^3 ridge samples), frozen with ~3% headroom.  The pure-y2
# axis suprema converge to the exact values 2, 6, 48, 24; |gamma| <= 1
# entries are the sharp analytic constants.
DERIV_BOUND_C = {
    (0, 0): 1.0,
    (1, 0): 1.0,
    (0, 1): 0.5774,
    (2, 0): 0.99,
    (1, 1): 2.06,
    (0, 2): 0.82,
    (3, 0): 6.01,
    (2, 1): 5.52,
    (1, 2): 6.18,
    (0, 3): 2.89,
    (4, 0): 31.9,
    (3, 1): 49.5,
    (2, 2): 36.8,
    (1, 3): 24.8,
    (0, 4): 17.6,
}


def _require_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ValueError("profile evaluation requires finite input")


def w1d(y):
    """1D profile: the unique real root W of  -W - W^3 = y.

    Odd, strictly decreasing; exact to floating tolerance (Newton-polished).
    """
    y = np.asarray(y, dtype=float)
    _require_finite(y)
    scalar = y.ndim == 0
    ya = np.abs(np.atleast_1d(y))

    # Stable closed form for y >= 0:  -y/2 + r = (1/27)/(r + y/2).
    r = np.sqrt(1.0 / 27.0 + 0.25 * ya * ya)
    a = np.cbrt((1.0 / 27.0) / (r + 0.5 * ya))
    b = np.cbrt(0.5 * ya + r)
    w = a - b

    # Newton polish; near zero the closed form cancels, so restart from -y.
    w = np.where(ya < _NEWTON_CUTOVER, -ya, w)
    for _ in range(3):
        w = w - (w + w**3 + ya) / (1.0 + 3.0 * w * w)

    w = np.where(np.atleast_1d(y) < 0, -w, w)
    return float(w[0]) if scalar else w.reshape(y.shape)


def _w1d_derivs(w):
    """Derivatives d^k W1d / dy^k, k = 1..4, as functions of W = W1d(y)."""
    d = 1.0 + 3.0 * w * w
    f1 = -1.0 / d
    f2 = -6.0 * w / d**3
    f3 = 6.0 / d**4 - 108.0 * w * w / d**5
    f4 = 360.0 * w / d**6 - 3240.0 * w**3 / d**7
    return f1, f2, f3, f4


def w1d_deriv(y, order):
    """Order-n derivative (1 <= n <= 4) of the 1D profile."""
    if not 1 <= order <= 4:
        raise ValueError(f"w1d_deriv supports orders 1..4, got {order}")
    w = np.asarray(w1d(y))
    out = _w1d_derivs(w)[order - 1]
    return float(out) if np.ndim(y) == 0 else out


def w1d_jet(y, upto=2):
    """[W1d, W1d', ..., W1d^(upto)] sharing a single profile solve."""
    if not 0 <= upto <= 4:
        raise ValueError("w1d_jet supports orders 0..4")
    w = np.asarray(w1d(y))
    return [w, *_w1d_derivs(w)[:upto]]


def w2d_jet(y1, y2):
    """All partials T[j][k] = d1^j d2^k W of the 2D profile for j + k <= 4.

    Entries with j + k > 4 are left as None.  Built from the pure-d1
    derivatives plus the recursion  d2 W = y2 * d1(W^2), which closes the
    mixed partials over products of lower-order entries.
    """
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    _require_finite(y1, y2)
    y1, y2 = np.broadcast_arrays(y1, y2)

    b = np.sqrt(1.0 + y2 * y2)
    t = y1 / b**3
    f0 = np.asarray(w1d(t))
    f1, f2, f3, f4 = _w1d_derivs(f0)

    T = [[None] * 5 for _ in range(5)]
    for j, fj in enumerate((f0, f1, f2, f3, f4)):
        T[j][0] = b ** (1 - 3 * j) * fj

    def sq(p, q):
        # d1^p d2^q (W^2) by the Leibniz rule over available entries.
        acc = 0.0
        for a_ in range(p + 1):
            for b_ in range(q + 1):
                acc = acc + comb(p, a_) * comb(q, b_) * T[a_][b_] * T[p - a_][q - b_]
        return acc

    for k in range(1, 5):
        for j in range(0, 5 - k):
            val = y2 * sq(j + 1, k - 1)
            if k >= 2:
                val = val + (k - 1) * sq(j + 1, k - 2)
            T[j][k] = val
    return T


def w2d(y1, y2):
    """2D blow-up profile W(y1, y2) = <y2> W1d(<y2>^-3 y1)."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    _require_finite(y1, y2)
    b = np.sqrt(1.0 + y2 * y2)
    out = b * np.asarray(w1d(y1 / b**3))
    return float(out) if out.ndim == 0 else out


def w2d_deriv(y1, y2, gamma):
    """Partial derivative d1^g1 d2^g2 W for a multi-index with |gamma| <= 4."""
    g1, g2 = int(gamma[0]), int(gamma[1])
    if g1 < 0 or g2 < 0 or g1 + g2 > 4:
        raise ValueError(f"unsupported multi-index {gamma!r}: need |gamma| <= 4")
    out = np.asarray(w2d_jet(y1, y2)[g1][g2])
    return float(out) if out.ndim == 0 else out


def eta(y1, y2, p=1.0):
    """Anisotropic weight (1 + y1^2 + y2^6)^p matching the 3:1 blow-up scaling."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    _require_finite(y1, y2)
    out = (1.0 + y1 * y1 + y2**6) ** p
    return float(out) if out.ndim == 0 else out


def selfsimilar_burgers_residual(y1, y2):
    """Residual of the 2D self-similar Burgers equation at (y1, y2).

    Uses the analytic derivatives; vanishes identically, so anything above
    rounding level flags a defect in the profile calculus.
    """
    T = w2d_jet(y1, y2)
    w, d1, d2 = T[0][0], T[1][0], T[0][1]
    out = np.asarray(-0.5 * w + (1.5 * np.asarray(y1, dtype=float) + w) * d1
                     + 0.5 * np.asarray(y2, dtype=float) * d2)
    return float(out) if out.ndim == 0 else out


@dataclass
class ProfileEval:
    """Pointwise jet of the 2D profile: value, gradient, Hessian, third order."""

    value: float
    grad: tuple
    hessian: np.ndarray
    third: dict

    def check_symmetry(self):
        return np.allclose(self.hessian, self.hessian.T)


def profile_eval(y1, y2):
    T = w2d_jet(float(y1), float(y2))
    hess = np.array([[T[2][0], T[1][1]], [T[1][1], T[0][2]]], dtype=float)
    third = {(3, 0): float(T[3][0]), (2, 1): float(T[2][1]),
             (1, 2): float(T[1][2]), (0, 3): float(T[0][3])}
    return ProfileEval(value=float(T[0][0]), grad=(float(T[1][0]), float(T[0][1])),
                       hessian=hess, third=third)


def bound_margins(y1, y2):
    """Margins of the first-order profile bounds (nonnegative means satisfied).

    Returns (eta^{1/6} - |W|, eta^{-1/3} - |d1 W|, 3^{-1/2} - |d2 W|).
    """
    T = w2d_jet(y1, y2)
    e = eta(y1, y2, 1.0)
    return (e ** (1.0 / 6.0) - np.abs(T[0][0]),
            e ** (-1.0 / 3.0) - np.abs(T[1][0]),
            np.sqrt(3.0) / 3.0 - np.abs(T[0][1]))


def deriv_bound_margin(y1, y2, gamma):
    """Margin of |d^gamma W| <= C_gamma eta^{1/6 - g1/2 - g2/6} (frozen C)."""
    g1, g2 = int(gamma[0]), int(gamma[1])
    c = DERIV_BOUND_C[(g1, g2)]
    power = 1.0 / 6.0 - g1 / 2.0 - g2 / 6.0
    return c * eta(y1, y2, power) - np.abs(w2d_deriv(y1, y2, (g1, g2)))
