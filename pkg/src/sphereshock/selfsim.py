"""Self-similar variables: rescaling of physical runs into the zoom frame,
bootstrap inequality monitors, and weighted distance to the blow-up profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import profile
from .modulation import ModulationState
from .util import lagrange_value_and_derivs
from .weno import DERIVS_C4


class PastBlowupError(ValueError):
    pass


@dataclass
class BootstrapConstants:
    """Desk-scale calibration of the monitor constants.

    M dominates the initial data and universal constants; tau0 is the
    initial timescale; l = (ln M)^-5 and L = tau0^(-1/10) unless overridden.
    """

    M: float = 100.0
    tau0: float = 1e-2
    sigma_inf: float = 1.0
    l: float = None
    L: float = None

    def __post_init__(self):
        if self.l is None:
            self.l = float(np.log(self.M)) ** -5
        if self.L is None:
            self.L = self.tau0 ** -0.1


@dataclass
class SelfSimField:
    s: float
    y: np.ndarray
    W: np.ndarray
    Z: np.ndarray
    dW: dict = field(default_factory=dict)  # k -> d^k_y W
    dZ: dict = field(default_factory=dict)
    kappa: float = 0.0
    tau: float = 0.0
    xi: float = 0.0
    t_tilde: float = 0.0


def to_selfsimilar(grid_abs, w, z, mod: ModulationState, nderiv=4) -> SelfSimField:
    """Map physical fields on an absolute-theta grid into the zoom frame.

    y = (theta - xi) e^{3s/2}, W = e^{s/2}(w - kappa), Z = z.  Derivative
    arrays are produced by differencing in theta and rescaling by powers of
    e^{3s/2}, never by differencing the stretched y-grid.
    """
    if not mod.tau > mod.t_tilde:
        raise PastBlowupError("self-similar frame undefined at or past blow-up")
    grid_abs = np.asarray(grid_abs)
    w = np.asarray(w)
    z = np.asarray(z)
    s = mod.s
    e32 = np.exp(1.5 * s)
    e12 = np.exp(0.5 * s)
    fld = SelfSimField(s=float(s), y=(grid_abs - mod.xi) * e32,
                       W=e12 * (w - mod.kappa), Z=z.copy(),
                       kappa=mod.kappa, tau=mod.tau, xi=mod.xi,
                       t_tilde=mod.t_tilde)
    dx = grid_abs[1] - grid_abs[0]
    for k in range(1, nderiv + 1):
        dke = DERIVS_C4[k - 1]
        fld.dW[k] = e12 * e32 ** -k * dke(w, dx)
        fld.dZ[k] = e32 ** -k * dke(z, dx)
    return fld


def from_selfsimilar(fld: SelfSimField):
    """Inverse map back to (theta_abs, w, z)."""
    e32 = np.exp(1.5 * fld.s)
    e12 = np.exp(0.5 * fld.s)
    return fld.y / e32 + fld.xi, fld.W / e12 + fld.kappa, fld.Z.copy()


def _origin_jet(fld: SelfSimField, nderiv=3, npts=8):
    """W and its y-derivatives at y = 0 by local interpolation."""
    vals = lagrange_value_and_derivs(fld.y, fld.W, 0.0, nderiv=nderiv, npts=npts)
    return vals


@dataclass
class BootstrapReport:
    margins: dict
    worst: dict

    @property
    def passed(self):
        return all(m >= 0.0 for m in self.margins.values())

    def family(self, prefix):
        return {k: v for k, v in self.margins.items() if k.startswith(prefix)}

    def family_passed(self, prefix):
        return all(v >= 0.0 for v in self.family(prefix).values())


def _min_margin(bound, quantity, y):
    margin = bound - np.abs(quantity)
    i = int(np.argmin(margin))
    return float(margin[i]), float(y[i])


def bootstrap_report(fld: SelfSimField, consts: BootstrapConstants) -> BootstrapReport:
    """Pointwise margins of the bootstrap inequalities on the zoom frame.

    Families: ba_w_* (profile-scale bounds on W), ba_wt_* (deviation from
    the profile on |y| <= L, |y| <= l, and at the origin), ba_z_* (sound
    speed deviation).  Failures are reported, never raised.  The outer
    three nodes carry edge-padded stencils and are excluded; the inner
    family is interpolation-limited once its bounds fall below grid
    precision.
    """
    trim = slice(3, -3)
    fld = SelfSimField(s=fld.s, y=fld.y[trim], W=fld.W[trim], Z=fld.Z[trim],
                       dW={k: v[trim] for k, v in fld.dW.items()},
                       dZ={k: v[trim] for k, v in fld.dZ.items()},
                       kappa=fld.kappa, tau=fld.tau, xi=fld.xi,
                       t_tilde=fld.t_tilde)
    y = fld.y
    yb = np.sqrt(1.0 + y * y)
    M, t0 = consts.M, consts.tau0
    e32 = np.exp(-1.5 * fld.s)

    margins, worst = {}, {}

    def put(name, bound, quantity, mask=None, yy=None):
        yy = y if yy is None else yy
        if mask is not None:
            if not np.any(mask):
                return
            bound, quantity, yy = bound[mask], quantity[mask], yy[mask]
        margins[name], worst[name] = _min_margin(bound, quantity, yy)

    put("ba_w_0", (1.0 + t0 ** (1.0 / 23.0)) * yb ** (1.0 / 3.0), fld.W)
    put("ba_w_1", 15.0 * yb ** (-2.0 / 3.0), fld.dW[1])
    put("ba_w_2", M ** (1.0 / 6.0) * yb ** (-2.0 / 3.0), fld.dW[2])
    put("ba_w_3", np.full_like(y, M ** 0.5), fld.dW[3])
    put("ba_w_4", np.full_like(y, float(M)), fld.dW[4])

    wbar, dwbar1, dwbar2 = profile.w1d_jet(y, upto=2)
    inL = np.abs(y) <= consts.L
    put("ba_wt_0", t0 ** (1.0 / 3.0) * yb ** (1.0 / 3.0), fld.W - wbar, inL)
    put("ba_wt_1", t0 ** 0.25 * yb ** (-2.0 / 3.0), fld.dW[1] - dwbar1, inL)
    put("ba_wt_2", t0 ** 0.2 * yb ** (-2.0 / 3.0), fld.dW[2] - dwbar2, inL)

    jet = _origin_jet(fld, nderiv=3)
    margins["ba_wt_3_origin"] = float(t0 ** 0.8 - abs(jet[3] - 6.0))
    worst["ba_wt_3_origin"] = 0.0

    # inner region |y| <= l sits below the grid scale; sample by interpolation
    ys = np.linspace(-consts.l, consts.l, 9)
    jets = np.array([lagrange_value_and_derivs(fld.y, fld.W, yy, nderiv=4, npts=8)
                     for yy in ys])
    wb_inner = profile.w1d_jet(ys, upto=4)
    for k in range(0, 5):
        wt_k = jets[:, k] - wb_inner[k]
        bound = 10.0 * M**2 * np.sqrt(t0) * np.abs(ys) ** (4 - k)
        if k <= 3:
            bound = bound + t0 ** 0.6 * np.abs(ys) ** (3 - k)
        put(f"ba_wt_inner_{k}", bound, wt_k, yy=ys)

    put("ba_z_0", np.full_like(y, M * t0), fld.Z + consts.sigma_inf)
    for k, power in ((1, 1.0), (2, 4.0 / 3.0), (3, 6.0), (4, 7.0)):
        put(f"ba_z_{k}", np.full_like(y, M**power * e32), fld.dZ[k])

    return BootstrapReport(margins=margins, worst=worst)


def profile_distance(fld: SelfSimField, consts: BootstrapConstants):
    """Weighted sup distances between W and the blow-up profile.

    Returns {inner_sup, weighted_sup, weighted_grad_sup}: the |y| <= l sup of
    |W - Wbar|, and the <y>^(-1/3)- and <y>^(2/3)-weighted sups on |y| <= L.
    """
    trim = slice(3, -3)
    y = fld.y[trim]
    W = fld.W[trim]
    dW1 = fld.dW[1][trim]
    inL = np.abs(y) <= consts.L
    wbar, dwbar = profile.w1d_jet(y, upto=1)
    yb = np.sqrt(1.0 + y * y)

    ys = np.linspace(-consts.l, consts.l, 17)
    w_interp = np.array([lagrange_value_and_derivs(fld.y, fld.W, yy, nderiv=0)[0]
                         for yy in ys])
    inner = float(np.max(np.abs(w_interp - profile.w1d(ys))))
    out = {
        "inner_sup": inner,
        "weighted_sup": float(np.max(yb[inL] ** (-1.0 / 3.0)
                                     * np.abs(W - wbar)[inL])),
        "weighted_grad_sup": float(np.max(yb[inL] ** (2.0 / 3.0)
                                          * np.abs(dW1 - dwbar)[inL])),
    }
    return out


def normalization_check(fld: SelfSimField):
    """Residuals of the origin pinning W(s, 0) = 0, dW(s, 0) = -1."""
    jet = _origin_jet(fld, nderiv=1)
    return float(abs(jet[0])), float(abs(jet[1] + 1.0))
