"""Dynamical core: the equivariant Riemann-variable system on a latitude
strip, integrated to a resolved gradient blow-up.

The co-moving grid coordinate is theta_hat = theta - xi0 - xi_dot * t with a
constant frame drift xi_dot (the leading modulation drift 2 beta3 kappa0, or
zero in flat mode); the exact curvature forcing uses the absolute latitude.
Modulation variables are tracked diagnostically from the fields and never
feed back into the discretization, keeping runs deterministic.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import profile
from .diagnostics import holder_seminorm
from .modulation import (DegenerateRhsError, ModulationState,
                         constraints_from_field, ode_rhs, track_extremal)
from .records import RunRecord
from .riemann import betas
from .selfsim import (BootstrapConstants, bootstrap_report, normalization_check,
                      profile_distance, to_selfsimilar)
from .util import bump, lagrange_value_and_derivs
from .weno import deriv1_c4, weno5_upwind_derivative


class ConfigError(ValueError):
    pass


class PoleProximityError(RuntimeError):
    pass


class CFLViolationError(ValueError):
    pass


class OracleDomainError(ValueError):
    pass


@dataclass
class SolverConfig:
    gamma: float = 3.0
    sigma_inf: float = 1.2
    xi0: float = math.pi / 12.0
    tau0: float = 1e-2
    n_cells: int = 4096
    cfl: float = 0.6
    flat_mode: bool = False
    modulation_coupling: bool = True
    blowup_slope_cap: float = None       # default 1e4 / tau0
    dt_floor: float = 1e-12
    t_max: float = None                  # default 2 * tau0
    theta_min: float = None              # co-moving frame extent
    theta_max: float = None
    cut_inner: float = 0.4               # profile cutoff radii, units tau0^-1/2
    cut_outer: float = 1.0
    slope_dt_frac: float = 0.05          # dt <= frac / max|slope|
    record_every: int = 4
    pole_margin: float = math.pi / 16.0
    support_tol: float = 1e-11
    enforce_regime: bool = True
    monitor_M: float = 100.0
    ext_grad_deltas: tuple = (0.1, None)  # None -> quarter of the domain width
    emit_selfsim_ds: float = None         # snapshot cadence in s; None = off
    seed: int = 0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ConfigError("gamma must exceed 1")
        if not 0 < self.cfl < 1:
            raise ConfigError("cfl must lie in (0, 1)")
        if self.n_cells < 64:
            raise ConfigError("n_cells too small")
        if not self.tau0 > 0:
            raise ConfigError("tau0 must be positive")
        if not 0 < self.cut_inner < self.cut_outer:
            raise ConfigError("need 0 < cut_inner < cut_outer")
        bc = betas(self.gamma)
        if self.enforce_regime:
            if not math.pi / 16.0 <= self.xi0 <= math.pi / 8.0:
                raise ConfigError(f"xi0={self.xi0} outside [pi/16, pi/8]")
            floor = self.xi0 ** (1.0 / 3.0) / (2.0 * bc.beta3)
            if not self.sigma_inf > floor:
                raise ConfigError(f"sigma_inf={self.sigma_inf} <= {floor:.4f} "
                                  "(background too weak for the regime)")
        if self.blowup_slope_cap is None:
            self.blowup_slope_cap = 1e4 / self.tau0
        if self.t_max is None:
            self.t_max = 2.0 * self.tau0
        if self.theta_min is None:
            self.theta_min = -2.0 * self.tau0
        if self.theta_max is None:
            self.theta_max = 2.0 * self.tau0 + (
                2.0 * self.sigma_inf * self.tau0 if self.flat_mode else 0.0)
        if not self.theta_min < 0 < self.theta_max:
            raise ConfigError("the co-moving domain must contain theta_hat = 0")

    @property
    def kappa0(self):
        return self.sigma_inf

    def frame_drift(self):
        if self.flat_mode or not self.modulation_coupling:
            return 0.0
        return 2.0 * betas(self.gamma).beta3 * self.kappa0


@dataclass
class EquivariantState:
    grid: np.ndarray      # co-moving theta_hat nodes, uniform
    w: np.ndarray
    z: np.ndarray
    t_tilde: float
    xi0: float
    frame_drift: float

    @property
    def dx(self):
        return self.grid[1] - self.grid[0]

    def theta_abs(self, t=None):
        t = self.t_tilde if t is None else t
        return self.grid + self.xi0 + self.frame_drift * t

    def sigma(self):
        return 0.5 * (self.w - self.z)


def support_bounds(state: EquivariantState, sigma_inf, tol):
    """Co-moving extent of the deviation from the background steady state."""
    dev = np.maximum(np.abs(state.w - sigma_inf), np.abs(state.z + sigma_inf))
    idx = np.flatnonzero(dev > tol)
    if len(idx) == 0:
        return None, None
    return float(state.grid[idx[0]]), float(state.grid[idx[-1]])


def initial_data(cfg: SolverConfig) -> EquivariantState:
    """Profile-shaped pulse riding the background: w = kappa0 + e^{-s0/2}
    W0(theta e^{3 s0/2}) with W0 a smooth-bump-truncated 1D profile, z at
    the uniform background."""
    grid = np.linspace(cfg.theta_min, cfg.theta_max, cfg.n_cells)
    s0 = -math.log(cfg.tau0)
    y = grid * math.exp(1.5 * s0)
    inner = cfg.cut_inner * cfg.tau0 ** -0.5
    outer = cfg.cut_outer * cfg.tau0 ** -0.5
    support_half_width = outer * cfg.tau0 ** 1.5
    if support_half_width > cfg.xi0 / 10.0:
        raise ConfigError("initial support exceeds the xi0/10 window")
    dx = grid[1] - grid[0]
    if (support_half_width > cfg.theta_max - 4 * dx
            or -support_half_width < cfg.theta_min + 4 * dx):
        raise ConfigError("initial support does not fit inside the grid")
    w0 = profile.w1d(y) * bump(y, inner, outer)
    w = cfg.kappa0 + math.exp(-0.5 * s0) * w0
    z = np.full_like(w, -cfg.sigma_inf)
    return EquivariantState(grid=grid, w=w, z=z, t_tilde=0.0, xi0=cfg.xi0,
                            frame_drift=cfg.frame_drift())


def rhs(state: EquivariantState, mod: ModulationState, bc, cfg: SolverConfig,
        t=None, w=None, z=None):
    """Time derivatives (dw/dt, dz/dt) with upwinded transport.

    Transport speeds are (w + b2 z - xi_dot) and (b2 w + z - xi_dot); the
    curvature forcing is (b3/2)(w^2 - z^2) tan(theta); flat mode drops it.
    """
    w = state.w if w is None else w
    z = state.z if z is None else z
    t = state.t_tilde if t is None else t
    cw = w + bc.beta2 * z - mod.xi_dot
    cz = bc.beta2 * w + z - mod.xi_dot
    dwx = weno5_upwind_derivative(w, state.dx, cw)
    dzx = weno5_upwind_derivative(z, state.dx, cz)
    if cfg.flat_mode:
        force = 0.0
    else:
        theta = state.grid + state.xi0 + state.frame_drift * t
        if np.max(np.abs(theta)) > 0.5 * math.pi - cfg.pole_margin:
            raise PoleProximityError("domain within the pole margin of theta = pi/2")
        force = 0.5 * bc.beta3 * (w - z) * (w + z) * np.tan(theta)
    return -cw * dwx + force, -cz * dzx - force


def max_transport_speed(state, mod, bc):
    cw = state.w + bc.beta2 * state.z - mod.xi_dot
    cz = bc.beta2 * state.w + state.z - mod.xi_dot
    return max(float(np.max(np.abs(cw))), float(np.max(np.abs(cz))))


def step(state: EquivariantState, mod: ModulationState, dt, bc, cfg: SolverConfig,
         check_support=True, vmax=None) -> EquivariantState:
    """One classical RK4 advance; enforces the CFL contract and the finite
    propagation property of the support."""
    if vmax is None:
        vmax = max_transport_speed(state, mod, bc)
    if vmax > 0 and dt > cfg.cfl * state.dx / vmax * (1.0 + 1e-9):
        raise CFLViolationError(f"dt={dt} exceeds CFL limit "
                                f"{cfg.cfl * state.dx / vmax}")
    if check_support:
        lo0, hi0 = support_bounds(state, cfg.sigma_inf, cfg.support_tol)

    t, w, z = state.t_tilde, state.w, state.z
    k1w, k1z = rhs(state, mod, bc, cfg, t, w, z)
    k2w, k2z = rhs(state, mod, bc, cfg, t + 0.5 * dt,
                   w + 0.5 * dt * k1w, z + 0.5 * dt * k1z)
    k3w, k3z = rhs(state, mod, bc, cfg, t + 0.5 * dt,
                   w + 0.5 * dt * k2w, z + 0.5 * dt * k2z)
    k4w, k4z = rhs(state, mod, bc, cfg, t + dt, w + dt * k3w, z + dt * k3z)
    new = EquivariantState(
        grid=state.grid,
        w=w + dt / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w),
        z=z + dt / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z),
        t_tilde=t + dt, xi0=state.xi0, frame_drift=state.frame_drift)

    if check_support and lo0 is not None:
        lo1, hi1 = support_bounds(new, cfg.sigma_inf, cfg.support_tol)
        # the 7-point stencil can seed truncation-level noise up to 3 cells
        # beyond the tol-support; at physical amplitude growth is one cell
        reach = vmax * dt + 3.5 * state.dx
        if lo1 is not None and (lo1 < lo0 - reach or hi1 > hi0 + reach):
            raise RuntimeError("support grew faster than transport + stencil")
    return new


def _z_origin_jet(state: EquivariantState, xi_abs, s):
    grid_abs = state.theta_abs()
    vals = lagrange_value_and_derivs(grid_abs, state.z, xi_abs, nderiv=2, npts=8)
    e32 = math.exp(-1.5 * s)
    return float(vals[0]), float(vals[1]) * e32, float(vals[2]) * e32**2


def _ext_grad(state, slope, xi_abs, delta):
    mask = np.abs(state.theta_abs() - xi_abs) > delta
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(slope[mask])))


def run_until_blowup(cfg: SolverConfig, keep_snapshots=True, tracker="extremal",
                     validate_every=1) -> RunRecord:
    """Integrate to gradient blow-up (or another terminal status), recording
    the modulation, bootstrap, and diagnostic time series.

    tracker selects the primary modulation source: "extremal" reads the
    fields directly; "ode" integrates the origin ODEs and records the
    extremal values alongside for cross-validation.  validate_every sets the
    ODE-monitor cadence in samples.
    """
    if tracker not in ("extremal", "ode"):
        raise ConfigError(f"unknown tracker {tracker!r}")
    bc = betas(cfg.gamma)
    state = initial_data(cfg)
    drift = cfg.frame_drift()
    record = RunRecord(config={"solver": asdict(cfg), "tracker": tracker})
    consts = BootstrapConstants(M=cfg.monitor_M, tau0=cfg.tau0,
                                sigma_inf=cfg.sigma_inf)
    deltas = [0.25 * (cfg.theta_max - cfg.theta_min) if d is None else d
              for d in cfg.ext_grad_deltas]

    dx = state.grid[1] - state.grid[0]
    status = None
    step_i = 0
    prev_tau = cfg.tau0
    prev_t = 0.0
    beta_tau = 1.0
    next_snap_s = -math.log(cfg.tau0)
    sample_count = [0]
    mod_pde = ModulationState(kappa=cfg.kappa0, tau=cfg.tau0, xi=cfg.xi0,
                              t_tilde=0.0, xi_dot=drift)
    # ODE-tracker state: integrated modulation triple and its last rhs
    ode_vals = np.array([cfg.kappa0, cfg.tau0, cfg.xi0])
    ode_rhs_last = np.array([0.0, 0.0, 2.0 * bc.beta3 * cfg.kappa0])
    ode_t_last = 0.0

    def emit_sample(state, mod, slope, smax, dt_next):
        s = mod.s
        fld = to_selfsimilar(state.theta_abs(), state.w, state.z, mod)
        ba = bootstrap_report(fld, consts)
        dist = profile_distance(fld, consts)
        w0r, dw0r = normalization_check(fld)
        row = dict(t_tilde=state.t_tilde, s=s, kappa=mod.kappa, tau=mod.tau,
                   xi=mod.xi, max_slope=smax,
                   min_sigma=float(np.min(state.sigma())),
                   holder_w=holder_seminorm(state.grid, state.w),
                   dt=dt_next, beta_tau=mod.beta_tau,
                   w0_resid=w0r, dw0_resid=dw0r,
                   prof_inner=dist["inner_sup"],
                   prof_weighted=dist["weighted_sup"],
                   prof_weighted_grad=dist["weighted_grad_sup"],
                   ba_margins=ba.margins,
                   ba_w_pass=ba.family_passed("ba_w_"),
                   ba_z_pass=ba.family_passed("ba_z_"))
        lo, hi = support_bounds(state, cfg.sigma_inf, cfg.support_tol)
        row["support_lo"], row["support_hi"] = lo, hi
        for d in deltas:
            row[f"ext_grad_{d:g}"] = _ext_grad(state, slope, mod.xi, d)
        if sample_count[0] % validate_every == 0:
            try:
                cons = constraints_from_field(state.theta_abs(), state.w, mod.xi)
                Z0, dZ0, d2Z0 = _z_origin_jet(state, mod.xi, s)
                dk, dtau, dxi = ode_rhs(cons, mod, bc, cfg.sigma_inf, Z0, dZ0,
                                        d2Z0, flat_mode=cfg.flat_mode)
                row.update(ode_dkappa=dk, ode_dtau=dtau, ode_dxi=dxi)
            except DegenerateRhsError:
                row.update(ode_dkappa=None, ode_dtau=None, ode_dxi=None)
        sample_count[0] += 1
        record.add_sample(**row)
        return fld

    while True:
        w, z = state.w, state.z
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(z))):
            status = "numerical_failure"
            break
        if np.min(w - z) <= 0.0:
            status = "vacuum"
            break

        slope = deriv1_c4(w, dx)
        smax_grid = float(np.max(np.abs(slope)))
        vmax = max_transport_speed(state, mod_pde, bc)
        dt_base = min(cfg.cfl * dx / max(vmax, 1e-30),
                      cfg.slope_dt_frac / smax_grid)
        dt = min(dt_base, cfg.t_max - state.t_tilde)

        sample_step = (step_i % cfg.record_every == 0)
        hit_cap = smax_grid >= cfg.blowup_slope_cap or dt_base < cfg.dt_floor
        hit_tmax = state.t_tilde >= cfg.t_max * (1.0 - 1e-12)
        stopping = hit_cap or hit_tmax
        if sample_step or stopping:
            xi_loc, kappa, tau, smin = track_extremal(
                state.grid, w, state.t_tilde, slope=slope)
            xi_abs = xi_loc + cfg.xi0 + drift * state.t_tilde
            if state.t_tilde > prev_t:
                dta = (tau - prev_tau) / (state.t_tilde - prev_t)
                beta_tau = float(np.clip(1.0 / (1.0 - dta), 0.5, 2.0))
            mod_ext = ModulationState(kappa=kappa, tau=tau, xi=xi_abs,
                                      t_tilde=state.t_tilde, xi_dot=drift,
                                      beta_tau=beta_tau)
            prev_tau, prev_t = tau, state.t_tilde
            if tracker == "ode":
                ode_vals = ode_vals + ode_rhs_last * (state.t_tilde - ode_t_last)
                ode_t_last = state.t_tilde
                if ode_vals[1] <= state.t_tilde:
                    status = "numerical_failure"
                    break
                mod = ModulationState(kappa=float(ode_vals[0]),
                                      tau=float(ode_vals[1]),
                                      xi=float(ode_vals[2]),
                                      t_tilde=state.t_tilde, xi_dot=drift,
                                      beta_tau=float(np.clip(
                                          1.0 / (1.0 - ode_rhs_last[1]), 0.5, 2.0)))
            else:
                mod = mod_ext
            fld = emit_sample(state, mod, slope, abs(smin), dt)
            if tracker == "ode":
                last = record.samples[-1]
                last["kappa_ext"], last["tau_ext"], last["xi_ext"] = \
                    mod_ext.kappa, mod_ext.tau, mod_ext.xi
                if last.get("ode_dkappa") is not None:
                    ode_rhs_last = np.array([last["ode_dkappa"],
                                             last["ode_dtau"], last["ode_dxi"]])
            if keep_snapshots and cfg.emit_selfsim_ds is not None \
                    and mod.s >= next_snap_s:
                # frozen transport uses the instantaneous modulation drift so
                # the origin term carries the small ODE correction, not the
                # constant-frame offset
                xi_dot_now = record.samples[-1].get("ode_dxi")
                if xi_dot_now is None:
                    xi_dot_now = drift
                es2 = math.exp(0.5 * mod.s)
                g_w = (mod.beta_tau * fld.W + mod.beta_tau * es2
                       * (mod.kappa + bc.beta2 * fld.Z - xi_dot_now))
                g_z = (bc.beta2 * mod.beta_tau * fld.W + mod.beta_tau * es2
                       * (bc.beta2 * mod.kappa + fld.Z - xi_dot_now))
                record.add_snapshot(s=fld.s, t_tilde=state.t_tilde,
                                    kappa=mod.kappa, tau=mod.tau, xi=mod.xi,
                                    beta_tau=mod.beta_tau,
                                    y=fld.y.copy(), W=fld.W.copy(),
                                    Z=fld.Z.copy(), g_w=g_w, g_z=g_z)
                next_snap_s += cfg.emit_selfsim_ds

        if stopping:
            status = "blew_up" if hit_cap else "max_time"
            break

        state = step(state, mod_pde, dt, bc, cfg,
                     check_support=sample_step, vmax=vmax)
        step_i += 1

    record.status = status
    record.summary = {
        "status": status,
        "t_end": state.t_tilde,
        "steps": step_i,
        "max_slope_end": float(record.samples[-1]["max_slope"]) if record.samples else None,
        "tau_end": float(record.samples[-1]["tau"]) if record.samples else None,
    }
    record.final_state = state
    return record


@dataclass
class CharacteristicsOracle:
    """Exact pre-crossing Burgers solution built on sampled initial data."""

    theta0: np.ndarray
    w0: np.ndarray
    crossing_time: float

    def __call__(self, thetas, t):
        if t >= self.crossing_time:
            raise OracleDomainError(
                f"characteristics cross at t={self.crossing_time}; "
                f"queried at t={t}")
        pos = self.theta0 + self.w0 * t
        return np.interp(np.asarray(thetas, dtype=float), pos, self.w0)


def characteristics_oracle(theta0, w0) -> CharacteristicsOracle:
    """Flat-mode oracle: w rides characteristics theta0 + w0(theta0) t; the
    first crossing is at inf(-1/dw0) over the steepening region.

    The slope minimum skips the outermost two nodes (their edge-padded
    stencils are not valid) and slopes at finite-difference noise level.
    """
    theta0 = np.asarray(theta0, dtype=float)
    w0 = np.asarray(w0, dtype=float)
    dx = theta0[1] - theta0[0]
    slope = deriv1_c4(w0, dx)[2:-2]
    noise = 1e-12 * (1.0 + float(np.max(np.abs(w0)))) / dx
    neg = slope[slope < -noise]
    if len(neg) == 0:
        crossing = math.inf
    else:
        crossing = float(np.min(-1.0 / neg))
    return CharacteristicsOracle(theta0=theta0.copy(), w0=w0.copy(),
                                 crossing_time=crossing)
