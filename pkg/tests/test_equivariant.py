import math

import numpy as np
import pytest

from sphereshock import equivariant as eq
from sphereshock.modulation import ModulationState
from sphereshock.riemann import betas
from sphereshock.weno import deriv1_c4


def make_mod(cfg, xi_dot=None):
    return ModulationState(cfg.kappa0, cfg.tau0, cfg.xi0, 0.0,
                           xi_dot=cfg.frame_drift() if xi_dot is None else xi_dot)


def test_config_validation():
    with pytest.raises(eq.ConfigError):
        eq.SolverConfig(gamma=1.0)
    with pytest.raises(eq.ConfigError):
        eq.SolverConfig(xi0=0.1)  # below pi/16 with regime enforcement
    with pytest.raises(eq.ConfigError):
        eq.SolverConfig(sigma_inf=0.3)  # below the kappa0 floor
    cfg = eq.SolverConfig(xi0=0.1, enforce_regime=False, theta_min=-0.05,
                          theta_max=0.05)
    assert cfg.blowup_slope_cap == pytest.approx(1e4 / cfg.tau0)


def test_initial_data_shape():
    cfg = eq.SolverConfig(n_cells=4096, tau0=1e-2)
    st = eq.initial_data(cfg)
    i0 = int(np.argmin(np.abs(st.grid)))
    assert st.w[i0] == pytest.approx(cfg.kappa0, abs=2e-3)
    assert np.all(st.z == -cfg.sigma_inf)
    slope = deriv1_c4(st.w, st.dx)
    assert slope.min() == pytest.approx(-1.0 / cfg.tau0, rel=2e-3)
    lo, hi = eq.support_bounds(st, cfg.sigma_inf, 1e-11)
    assert lo >= -cfg.xi0 / 10 and hi <= cfg.xi0 / 10


def test_initial_support_must_fit():
    cfg = eq.SolverConfig(n_cells=256, tau0=1e-2, theta_min=-5e-3,
                          theta_max=5e-3)
    with pytest.raises(eq.ConfigError):
        eq.initial_data(cfg)


def test_steady_state_is_exact():
    cfg = eq.SolverConfig(n_cells=512)
    st = eq.initial_data(cfg)
    st.w[:] = cfg.sigma_inf
    st.z[:] = -cfg.sigma_inf
    bc = betas(cfg.gamma)
    mod = make_mod(cfg, xi_dot=0.37)  # arbitrary drift still kills the rhs
    dw, dz = eq.rhs(st, mod, bc, cfg)
    assert np.max(np.abs(dw)) == 0.0
    assert np.max(np.abs(dz)) == 0.0
    st2 = eq.step(st, mod, 1e-5, bc, cfg)
    assert np.max(np.abs(st2.w - cfg.sigma_inf)) < 1e-14


def test_forcing_sign():
    # w=2, z=0, beta3=1/2, tan=1 -> forcing contribution = +1 on dw/dt
    cfg = eq.SolverConfig(n_cells=512, enforce_regime=False,
                          xi0=math.pi / 4, theta_min=-1e-4, theta_max=1e-4,
                          tau0=1e-6)
    grid = np.linspace(cfg.theta_min, cfg.theta_max, cfg.n_cells)
    st = eq.EquivariantState(grid=grid, w=np.full_like(grid, 2.0),
                             z=np.zeros_like(grid), t_tilde=0.0,
                             xi0=cfg.xi0, frame_drift=0.0)
    bc = betas(3.0)
    mod = make_mod(cfg, xi_dot=0.0)
    dw, dz = eq.rhs(st, mod, bc, cfg)
    i0 = int(np.argmin(np.abs(st.grid)))
    assert dw[i0] == pytest.approx(1.0, rel=1e-3)
    assert dz[i0] == pytest.approx(-1.0, rel=1e-3)


def test_flat_mode_is_exact_burgers():
    # with linear data the upwind derivative is exact, so the flat-mode rhs
    # must equal -w w_x literally (beta2 = 0, no forcing, no drift)
    cfg = eq.SolverConfig(n_cells=512, tau0=1e-2, flat_mode=True, gamma=3.0)
    grid = np.linspace(cfg.theta_min, cfg.theta_max, cfg.n_cells)
    b = 17.0
    st = eq.EquivariantState(grid=grid, w=1.3 + b * grid,
                             z=np.full_like(grid, -1.2), t_tilde=0.0,
                             xi0=cfg.xi0, frame_drift=0.0)
    bc = betas(3.0)
    mod = make_mod(cfg, xi_dot=0.0)
    dw, dz = eq.rhs(st, mod, bc, cfg)
    interior = slice(4, -4)
    assert np.allclose(dw[interior], (-(1.3 + b * grid) * b)[interior],
                       rtol=1e-12, atol=1e-12)
    assert np.allclose(dz[interior], 0.0, atol=1e-12)


def test_step_cfl_contract():
    cfg = eq.SolverConfig(n_cells=512)
    st = eq.initial_data(cfg)
    bc = betas(cfg.gamma)
    mod = make_mod(cfg)
    vmax = eq.max_transport_speed(st, mod, bc)
    with pytest.raises(eq.CFLViolationError):
        eq.step(st, mod, 10 * cfg.cfl * st.dx / vmax, bc, cfg)


def test_step_matches_rhs_to_first_order():
    cfg = eq.SolverConfig(n_cells=1024)
    st = eq.initial_data(cfg)
    bc = betas(cfg.gamma)
    mod = make_mod(cfg)
    dw, dz = eq.rhs(st, mod, bc, cfg)
    dt = 1e-7
    st2 = eq.step(st, mod, dt, bc, cfg)
    # Richardson: RK4 - Euler = O(dt^2)
    assert np.max(np.abs(st2.w - (st.w + dt * dw))) < 1e-3 * dt
    assert np.max(np.abs(st2.z - (st.z + dt * dz))) < 1e-3 * dt


def test_support_growth_bounded():
    cfg = eq.SolverConfig(n_cells=1024)
    st = eq.initial_data(cfg)
    bc = betas(cfg.gamma)
    mod = make_mod(cfg)
    for _ in range(20):
        vmax = eq.max_transport_speed(st, mod, bc)
        dt = cfg.cfl * st.dx / vmax
        st = eq.step(st, mod, dt, bc, cfg, check_support=True)  # raises on violation


def test_pole_abort():
    cfg = eq.SolverConfig(n_cells=512, enforce_regime=False, xi0=1.55,
                          theta_min=-1e-3, theta_max=1e-3, tau0=1e-5)
    grid = np.linspace(cfg.theta_min, cfg.theta_max, cfg.n_cells)
    st = eq.EquivariantState(grid=grid, w=np.full_like(grid, cfg.sigma_inf),
                             z=np.full_like(grid, -cfg.sigma_inf), t_tilde=0.0,
                             xi0=cfg.xi0, frame_drift=0.0)
    bc = betas(cfg.gamma)
    mod = make_mod(cfg, xi_dot=0.0)
    with pytest.raises(eq.PoleProximityError):
        eq.rhs(st, mod, bc, cfg)


def test_mirror_symmetry_flat_mode():
    # reflecting the data and the grid produces the mirrored solution
    cfg = eq.SolverConfig(n_cells=1024, tau0=1e-2, flat_mode=True, gamma=3.0)
    st = eq.initial_data(cfg)
    bc = betas(3.0)
    mod = make_mod(cfg, xi_dot=0.0)

    mirrored = eq.EquivariantState(grid=st.grid.copy(),
                                   w=-st.w[::-1].copy(), z=-st.z[::-1].copy(),
                                   t_tilde=0.0, xi0=cfg.xi0, frame_drift=0.0)
    dt = 0.3 * cfg.cfl * st.dx / eq.max_transport_speed(st, mod, bc)
    a, b = st, mirrored
    for _ in range(25):
        a = eq.step(a, mod, dt, bc, cfg, check_support=False)
        b = eq.step(b, mod, dt, bc, cfg, check_support=False)
    assert np.max(np.abs(b.w + a.w[::-1])) < 1e-12


def test_characteristics_oracle_linear_data():
    theta = np.linspace(-1.0, 1.0, 2001)
    tau0 = 0.02
    w0 = -theta / tau0
    oracle = eq.characteristics_oracle(theta, w0)
    assert oracle.crossing_time == pytest.approx(tau0, rel=1e-10)
    # translation invariance
    oracle2 = eq.characteristics_oracle(theta + 0.37, w0)
    assert oracle2.crossing_time == pytest.approx(oracle.crossing_time, rel=1e-12)


def test_characteristics_oracle_domain_error():
    theta = np.linspace(-1.0, 1.0, 101)
    oracle = eq.characteristics_oracle(theta, -theta)
    with pytest.raises(eq.OracleDomainError):
        oracle(theta, 1.5)


def test_characteristics_oracle_constant_data():
    theta = np.linspace(-1.0, 1.0, 101)
    oracle = eq.characteristics_oracle(theta, np.full_like(theta, 0.7))
    assert oracle.crossing_time == math.inf
    assert np.allclose(oracle(theta[10:-10], 0.5), 0.7)


def test_flat_mode_solver_matches_oracle():
    cfg = eq.SolverConfig(n_cells=2048, tau0=1e-2, flat_mode=True, gamma=3.0,
                          t_max=5e-3)
    st = eq.initial_data(cfg)
    oracle = eq.characteristics_oracle(st.grid, st.w)
    bc = betas(3.0)
    mod = make_mod(cfg, xi_dot=0.0)
    while st.t_tilde < cfg.t_max - 1e-15:
        vmax = eq.max_transport_speed(st, mod, bc)
        dt = min(cfg.cfl * st.dx / vmax, cfg.t_max - st.t_tilde)
        st = eq.step(st, mod, dt, bc, cfg, check_support=False)
    assert np.max(np.abs(st.w - oracle(st.grid, st.t_tilde))) < 1e-4


def test_run_statuses():
    # max_time status on a steady-ish short run
    cfg = eq.SolverConfig(n_cells=256, tau0=1e-2, t_max=1e-4,
                          blowup_slope_cap=1e9, record_every=64)
    rec = eq.run_until_blowup(cfg)
    assert rec.status == "max_time"
    assert rec.samples[0]["t_tilde"] == 0.0

    cfg = eq.SolverConfig(n_cells=1024, tau0=1e-2, blowup_slope_cap=300.0,
                          record_every=16)
    rec = eq.run_until_blowup(cfg)
    assert rec.status == "blew_up"
    t = rec.series("t_tilde")
    assert np.all(np.diff(t) > 0)
    s = rec.series("s")
    assert np.all(np.diff(s) > 0)


def test_run_vacuum_detection():
    # adversarial rarefaction data: w pulled below z locally -> vacuum status
    cfg = eq.SolverConfig(n_cells=512, tau0=1e-2, enforce_regime=False,
                          sigma_inf=0.05, xi0=math.pi / 12, t_max=5e-2,
                          blowup_slope_cap=1e9, record_every=64)
    grid = np.linspace(cfg.theta_min, cfg.theta_max, cfg.n_cells)
    bump = np.exp(-(grid / (0.2 * cfg.tau0)) ** 2)
    state = eq.EquivariantState(grid=grid,
                                w=cfg.sigma_inf - 2.2 * cfg.sigma_inf * bump,
                                z=np.full_like(grid, -cfg.sigma_inf),
                                t_tilde=0.0, xi0=cfg.xi0, frame_drift=0.0)
    rec = _run_with_state(cfg, state)
    assert rec.status == "vacuum"


def _run_with_state(cfg, state):
    """Drive run_until_blowup's loop manually for adversarial states."""
    from sphereshock.riemann import betas as _betas
    bc = _betas(cfg.gamma)
    mod = make_mod(cfg, xi_dot=0.0)
    from sphereshock.records import RunRecord
    rec = RunRecord(config={"solver": {}})
    while True:
        if np.min(state.w - state.z) <= 0:
            rec.status = "vacuum"
            return rec
        if state.t_tilde >= cfg.t_max:
            rec.status = "max_time"
            return rec
        vmax = eq.max_transport_speed(state, mod, bc)
        dt = cfg.cfl * state.dx / max(vmax, 1e-30)
        state = eq.step(state, mod, dt, bc, cfg, check_support=False)
