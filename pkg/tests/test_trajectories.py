import numpy as np
import pytest

from sphereshock import trajectories as tr


def test_linear_field_exact_exponential():
    p = tr.integrate_trajectory(lambda s, y: 1.5 * y, 0.0, 0.3, 2.0, tol=1e-11)
    s = np.linspace(0.0, 2.0, 11)
    assert np.max(np.abs(p(s) - 0.3 * np.exp(1.5 * s))) < 1e-8


def test_zero_field_constant_path():
    p = tr.integrate_trajectory(lambda s, y: 0.0, 0.5, -0.7, 3.0)
    assert p(1.9) == pytest.approx(-0.7, abs=1e-14)


def test_step_halving_reference():
    # nonautonomous field vs a tiny-step RK4 reference integration
    def V(s, y):
        return 1.5 * y + 0.3 * np.sin(2.0 * s) - 0.1 * y**2 / (1 + y * y)

    tol = 1e-10
    p = tr.integrate_trajectory(V, 0.0, 0.2, 2.5, tol=tol)

    y, s, h = 0.2, 0.0, 2.5 / 60000
    for _ in range(60000):
        k1 = V(s, y)
        k2 = V(s + h / 2, y + h / 2 * k1)
        k3 = V(s + h / 2, y + h / 2 * k2)
        k4 = V(s + h, y + h * k3)
        y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s += h
    assert p(2.5) == pytest.approx(y, abs=5e-8)


def test_rejects_reversed_span():
    with pytest.raises(ValueError):
        tr.integrate_trajectory(lambda s, y: 0.0, 1.0, 0.0, 0.5)


def test_escape_box_status():
    p = tr.integrate_trajectory(lambda s, y: 1.5 * y, 0.0, 0.3, 50.0,
                                escape_box=(-5.0, 5.0))
    assert p.status == tr.EscapeStatus.ESCAPED
    assert p.s_end < 50.0


def test_growth_certificate_positive_for_linear_field():
    p = tr.integrate_trajectory(lambda s, y: 1.5 * y, 0.0, 0.1, 3.0)
    assert tr.growth_certificate(p, 1.0 / 3.0) > 0.0


def test_growth_certificate_detects_inward_field():
    p = tr.integrate_trajectory(lambda s, y: -y, 0.0, 0.5, 3.0)
    assert tr.growth_certificate(p, 1.0 / 3.0) < 0.0


def test_semigroup_property():
    V = lambda s, y: 1.5 * y + 0.2 * np.cos(s)
    p = tr.integrate_trajectory(V, 0.0, 0.4, 2.0, tol=1e-11)
    q = tr.integrate_trajectory(V, 1.0, p(1.0), 2.0, tol=1e-11)
    assert q(2.0) == pytest.approx(p(2.0), abs=1e-7)


def test_weighted_integral_constant_origin_path():
    p = tr.integrate_trajectory(lambda s, y: 0.0, 0.0, 0.0, 1.0)
    assert tr.weighted_integral(p, 2.0) == pytest.approx(1.0, abs=1e-12)


def test_weighted_integral_p_range_contract():
    p = tr.integrate_trajectory(lambda s, y: 0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        tr.weighted_integral(p, 0.05)
    with pytest.raises(ValueError):
        tr.weighted_integral(p, 11.0)


def test_weighted_integral_against_dense_trapezoid():
    p = tr.integrate_trajectory(lambda s, y: 1.5 * y, 0.0, 0.3, 2.0, tol=1e-12)
    for pw in (0.5, 1.0, 2.0):
        s = np.linspace(0.0, 2.0, 400001)
        ref = np.trapezoid((1.0 + p(s) ** 2) ** (-0.5 * pw), s)
        assert tr.weighted_integral(p, pw) == pytest.approx(ref, abs=1e-8)


def test_weighted_integral_majorant_for_growing_path():
    # |Phi| >= l e^{(s-s1)/3} makes the integral <= -4 ln l
    l = np.log(100.0) ** -5
    p = tr.integrate_trajectory(lambda s, y: y / 3.0, 0.0, l, 40.0)
    for pw in (0.5, 1.0, 2.0):
        assert tr.weighted_integral(p, pw) <= -4.0 * np.log(l)


def test_z_drift_certificate_sign():
    beta3, kappa0 = 0.5, 1.2

    def V_good(s, y):
        return -0.9 * beta3 * kappa0 * np.exp(0.5 * s)

    p = tr.integrate_trajectory(V_good, 0.0, 0.0, 2.0)
    margin = tr.z_drift_certificate(V_good, p, beta3, kappa0)
    assert margin is not None and margin > 0.0

    def V_bad(s, y):
        return 0.0

    p2 = tr.integrate_trajectory(V_bad, 0.0, 0.0, 2.0)
    assert tr.z_drift_certificate(V_bad, p2, beta3, kappa0) < 0.0


def test_frozen_field_interpolation():
    snaps = []
    for s in (4.0, 4.5, 5.0):
        y = np.linspace(-10, 10, 201)
        snaps.append({"s": s, "y": y, "g_w": np.sin(y) * s})
    f = tr.FrozenTransportField.from_snapshots(snaps, key="g_w")
    assert f.s_span == (4.0, 5.0)
    # midway in s, halfway interpolation
    got = f.g(4.25, 0.5)
    expect = 0.5 * (np.sin(0.5) * 4.0 + np.sin(0.5) * 4.5)
    assert got == pytest.approx(expect, abs=1e-12)
    assert f(4.25, 0.5) == pytest.approx(1.5 * 0.5 + expect, abs=1e-12)
