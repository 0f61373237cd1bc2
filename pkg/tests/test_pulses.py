import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dressed_stirap.pulses import (
    ENTANGLEMENT_THETA,
    PulseParams,
    apply_correction,
    control_fields,
    control_params,
    euler_angle_mu,
    euler_angle_rate,
    gaussian_pulses,
    mixing_angle,
    modified_pulses,
    pulse_grid,
    regularizer,
    theta_dot,
)

P = PulseParams()


def gauss(t, centre, tau):
    return math.exp(-((t - centre) / tau) ** 2)


def test_defaults_follow_duration():
    p = PulseParams(t_f=60.0)
    assert p.t0 == pytest.approx(4.5) and p.tau == pytest.approx(6.0)
    assert p.rescaled(t_f=20.0).t0 == pytest.approx(1.5)
    assert PulseParams(t0=1.0).rescaled(omega0=2.0).t0 == 1.0


@pytest.mark.parametrize("kwargs", [
    {"t_f": 0.0}, {"tau": -1.0}, {"theta_f": 0.0}, {"theta_f": 2.0},
    {"omega0": 0.0}, {"t0": 25.0},
])
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        PulseParams(**kwargs)


def test_transfer_peaks():
    # pump peaks at t_f/2 + t0, stokes at t_f/2 - t0/2, both with height omega0
    w1, _ = gaussian_pulses(P, 20.0 + P.t0)
    _, w2 = gaussian_pulses(P, 20.0 - P.t0 / 2)
    assert float(w1) == pytest.approx(-1.0, abs=1e-15)
    assert float(w2) == pytest.approx(1.0 + 0.0, abs=1e-15)


def test_entanglement_pulses_by_hand():
    p = PulseParams(theta_f=ENTANGLEMENT_THETA)
    t = 17.3
    e1 = gauss(t, 20 + 3, 4)
    e2 = gauss(t, 20 - 1.5, 4)
    w1, w2 = gaussian_pulses(p, t)
    assert float(w1) == pytest.approx(-math.sqrt(0.5) * e1, rel=1e-14)
    assert float(w2) == pytest.approx(math.sqrt(0.5) * e1 + e2, rel=1e-14)


def test_window_enforced():
    with pytest.raises(ValueError):
        gaussian_pulses(P, 40.5)
    with pytest.raises(ValueError):
        theta_dot(P, -1.0)


def test_mixing_angle():
    assert mixing_angle(-1.0, 1.0) == pytest.approx(math.pi / 4)
    assert mixing_angle(0.0, 2.0) == 0.0
    assert mixing_angle(-3.0, 0.0) == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        mixing_angle(0.0, 0.0)


def test_theta_dot_matches_finite_difference():
    t = np.linspace(1, 39, 77)
    h = 1e-4
    w = lambda s: mixing_angle(*gaussian_pulses(P, s))
    fd = (w(t + h) - w(t - h)) / (2 * h)
    assert np.abs(theta_dot(P, t) - fd).max() < 1e-7


def test_no_delay_means_no_mixing_rate():
    # with coincident pulses the ratio is constant
    p = PulseParams(theta_f=ENTANGLEMENT_THETA, t0=0.0)
    assert np.abs(theta_dot(p, pulse_grid(p, 101))).max() < 1e-15


def test_regularizer_values():
    assert float(regularizer(20.0, P)) == 1.0
    assert float(regularizer(24.0, P)) == pytest.approx(0.6480542736638855, rel=1e-14)
    assert float(regularizer(0.0, P)) == pytest.approx(1 / math.cosh(5), rel=1e-14)
    lit = PulseParams(literal_regularizer=True)
    assert float(regularizer(0.0, lit)) == 1.0
    assert float(regularizer(4.0, lit)) == pytest.approx(1 / math.cosh(1), rel=1e-14)


def test_gz_is_regularizer_over_tau():
    t = pulse_grid(P, 401)
    _, g_z = control_params(P, t)
    assert np.abs(g_z * P.tau - regularizer(t, P)).max() <= 1e-12


def test_mu_definition():
    t = np.linspace(2, 38, 19)
    f = control_fields(P, t)
    expected = -np.arctan(f.theta_dot / (f.G / P.tau + f.omega))
    assert np.abs(euler_angle_mu(P, t) - expected).max() < 1e-15
    # theta increases for a counterintuitive sequence, so mu is negative
    assert np.all(f.theta_dot > 0) and np.all(f.mu < 0)


def test_mu_rate_matches_coarse_difference():
    t = np.linspace(5, 35, 13)
    h = 1e-3
    fd = (euler_angle_mu(P, t + h) - euler_angle_mu(P, t - h)) / (2 * h)
    assert np.abs(euler_angle_rate(P, t) - fd).max() < 1e-6


def test_mu_shrinks_with_duration():
    peaks = [np.abs(control_fields(P.rescaled(t_f=tf), pulse_grid(P.rescaled(t_f=tf))).mu).max()
             for tf in (20.0, 40.0, 60.0, 100.0)]
    assert all(a > b for a, b in zip(peaks, peaks[1:]))


def test_theta_scales_with_duration():
    s = np.linspace(0, 1, 51)
    a = control_fields(P, 40.0 * s).theta
    b = control_fields(P.rescaled(t_f=90.0), 90.0 * s).theta
    assert np.abs(a - b).max() < 1e-13


def test_theta_boundaries():
    f = control_fields(P, np.array([0.0, 40.0]))
    assert f.theta[0] <= 1e-4
    assert abs(f.theta[1] - math.pi / 2) <= 1e-4


def test_correction_closer_for_longer_durations():
    def relative_change(tf):
        p = P.rescaled(t_f=tf)
        f = control_fields(p, pulse_grid(p))
        return np.abs(f.omega2_prime - f.omega2).max() / np.abs(f.omega2).max()

    assert relative_change(40.0) < relative_change(10.0)


def test_zero_correction_restores_original():
    f = control_fields(P, pulse_grid(P, 201))
    w1, w2 = apply_correction(f.omega, f.theta, 0.0, 0.0)
    assert np.abs(w1 - f.omega1).max() < 1e-14
    assert np.abs(w2 - f.omega2).max() < 1e-14


def test_tails_approach_regularizer():
    # far from the pulses the corrected couplings reduce to (0, G/tau)-ish
    f = control_fields(P, np.array([0.0]))
    assert abs(f.omega1_prime[0]) < 1e-3
    assert f.omega2_prime[0] == pytest.approx(f.G[0] / P.tau + f.omega[0], rel=1e-3)


def test_modified_pulses_match_fields():
    t = np.linspace(0, 40, 11)
    w1, w2 = modified_pulses(P, t)
    f = control_fields(P, t)
    assert np.array_equal(w1, f.omega1_prime) and np.array_equal(w2, f.omega2_prime)


def test_physical_drives():
    f = control_fields(P, pulse_grid(P, 101))
    assert np.all(f.omegaA >= 0) and np.all(f.omegaB >= 0)
    assert np.allclose(f.omegaA_prime, -math.sqrt(2) * f.omega1_prime)
    a, b = f.drives("stirap")
    assert np.array_equal(a, f.omegaA)
    with pytest.raises(ValueError):
        f.drives("bogus")


def test_table_columns():
    cols = list(control_fields(P, pulse_grid(P, 5)).table())
    assert cols[:3] == ["t", "omega1", "omega2"] and "omegaB_prime" in cols


@settings(max_examples=40, deadline=None)
@given(st.floats(10, 100), st.floats(0.3, math.pi / 2), st.floats(0, 1))
def test_correction_preserves_rotation_norm(tf, theta_f, frac):
    # the correction is a rotation of (g_x, g_z + Omega) by theta
    p = PulseParams(t_f=tf, theta_f=theta_f)
    f = control_fields(p, frac * tf)
    lhs = f.omega1_prime ** 2 + f.omega2_prime ** 2
    rhs = f.g_x ** 2 + (f.g_z + f.omega) ** 2
    assert np.allclose(lhs, rhs, rtol=1e-12)
    assert np.all(np.isfinite(f.mu)) and np.all(np.abs(f.mu) < math.pi / 2)
