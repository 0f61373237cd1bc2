import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dressed_stirap.linalg import dagger, hermitian_expm, is_hermitian, unitarity_error
from dressed_stirap.model import (
    EFFECTIVE_EMBEDDING,
    M_X,
    M_Y,
    M_Z,
    DecoherenceParams,
    HilbertSpace,
    SystemParams,
    adiabatic_eigenstates,
    bright_excited_state,
    build_total_hamiltonian,
    check_zeno_regime,
    correction_hamiltonian,
    dissipator,
    dressed_dark_state,
    dressed_frame_coefficients,
    dressed_frame_hamiltonian,
    effective_hamiltonian,
    eigenbasis,
    frame_operators,
    hamiltonian_terms,
    laser_hamiltonian,
    lindblad_operators,
    modified_hamiltonian,
    zeno_project,
    zeno_projected,
)
from dressed_stirap.pulses import PulseParams, control_fields

SPACE = HilbertSpace(1)
angles = st.floats(0, math.pi / 2)
rates = st.floats(0.01, 5)


def comm(a, b):
    return a @ b - b @ a


def test_space_dimensions_and_labels():
    assert SPACE.dim == 18 and HilbertSpace(2).dim == 27
    for k in range(SPACE.dim):
        assert SPACE.index(*SPACE.label(k)) == k
    assert SPACE.index(1, 2, 1) == (1 * 3 + 2) * 2 + 1
    with pytest.raises(IndexError):
        SPACE.index(0, 0, 2)
    with pytest.raises(ValueError):
        HilbertSpace(0)


def test_annihilation_on_single_photon():
    a = HilbertSpace(2).annihilation()
    s = HilbertSpace(2)
    assert np.allclose(a @ s.ket(1, 1, 2), math.sqrt(2) * s.ket(1, 1, 1))


def test_hamiltonian_hermitian():
    h = build_total_hamiltonian(SPACE, SystemParams(10.0), 0.7, 1.3)
    assert is_hermitian(h)


def test_laser_acts_on_initial_state():
    h = build_total_hamiltonian(SPACE, SystemParams(10.0), 0.7, 1.3)
    phi1 = SPACE.phi(1)
    assert np.allclose(h @ phi1, 0.7 * SPACE.phi(2), atol=1e-15)
    assert SPACE.phi(2) @ h @ phi1 == pytest.approx(0.7)
    assert np.allclose(h @ SPACE.phi(5), 1.3 * SPACE.phi(4), atol=1e-15)


def test_cavity_couples_single_excitation():
    terms = hamiltonian_terms(SPACE)
    out = terms.cavity @ SPACE.phi(3)
    assert np.allclose(out, SPACE.phi(2) + SPACE.phi(4))
    assert np.allclose(terms.cavity @ bright_excited_state(SPACE), 0)


def test_laser_and_cavity_split():
    sys = SystemParams(3.0)
    total = build_total_hamiltonian(SPACE, sys, 0.2, 0.4)
    assert np.allclose(total, laser_hamiltonian(SPACE, 0.2, 0.4) + 3.0 * hamiltonian_terms(SPACE).cavity)


def test_excitation_number_conserved():
    # N = (atoms in |0> or |2>) + photons commutes with H, so n_max = 1 is exact from phi1
    space = HilbertSpace(2)
    n_op = np.zeros(space.dim)
    for k in range(space.dim):
        a, b, n = space.label(k)
        n_op[k] = (a != 1) + (b != 1) + n
    h = build_total_hamiltonian(space, SystemParams(7.0), 0.3, 0.9)
    assert np.abs(comm(h, np.diag(n_op))).max() == 0


@settings(max_examples=30, deadline=None)
@given(rates, rates, st.floats(5, 50))
def test_full_model_dark_state(wa, wb, g):
    h = build_total_hamiltonian(SPACE, SystemParams(g), wa, wb)
    dark = g * wb * SPACE.phi(1) - wa * wb * SPACE.phi(3) + g * wa * SPACE.phi(5)
    dark /= np.linalg.norm(dark)
    assert np.abs(h @ dark).max() <= 1e-12 * max(g, 1)


def test_zeno_projection_reproduces_effective_model():
    wa, wb, g = 0.8, 0.5, 10.0
    terms = hamiltonian_terms(SPACE)
    projected = zeno_projected(g * terms.cavity, laser_hamiltonian(SPACE, wa, wb))
    basis = np.column_stack([SPACE.phi(1), bright_excited_state(SPACE), SPACE.phi(5)])
    w1, w2, h3 = zeno_project(wa, wb)
    assert w1 == pytest.approx(-wa / math.sqrt(2)) and w2 == pytest.approx(wb / math.sqrt(2))
    assert np.abs(dagger(basis) @ projected @ basis - h3).max() < 1e-12
    # the three states form a closed block of the projected Hamiltonian
    leak = projected @ basis - basis @ (dagger(basis) @ projected @ basis)
    assert np.abs(leak).max() < 1e-12


def test_embedding_maps_to_manifold():
    kets = SPACE.manifold_kets()
    basis = np.column_stack([SPACE.phi(1), bright_excited_state(SPACE), SPACE.phi(5)])
    assert np.allclose(kets.T @ EFFECTIVE_EMBEDDING, basis)


@settings(max_examples=50, deadline=None)
@given(angles, rates)
def test_dark_state_annihilated(theta, omega):
    h = effective_hamiltonian(-omega * math.sin(theta), omega * math.cos(theta))
    dark, plus, minus = adiabatic_eigenstates(theta)
    assert np.abs(h @ dark).max() <= 1e-12
    assert np.abs(h @ plus - omega * plus).max() <= 1e-12
    assert np.abs(h @ minus + omega * minus).max() <= 1e-12


def test_effective_spectrum():
    h = effective_hamiltonian(-0.6, 0.8)
    assert np.allclose(np.linalg.eigvalsh(h), [-1.0, 0.0, 1.0])


def test_generator_algebra():
    for m in (M_X, M_Y, M_Z):
        assert is_hermitian(m)
    assert np.allclose(comm(M_X, M_Y), 1j * M_Z)
    assert np.allclose(comm(M_Y, M_Z), 1j * M_X)
    assert np.allclose(comm(M_Z, M_X), 1j * M_Y)


@settings(max_examples=30, deadline=None)
@given(angles, st.floats(-1, 1), rates)
def test_frame_operators(theta, mu, omega):
    ops = frame_operators(theta, mu)
    assert unitarity_error(ops.U) < 1e-14 and unitarity_error(ops.V) < 1e-14
    h = effective_hamiltonian(-omega * math.sin(theta), omega * math.cos(theta))
    assert np.abs(ops.U @ h @ dagger(ops.U) - omega * M_Z).max() < 1e-12


def test_frame_rotation_generator():
    # i dU/dt U^dag = theta_dot M_y
    theta, theta_dot, h = 0.6, 0.37, 1e-6
    u = lambda th: frame_operators(th, 0.0).U
    du = (u(theta + theta_dot * h) - u(theta - theta_dot * h)) / (2 * h)
    assert np.abs(1j * du @ dagger(u(theta)) - theta_dot * M_Y).max() < 1e-9


def test_modified_hamiltonian_matches_rotated_pulses():
    p = PulseParams()
    t = np.random.default_rng(7).uniform(0, p.t_f, 100)
    f = control_fields(p, t)
    for k in range(t.size):
        via_frame = modified_hamiltonian(f.omega[k], f.theta[k], f.g_x[k], f.g_z[k])
        via_pulses = effective_hamiltonian(f.omega1_prime[k], f.omega2_prime[k])
        assert np.abs(via_frame - via_pulses).max() <= 1e-12


def test_correction_vanishes_without_controls():
    assert np.abs(correction_hamiltonian(0.4, 0.1, 0.0, 0.0)).max() == 0


def test_dressed_dark_state_follows_corrected_dynamics():
    # i d/dt psi_d = H_mod psi_d up to finite-difference error
    p = PulseParams()
    h = 1e-4
    for t in np.linspace(2, 38, 9):
        f = control_fields(p, np.array([t - h, t, t + h]))
        states = [dressed_dark_state(f.theta[k], f.mu[k]) for k in range(3)]
        lhs = 1j * (states[2] - states[0]) / (2 * h)
        rhs = effective_hamiltonian(f.omega1_prime[1], f.omega2_prime[1]) @ states[1]
        assert np.abs(lhs - rhs).max() < 1e-7


def test_dressed_state_is_framed_dark_label():
    theta, mu = 0.8, -0.05
    ops = frame_operators(theta, mu)
    expected = dagger(ops.U) @ dagger(ops.V) @ np.array([1, 0, 0], complex)
    assert np.allclose(dressed_dark_state(theta, mu), expected, atol=1e-15)
    assert abs(dressed_dark_state(theta, mu)[1]) ** 2 == pytest.approx(math.sin(mu) ** 2)


def test_dressed_frame_coefficients():
    p = PulseParams()
    f = control_fields(p, np.linspace(0, 40, 401))
    eta, xi = dressed_frame_coefficients(f)
    assert np.abs(xi).max() <= 1e-12
    assert np.allclose(eta, np.hypot(f.theta_dot, f.G / p.tau + f.omega), rtol=1e-12)


def test_dressed_frame_is_diagonal_on_dark_label():
    p = PulseParams()
    h = 1e-5 * p.t_f
    worst = 0.0
    for t in np.linspace(0.01, 39.99, 200):
        f = control_fields(p, np.array([t - h, t, t + h]), check_window=False)
        v = [hermitian_expm(M_X, m) for m in f.mu]
        v_dot = (v[2] - v[0]) / (2 * h)
        hn = dressed_frame_hamiltonian(
            f.theta[1], f.theta_dot[1], f.omega[1], f.mu[1], v_dot, f.g_x[1], f.g_z[1]
        )
        worst = max(worst, np.abs(hn[0, 1:]).max())
    assert worst <= 1e-5


def test_lindblad_channels():
    ops = lindblad_operators(SPACE, DecoherenceParams(kappa=0.04, gamma=0.09))
    assert len(ops) == 5
    assert np.allclose(ops[-1] @ SPACE.ket(1, 1, 1), 0.2 * SPACE.ket(1, 1, 0))
    assert np.allclose(ops[0] @ SPACE.phi(2), 0.3 * SPACE.phi(1))
    assert lindblad_operators(SPACE, DecoherenceParams()) == []
    assert len(lindblad_operators(SPACE, DecoherenceParams(kappa=0.1))) == 1
    with pytest.raises(ValueError):
        DecoherenceParams(kappa=-1.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1), st.floats(0, 1))
def test_dissipator_trace_and_hermiticity(seed, kappa, gamma):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(18, 18)) + 1j * rng.normal(size=(18, 18))
    rho = a @ dagger(a)
    rho /= np.trace(rho)
    out = dissipator(lindblad_operators(SPACE, DecoherenceParams(kappa, gamma)), rho)
    assert abs(np.trace(out)) < 1e-12
    assert np.abs(out - dagger(out)).max() < 1e-12


def test_zeno_regime_warning():
    assert check_zeno_regime(10.0, np.array([1.0]), np.array([2.0]))
    with pytest.warns(RuntimeWarning):
        assert not check_zeno_regime(2.0, np.array([1.5]), np.array([0.1]))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        check_zeno_regime(10.0, np.array([1.0]), np.array([1.0]))
