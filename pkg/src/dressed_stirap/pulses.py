"""Gaussian STIRAP pulses and their dressed-state corrections.

Sign convention: the pump coupling of the three-level model is taken as
``omega1 = -Omega sin(theta)`` and the Stokes coupling as
``omega2 = Omega cos(theta)``, with ``theta`` in [0, pi/2].  Only with this
sign is ``cos(theta)|phi1> + sin(theta)|phi5>`` annihilated by the effective
Hamiltonian; populations are insensitive to it.  The physical drives are
``omega_A = -sqrt(2) omega1 >= 0`` and ``omega_B = sqrt(2) omega2 >= 0``.

All quantities are dimensionless: frequencies in units of the nominal peak
Rabi frequency, times in its inverse.  Every function accepts scalars or
numpy arrays of times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

SQRT2 = math.sqrt(2.0)
TRANSFER_THETA = math.pi / 2
ENTANGLEMENT_THETA = math.pi / 4

# relative step of the finite-difference derivative of mu
MU_DOT_REL_STEP = 1e-5
_TIME_SLACK = 1e-12


@dataclass(frozen=True)
class PulseParams:
    """Scalar knobs of the pulse design.

    ``t0`` and ``tau`` default to ``3 t_f / 40`` and ``0.1 t_f``.
    ``literal_regularizer`` selects ``sech(t / tau)`` instead of the
    default ``sech((t - t_f/2) / tau)``.
    """

    omega0: float = 1.0
    t_f: float = 40.0
    theta_f: float = TRANSFER_THETA
    t0: Optional[float] = None
    tau: Optional[float] = None
    literal_regularizer: bool = False

    def __post_init__(self):
        if not self.t_f > 0:
            raise ValueError(f"t_f must be positive, got {self.t_f}")
        if self.t0 is None:
            object.__setattr__(self, "t0", 3.0 * self.t_f / 40.0)
        if self.tau is None:
            object.__setattr__(self, "tau", 0.1 * self.t_f)
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not 0.0 < self.theta_f <= math.pi / 2 + 1e-15:
            raise ValueError(f"theta_f must lie in (0, pi/2], got {self.theta_f}")
        if not self.t0 < self.t_f / 2:
            raise ValueError(f"t0 must be below t_f/2, got {self.t0}")
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")

    def rescaled(self, **changes) -> "PulseParams":
        """Copy with changes; ``t0`` and ``tau`` follow a changed ``t_f``
        unless given explicitly."""
        if "t_f" in changes:
            changes.setdefault("t0", None)
            changes.setdefault("tau", None)
        return replace(self, **changes)


def _check_window(p: PulseParams, t):
    t = np.asarray(t, dtype=float)
    slack = _TIME_SLACK * p.t_f
    if np.any(t < -slack) or np.any(t > p.t_f + slack):
        raise ValueError(f"time outside the pulse window [0, {p.t_f}]")
    return t


def _envelopes(p: PulseParams, t):
    """Pump magnitude, Stokes amplitude and their time derivatives."""
    x1 = t - p.t_f / 2 - p.t0
    x2 = t - p.t_f / 2 + p.t0 / 2
    tau2 = p.tau * p.tau
    e1 = np.exp(-x1 * x1 / tau2)
    e2 = np.exp(-x2 * x2 / tau2)
    s, c = math.sin(p.theta_f), math.cos(p.theta_f)
    pump = p.omega0 * s * e1
    stokes = p.omega0 * (c * e1 + e2)
    d_pump = -2.0 * x1 / tau2 * pump
    d_stokes = p.omega0 * (c * e1 * (-2.0 * x1 / tau2) + e2 * (-2.0 * x2 / tau2))
    return pump, stokes, d_pump, d_stokes


def gaussian_pulses(p: PulseParams, t):
    """Original STIRAP couplings ``(omega1, omega2)``; ``omega1 <= 0``."""
    t = _check_window(p, t)
    pump, stokes, _, _ = _envelopes(p, t)
    return -pump, stokes


def mixing_angle(omega1, omega2):
    """Mixing angle in [0, pi/2] from the pulse magnitudes."""
    a, b = np.abs(omega1), np.abs(omega2)
    if np.any((a == 0) & (b == 0)):
        raise ValueError("mixing angle undefined when both pulses vanish")
    return np.arctan2(a, b)


def _theta_dot(p, t):
    pump, stokes, d_pump, d_stokes = _envelopes(p, t)
    omega_sq = pump * pump + stokes * stokes
    if np.any(omega_sq == 0):
        raise ValueError("theta_dot undefined where both pulses vanish")
    return (d_pump * stokes - pump * d_stokes) / omega_sq


def theta_dot(p: PulseParams, t):
    """Analytic rate of the mixing angle, the nonadiabatic coupling."""
    return _theta_dot(p, _check_window(p, t))


def _regularizer(p, t):
    centre = 0.0 if p.literal_regularizer else p.t_f / 2
    return 1.0 / np.cosh((t - centre) / p.tau)


def regularizer(t, p: PulseParams):
    """sech((t - t_f/2) / tau), or sech(t / tau) with the literal flag."""
    return _regularizer(p, _check_window(p, t))


def _mu(p, t):
    pump, stokes, _, _ = _envelopes(p, t)
    omega = np.hypot(pump, stokes)
    return -np.arctan(_theta_dot(p, t) / (_regularizer(p, t) / p.tau + omega))


def euler_angle_mu(p: PulseParams, t):
    """Dressing angle mu = -arctan(theta_dot / (G/tau + Omega))."""
    return _mu(p, _check_window(p, t))


def _mu_dot(p, t):
    h = MU_DOT_REL_STEP * p.t_f
    return (
        -_mu(p, t + 2 * h) + 8 * _mu(p, t + h) - 8 * _mu(p, t - h) + _mu(p, t - 2 * h)
    ) / (12 * h)


def euler_angle_rate(p: PulseParams, t):
    """d(mu)/dt by a fourth-order central difference of step ``1e-5 t_f``."""
    return _mu_dot(p, _check_window(p, t))


def control_params(p: PulseParams, t):
    """Correction amplitudes ``(g_x, g_z)``.

    ``g_x`` is mu's time derivative.  ``g_z = -Omega - theta_dot / tan(mu)``
    reduces exactly to ``G / tau`` once mu is substituted, and that
    singularity-free form is what gets evaluated.
    """
    t = _check_window(p, t)
    return _mu_dot(p, t), _regularizer(p, t) / p.tau


def modified_pulses(p: PulseParams, t):
    """Corrected couplings ``(omega1', omega2')`` of the dressed scheme."""
    f = control_fields(p, t)
    return f.omega1_prime, f.omega2_prime


def apply_correction(omega, theta, g_x, g_z):
    """Rotate the corrections back into pump/Stokes couplings."""
    ct, st = np.cos(theta), np.sin(theta)
    return g_x * ct - (g_z + omega) * st, g_x * st + (g_z + omega) * ct


@dataclass(frozen=True)
class ControlFields:
    """All pulse-derived time series sampled on a common time array."""

    t: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray
    omega: np.ndarray
    theta: np.ndarray
    theta_dot: np.ndarray
    G: np.ndarray
    mu: np.ndarray
    mu_dot: np.ndarray
    g_x: np.ndarray
    g_z: np.ndarray
    omega1_prime: np.ndarray
    omega2_prime: np.ndarray
    params: PulseParams = field(repr=False, default=None)

    @property
    def omegaA(self):
        return -SQRT2 * self.omega1

    @property
    def omegaB(self):
        return SQRT2 * self.omega2

    @property
    def omegaA_prime(self):
        return -SQRT2 * self.omega1_prime

    @property
    def omegaB_prime(self):
        return SQRT2 * self.omega2_prime

    def drives(self, scheme: str):
        """Physical drive amplitudes ``(omega_A, omega_B)`` for a scheme."""
        if scheme == "dressed":
            return self.omegaA_prime, self.omegaB_prime
        if scheme == "stirap":
            return self.omegaA, self.omegaB
        raise ValueError(f"unknown pulse scheme {scheme!r}")

    def couplings(self, scheme: str):
        """Three-level couplings ``(omega1, omega2)`` for a scheme."""
        if scheme == "dressed":
            return self.omega1_prime, self.omega2_prime
        if scheme == "stirap":
            return self.omega1, self.omega2
        raise ValueError(f"unknown pulse scheme {scheme!r}")

    def table(self) -> dict:
        """Columns of the exported pulse table, in export order."""
        return {
            "t": self.t,
            "omega1": self.omega1,
            "omega2": self.omega2,
            "theta": self.theta,
            "mu": self.mu,
            "g_x": self.g_x,
            "g_z": self.g_z,
            "omega1_prime": self.omega1_prime,
            "omega2_prime": self.omega2_prime,
            "omegaA_prime": self.omegaA_prime,
            "omegaB_prime": self.omegaB_prime,
        }


def control_fields(p: PulseParams, t, *, check_window: bool = True) -> ControlFields:
    """Evaluate every pulse quantity at the times ``t``.

    ``check_window=False`` allows evaluation slightly beyond ``[0, t_f]``;
    the analytic forms extend smoothly there.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if check_window:
        _check_window(p, t)
    pump, stokes, d_pump, d_stokes = _envelopes(p, t)
    omega = np.hypot(pump, stokes)
    theta = mixing_angle(pump, stokes)
    th_dot = (d_pump * stokes - pump * d_stokes) / (omega * omega)
    G = _regularizer(p, t)
    mu = -np.arctan(th_dot / (G / p.tau + omega))
    mu_dot = _mu_dot(p, t)
    g_x, g_z = mu_dot, G / p.tau
    w1p, w2p = apply_correction(omega, theta, g_x, g_z)
    return ControlFields(
        t=t, omega1=-pump, omega2=stokes, omega=omega, theta=theta,
        theta_dot=th_dot, G=G, mu=mu, mu_dot=mu_dot, g_x=g_x, g_z=g_z,
        omega1_prime=w1p, omega2_prime=w2p, params=p,
    )


def pulse_grid(p: PulseParams, n_points: int = 2001) -> np.ndarray:
    return np.linspace(0.0, p.t_f, n_points)
