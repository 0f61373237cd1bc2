"""Atom-atom-cavity operators, the Zeno-projected three-level model and
the adiabatic / dressed frame machinery.

Three-level vectors and matrices are expressed in the ordered basis
``(|phi1>, |phi_d>, |phi5>)`` where ``|phi_d> = (-|phi2> + |phi4>)/sqrt(2)``
is the excited state left dark by the cavity.  Frame operators act on the
time-independent adiabatic labels ordered ``(d, +, -)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .linalg import dagger, hermitian_expm, tensor_product

SQRT2 = math.sqrt(2.0)
ATOM_LEVELS = 3

# atom-level labels of the five manifold states (atom A, atom B, photons)
MANIFOLD_LABELS = (
    (0, 1, 0),  # phi1
    (2, 1, 0),  # phi2
    (1, 1, 1),  # phi3
    (1, 2, 0),  # phi4
    (1, 0, 0),  # phi5
)

# rows map a three-level state onto the amplitudes of phi1..phi5
EFFECTIVE_EMBEDDING = np.array(
    [
        [1, 0, 0],
        [0, -1 / SQRT2, 0],
        [0, 0, 0],
        [0, 1 / SQRT2, 0],
        [0, 0, 1],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class HilbertSpace:
    """Two three-level atoms and a cavity mode truncated at ``n_max`` photons."""

    n_max: int = 1

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"photon cutoff must be an integer >= 1, got {self.n_max}")

    @property
    def n_fock(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return ATOM_LEVELS * ATOM_LEVELS * self.n_fock

    def index(self, a: int, b: int, n: int) -> int:
        if not (0 <= a < 3 and 0 <= b < 3 and 0 <= n <= self.n_max):
            raise IndexError(f"basis label {(a, b, n)} outside the space")
        return (a * ATOM_LEVELS + b) * self.n_fock + n

    def label(self, index: int) -> tuple[int, int, int]:
        if not 0 <= index < self.dim:
            raise IndexError(f"flat index {index} outside the space")
        ab, n = divmod(index, self.n_fock)
        a, b = divmod(ab, ATOM_LEVELS)
        return a, b, n

    def ket(self, a: int, b: int, n: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(a, b, n)] = 1.0
        return v

    def manifold_kets(self) -> np.ndarray:
        """Rows are |phi1> ... |phi5>."""
        return np.array([self.ket(*lab) for lab in MANIFOLD_LABELS])

    def phi(self, k: int) -> np.ndarray:
        return self.ket(*MANIFOLD_LABELS[k - 1])

    def atom_op(self, atom: str, m: int, n: int) -> np.ndarray:
        """|m><n| acting on atom ``'A'`` or ``'B'``."""
        s = np.zeros((3, 3), dtype=complex)
        s[m, n] = 1.0
        i3, ic = np.eye(3), np.eye(self.n_fock)
        if atom == "A":
            return tensor_product(s, i3, ic)
        if atom == "B":
            return tensor_product(i3, s, ic)
        raise ValueError(f"atom must be 'A' or 'B', got {atom!r}")

    def annihilation(self) -> np.ndarray:
        a = np.diag(np.sqrt(np.arange(1, self.n_fock)), k=1).astype(complex)
        return tensor_product(np.eye(3), np.eye(3), a)


@dataclass(frozen=True)
class SystemParams:
    """Common atom-cavity coupling ``g`` (units of the peak Rabi frequency)."""

    g: float = 10.0

    def __post_init__(self):
        if not self.g >= 0:
            raise ValueError(f"coupling g must be non-negative, got {self.g}")


@dataclass(frozen=True)
class DecoherenceParams:
    """Cavity leakage ``kappa`` and per-channel atomic decay ``gamma``."""

    kappa: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("decay rates must be non-negative")

    @property
    def closed(self) -> bool:
        return self.kappa == 0 and self.gamma == 0


class HamiltonianTerms(NamedTuple):
    """Static pieces of the full Hamiltonian:
    ``H = omega_A * drive_A + omega_B * drive_B + g * cavity``."""

    drive_A: np.ndarray
    drive_B: np.ndarray
    cavity: np.ndarray


def hamiltonian_terms(space: HilbertSpace) -> HamiltonianTerms:
    a = space.annihilation()
    parts = []
    for atom in ("A", "B"):
        s20 = space.atom_op(atom, 2, 0)
        parts.append(s20 + dagger(s20))
    cav = np.zeros((space.dim, space.dim), dtype=complex)
    for atom in ("A", "B"):
        term = a @ space.atom_op(atom, 2, 1)
        cav += term + dagger(term)
    return HamiltonianTerms(parts[0], parts[1], cav)


def laser_hamiltonian(space: HilbertSpace, drive_a: float, drive_b: float) -> np.ndarray:
    terms = hamiltonian_terms(space)
    return drive_a * terms.drive_A + drive_b * terms.drive_B


def cavity_hamiltonian(space: HilbertSpace, sys: SystemParams) -> np.ndarray:
    return sys.g * hamiltonian_terms(space).cavity


def build_total_hamiltonian(
    space: HilbertSpace, sys: SystemParams, drive_a: float, drive_b: float
) -> np.ndarray:
    """Resonant laser plus cavity coupling for instantaneous real drives."""
    terms = hamiltonian_terms(space)
    return drive_a * terms.drive_A + drive_b * terms.drive_B + sys.g * terms.cavity


def bright_excited_state(space: HilbertSpace) -> np.ndarray:
    """(-|phi2> + |phi4>)/sqrt(2), the cavity-dark excited state."""
    return (-space.phi(2) + space.phi(4)) / SQRT2


def effective_hamiltonian(omega1, omega2) -> np.ndarray:
    """omega1 |phi1><phi_d| + omega2 |phi5><phi_d| + h.c. (3x3)."""
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = h[1, 0] = omega1
    h[2, 1] = h[1, 2] = omega2
    return h


def zeno_project(drive_a, drive_b):
    """Effective couplings and Hamiltonian of the Zeno subspace.

    Returns ``(omega1, omega2, H)`` with ``omega1 = -drive_a/sqrt(2)`` and
    ``omega2 = drive_b/sqrt(2)``.
    """
    omega1 = -drive_a / SQRT2
    omega2 = drive_b / SQRT2
    return omega1, omega2, effective_hamiltonian(omega1, omega2)


def zeno_projected(strong: np.ndarray, weak: np.ndarray, atol: float = 1e-9) -> np.ndarray:
    """Sum over eigenprojectors ``P_n`` of ``strong`` of ``P_n weak P_n``."""
    evals, evecs = np.linalg.eigh(strong)
    out = np.zeros_like(weak, dtype=complex)
    start = 0
    while start < evals.size:
        stop = start + 1
        while stop < evals.size and abs(evals[stop] - evals[start]) < atol:
            stop += 1
        vecs = evecs[:, start:stop]
        proj = vecs @ dagger(vecs)
        out += proj @ weak @ proj
        start = stop
    return out


def check_zeno_regime(g: float, drive_a, drive_b, fraction: float = 0.5) -> bool:
    """Warn (and return False) when a drive exceeds ``fraction * g``."""
    peak = max(np.abs(drive_a).max(), np.abs(drive_b).max())
    if peak > fraction * g:
        warnings.warn(
            f"peak drive {peak:.3g} exceeds {fraction:g} g = {fraction * g:.3g}; "
            "the Zeno-subspace approximation may be poor",
            RuntimeWarning,
            stacklevel=2,
        )
        return False
    return True


# --- adiabatic and dressed frames ---------------------------------------------


def adiabatic_eigenstates(theta):
    """``(dark, plus, minus)`` eigenvectors of the effective Hamiltonian.

    dark = cos(theta)|phi1> + sin(theta)|phi5>,
    plus/minus = (sin(theta)|phi1> -/+ |phi_d> - cos(theta)|phi5>)/sqrt(2),
    with eigenvalues 0, +Omega, -Omega.
    """
    c, s = math.cos(theta), math.sin(theta)
    dark = np.array([c, 0.0, s], dtype=complex)
    plus = np.array([s, -1.0, -c], dtype=complex) / SQRT2
    minus = np.array([s, 1.0, -c], dtype=complex) / SQRT2
    return dark, plus, minus


def eigenbasis(theta) -> np.ndarray:
    """Columns are the adiabatic eigenstates ordered (dark, +, -)."""
    return np.column_stack(adiabatic_eigenstates(theta))


_D, _P, _M = np.eye(3, dtype=complex)
M_X = (np.outer(_M - _P, _D) + np.outer(_D, _M - _P)) / SQRT2
M_Y = 1j * (np.outer(_P + _M, _D) - np.outer(_D, _P + _M)) / SQRT2
M_Z = np.outer(_P, _P) - np.outer(_M, _M)


class FrameOperators(NamedTuple):
    M_x: np.ndarray
    M_y: np.ndarray
    M_z: np.ndarray
    U: np.ndarray
    V: np.ndarray


def frame_operators(theta, mu) -> FrameOperators:
    """Generators on the adiabatic labels, the frame change ``U(theta)`` that
    maps each eigenstate onto its fixed label, and ``V = exp(i mu M_x)``."""
    U = dagger(eigenbasis(theta))
    return FrameOperators(M_X, M_Y, M_Z, U, hermitian_expm(M_X, mu))


def correction_hamiltonian(theta, mu, g_x, g_z) -> np.ndarray:
    """U^dag (g_x M_x + g_z M_z) U in the (phi1, phi_d, phi5) basis.

    ``mu`` does not enter; it is accepted so the call mirrors the frame
    parametrization.
    """
    W = eigenbasis(theta)
    return W @ (g_x * M_X + g_z * M_Z) @ dagger(W)


def modified_hamiltonian(omega, theta, g_x, g_z) -> np.ndarray:
    """H + H_c, assembled from the frame operators rather than the pulses."""
    H = effective_hamiltonian(-omega * math.sin(theta), omega * math.cos(theta))
    return H + correction_hamiltonian(theta, 0.0, g_x, g_z)


def dressed_dark_state(theta, mu) -> np.ndarray:
    """Zero-energy dressed state followed under the corrected pulses.

    ``cos(mu)[cos(theta)|phi1> + sin(theta)|phi5>] - i sin(mu)|phi_d>``,
    i.e. ``U^dag V^dag |d>``.  The population of ``|phi_d>`` is sin^2(mu).
    """
    c = math.cos(mu)
    return np.array(
        [c * math.cos(theta), -1j * math.sin(mu), c * math.sin(theta)], dtype=complex
    )


def dressed_frame_coefficients(fields):
    """Diagonal (``eta``) and dark-coupling (``xi``) amplitudes of the
    dressed-frame Hamiltonian for every sample of ``fields``."""
    c = fields.g_z + fields.omega
    cm, sm = np.cos(fields.mu), np.sin(fields.mu)
    eta = c * cm - fields.theta_dot * sm
    xi = (1j * c * sm + 1j * fields.theta_dot * cm + (fields.mu_dot - fields.g_x)) / SQRT2
    return eta, xi


def dressed_frame_hamiltonian(theta, theta_dot, omega, mu, V_dot, g_x, g_z) -> np.ndarray:
    """V H_ad V^dag + V (g_x M_x + g_z M_z) V^dag + i dV/dt V^dag.

    ``V_dot`` is supplied by the caller (e.g. a finite difference of V).
    """
    V = hermitian_expm(M_X, mu)
    Vd = dagger(V)
    H_ad = omega * M_Z + theta_dot * M_Y
    return V @ (H_ad + g_x * M_X + g_z * M_Z) @ Vd + 1j * V_dot @ Vd


def adiabatic_frame_hamiltonian(omega, theta_dot) -> np.ndarray:
    return omega * M_Z + theta_dot * M_Y


# --- dissipation ---------------------------------------------------------------


def lindblad_operators(space: HilbertSpace, dec: DecoherenceParams) -> list[np.ndarray]:
    """Jump operators with the rates folded in.

    sqrt(gamma)|i><2| for each atom and i in {0, 1}, and sqrt(kappa) a.
    Channels with zero rate are omitted.
    """
    ops: list[np.ndarray] = []
    if dec.gamma > 0:
        root = math.sqrt(dec.gamma)
        for atom in ("A", "B"):
            for i in (0, 1):
                ops.append(root * space.atom_op(atom, i, 2))
    if dec.kappa > 0:
        ops.append(math.sqrt(dec.kappa) * space.annihilation())
    return ops


def dissipator(ops: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    """sum_k L rho L^dag - {L^dag L, rho}/2."""
    out = np.zeros_like(rho, dtype=complex)
    for L in ops:
        Ld = dagger(L)
        LdL = Ld @ L
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out
