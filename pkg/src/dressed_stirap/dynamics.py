"""Schrodinger and Lindblad propagation plus fidelity/population observables."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .linalg import (
    IntegrationError,
    ODEResult,
    check_uniform_grid,
    dagger,
    integrate_ode,
    refine_grid,
    step_halving_deviation,
)

MAX_SAMPLES = 2000
TRACE_ABORT = 1e-6


class DrivenHamiltonian:
    """``H(t) = static + sum_k c_k(t) ops[k]`` with real coefficients.

    ``coeff_fn(times)`` must return an array of shape ``(len(times), K)``.
    Coefficients are tabulated on the RK4 stage times of a grid (see
    :meth:`tabulate`); off-table times fall back to a direct evaluation.
    """

    def __init__(self, static: np.ndarray, ops: Sequence[np.ndarray], coeff_fn: Callable):
        self.static = np.asarray(static, dtype=complex)
        self.ops = np.asarray(ops, dtype=complex)
        self.coeff_fn = coeff_fn
        self._t0 = 0.0
        self._dt = None
        self._table = None

    @property
    def dim(self) -> int:
        return self.static.shape[0]

    def tabulate(self, t_grid: np.ndarray) -> "DrivenHamiltonian":
        """Precompute coefficients at the grid points and midpoints."""
        stages = refine_grid(t_grid)
        self._t0 = stages[0]
        self._dt = stages[1] - stages[0]
        self._table = np.asarray(self.coeff_fn(stages), dtype=float)
        return self

    def coefficients(self, t: float) -> np.ndarray:
        if self._table is not None:
            x = (t - self._t0) / self._dt
            i = int(round(x))
            if abs(x - i) < 1e-6 and 0 <= i < len(self._table):
                return self._table[i]
        return np.asarray(self.coeff_fn(np.array([t])), dtype=float)[0]

    def __call__(self, t: float) -> np.ndarray:
        c = self.coefficients(t)
        h = self.static.copy()
        for ck, op in zip(c, self.ops):
            h += ck * op
        return h


@dataclass
class Trajectory:
    """Stored samples of one evolution.

    ``populations`` has one column per ket in ``labels``; ``leak`` is the
    probability outside those kets.
    """

    t: np.ndarray
    populations: np.ndarray
    labels: tuple
    fidelity: np.ndarray
    final_state: np.ndarray
    states: Optional[np.ndarray] = None

    @property
    def leak(self) -> np.ndarray:
        return np.clip(1.0 - self.populations.sum(axis=1), 0.0, None)

    @property
    def residual_error(self) -> np.ndarray:
        return 1.0 - self.fidelity

    @property
    def final_fidelity(self) -> float:
        return float(self.fidelity[-1])

    @property
    def final_error(self) -> float:
        return float(1.0 - self.fidelity[-1])

    def table(self) -> dict:
        cols = {"t": self.t}
        for k, lab in enumerate(self.labels):
            cols[f"P_{lab}"] = self.populations[:, k]
        cols["P_leak"] = self.leak
        cols["fidelity"] = self.fidelity
        cols["residual_error"] = self.residual_error
        return cols


def fidelity(state_or_rho: np.ndarray, target: np.ndarray, *, density: Optional[bool] = None):
    """|<target|psi>|^2 for kets, <target|rho|target> for density matrices.

    Accepts one state or a leading stack of states.  ``density`` resolves the
    ambiguous case of a square stack of kets; by default a square 2-D input
    is read as a density matrix.
    """
    x = np.asarray(state_or_rho)
    target = np.asarray(target)
    if x.shape[-1] != target.shape[-1]:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} vs {target.shape[-1]}")
    if density is None:
        density = x.ndim == 3 or (x.ndim == 2 and x.shape[0] == x.shape[1])
    if density:
        val = np.einsum("i,...ij,j->...", target.conj(), x, target).real
    else:
        val = np.abs(x @ target.conj()) ** 2
    val = np.clip(val, 0.0, 1.0)
    return float(val) if val.ndim == 0 else val


def populations(states: np.ndarray, kets: np.ndarray, *, density: bool = False) -> np.ndarray:
    """|<k|psi>|^2 (or <k|rho|k>) per stored state and ket row."""
    kets = np.atleast_2d(kets)
    if density:
        return np.einsum("ki,tij,kj->tk", kets.conj(), states, kets).real
    return np.abs(states @ kets.conj().T) ** 2


def schrodinger_deriv(hamiltonian: Callable[[float], np.ndarray]):
    def deriv(t, psi):
        return -1j * (hamiltonian(t) @ psi)

    return deriv


def _as_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    check_uniform_grid(grid)
    return grid


def _prepare(hamiltonian, grid):
    if isinstance(hamiltonian, DrivenHamiltonian) and (
        hamiltonian._table is None or hamiltonian._dt != (grid[1] - grid[0]) / 2
    ):
        hamiltonian.tabulate(grid)


def _trajectory(res: ODEResult, kets, labels, target, density, keep_states):
    pops = populations(res.y, kets, density=density)
    fid = fidelity(res.y, target, density=density)
    return Trajectory(
        t=res.t, populations=pops, labels=tuple(labels), fidelity=np.atleast_1d(fid),
        final_state=res.y[-1], states=res.y if keep_states else None,
    )


def evolve_schrodinger(
    hamiltonian,
    psi0: np.ndarray,
    grid,
    *,
    target: np.ndarray,
    kets: np.ndarray,
    labels: Sequence[str],
    max_samples: int = MAX_SAMPLES,
    keep_states: bool = False,
) -> Trajectory:
    """RK4 propagation of ``i dpsi/dt = H(t) psi``.

    ``hamiltonian`` is a callable ``H(t)`` (a :class:`DrivenHamiltonian` is
    tabulated on the grid automatically).
    """
    grid = _as_grid(grid)
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-12:
        raise ValueError("initial state must be normalized")
    _prepare(hamiltonian, grid)
    res = integrate_ode(schrodinger_deriv(hamiltonian), psi0, grid, max_samples=max_samples)
    return _trajectory(res, kets, labels, target, False, keep_states)


class LindbladGenerator:
    """Right-hand side of the master equation for a time-dependent H.

    Uses the split ``-i(H_eff rho - rho H_eff^dag) + sum L rho L^dag`` with
    ``H_eff = H - (i/2) sum L^dag L``.
    """

    def __init__(self, hamiltonian, jump_ops: Sequence[np.ndarray]):
        self.hamiltonian = hamiltonian
        self.jumps = np.asarray(jump_ops, dtype=complex) if len(jump_ops) else None
        if self.jumps is not None:
            self.jumps_dag = dagger(self.jumps)
            self.decay = 0.5 * np.einsum("kij,kjl->il", self.jumps_dag, self.jumps)

    def __call__(self, t, rho):
        h = self.hamiltonian(t)
        if self.jumps is None:
            hr = h @ rho
            return -1j * (hr - dagger(hr))
        heff = h - 1j * self.decay
        hr = heff @ rho
        out = -1j * (hr - dagger(hr))
        out += (self.jumps @ rho @ self.jumps_dag).sum(axis=0)
        return out


def _lindblad_post_step(trace0: float):
    def post(t, rho):
        rho = 0.5 * (rho + dagger(rho))
        drift = abs(np.trace(rho).real - trace0)
        if drift > TRACE_ABORT:
            raise IntegrationError(f"trace drift {drift:.3g} exceeds {TRACE_ABORT:g}; step too large", t)
        return rho

    return post


def evolve_lindblad(
    hamiltonian,
    jump_ops: Sequence[np.ndarray],
    rho0: np.ndarray,
    grid,
    *,
    target: np.ndarray,
    kets: np.ndarray,
    labels: Sequence[str],
    max_samples: int = MAX_SAMPLES,
    keep_states: bool = False,
) -> Trajectory:
    """RK4 propagation of the Lindblad master equation on the full matrix.

    The state is re-symmetrized after every step; the trace is watched and
    a drift beyond ``1e-6`` aborts with :class:`IntegrationError`.
    """
    grid = _as_grid(grid)
    rho0 = np.asarray(rho0, dtype=complex)
    if np.abs(rho0 - dagger(rho0)).max() > 1e-12 or abs(np.trace(rho0) - 1) > 1e-12:
        raise ValueError("initial density matrix must be Hermitian with unit trace")
    if np.linalg.eigvalsh(rho0).min() < -1e-12:
        raise ValueError("initial density matrix must be positive")
    _prepare(hamiltonian, grid)
    gen = LindbladGenerator(hamiltonian, jump_ops)
    res = integrate_ode(
        gen, rho0, grid, max_samples=max_samples, post_step=_lindblad_post_step(1.0)
    )
    return _trajectory(res, kets, labels, target, True, keep_states)


def min_eigenvalues(rhos: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(rhos)[..., 0]


def schrodinger_step_halving(hamiltonian, psi0, grid, max_samples: int = MAX_SAMPLES) -> float:
    """Max state deviation between step h and h/2 runs."""
    grid = _as_grid(grid)
    if isinstance(hamiltonian, DrivenHamiltonian):
        hamiltonian.tabulate(refine_grid(grid))
    return step_halving_deviation(
        schrodinger_deriv(hamiltonian), np.asarray(psi0, dtype=complex), grid,
        max_samples=max_samples,
    )
