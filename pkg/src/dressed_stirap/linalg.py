"""Dense complex linear algebra and fixed-step RK4 propagation.

Everything here is deliberately small: the largest operator in the package
is 27x27 (two three-level atoms and a cavity truncated at two photons), so
plain dense numpy arrays are used throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Optional

import numpy as np

HERMITIAN_RTOL = 1e-12


class IntegrationError(RuntimeError):
    """Raised when a propagated state becomes non-finite or unphysical."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t = {time:.12g}")
        self.time = time


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = max(np.abs(m).max(initial=0.0), 1.0)
    return bool(np.abs(m - dagger(m)).max(initial=0.0) <= rtol * scale)


def tensor_product(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of the operands, first operand slowest.

    The package uses the ordering atom A (x) atom B (x) cavity throughout.
    """
    if not ops:
        raise ValueError("tensor_product needs at least one operand")
    mats = [np.atleast_2d(np.asarray(op)) for op in ops]
    return reduce(np.kron, mats)


def hermitian_expm(m: np.ndarray, scale: float) -> np.ndarray:
    """Return exp(i * scale * m) for Hermitian ``m`` via eigendecomposition."""
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m):
        raise ValueError("hermitian_expm requires a Hermitian matrix")
    evals, evecs = np.linalg.eigh(m)
    return (evecs * np.exp(1j * scale * evals)) @ dagger(evecs)


def unitarity_error(u: np.ndarray) -> float:
    """max |U^dag U - I| entrywise."""
    u = np.asarray(u)
    return float(np.abs(dagger(u) @ u - np.eye(u.shape[-1])).max())


def check_uniform_grid(t_grid: np.ndarray, rtol: float = 1e-9) -> float:
    """Validate a strictly increasing uniform grid and return its step."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2:
        raise ValueError("time grid needs at least two points")
    steps = np.diff(t_grid)
    if np.any(steps <= 0):
        raise ValueError("time grid must be strictly increasing")
    h = (t_grid[-1] - t_grid[0]) / (t_grid.size - 1)
    if np.abs(steps - h).max() > rtol * max(abs(h), 1.0):
        raise ValueError("time grid must be uniform")
    return float(h)


def decimation_indices(n_points: int, max_samples: int) -> np.ndarray:
    """Indices of at most ``max_samples`` points, always keeping both ends."""
    if n_points <= max_samples:
        return np.arange(n_points)
    return np.unique(np.linspace(0, n_points - 1, max_samples).round().astype(int))


@dataclass(frozen=True)
class ODEResult:
    t: np.ndarray
    y: np.ndarray  # shape (n_stored, *y0.shape)
    stored_indices: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.y[-1]


Deriv = Callable[[float, np.ndarray], np.ndarray]
PostStep = Callable[[float, np.ndarray], np.ndarray]


def integrate_ode(
    deriv: Deriv,
    y0: np.ndarray,
    t_grid: np.ndarray,
    *,
    max_samples: Optional[int] = None,
    sample_indices: Optional[np.ndarray] = None,
    post_step: Optional[PostStep] = None,
) -> ODEResult:
    """Classical 4th-order Runge-Kutta on a uniform grid.

    Parameters
    ----------
    deriv : callable
        ``deriv(t, y)`` returning dy/dt with the shape of ``y``.
    y0 : array
        Initial state vector or matrix.
    t_grid : array
        Strictly increasing uniform grid.
    max_samples : int, optional
        Store at most this many evenly spread grid points (ends included).
    sample_indices : array, optional
        Explicit grid indices to store; must include 0.  Overrides
        ``max_samples``.
    post_step : callable, optional
        Applied to the state after every step, e.g. to re-symmetrize a
        density matrix.  May raise to abort the run.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    h = check_uniform_grid(t_grid)
    n = t_grid.size
    if sample_indices is not None:
        keep = np.unique(np.asarray(sample_indices, dtype=int))
        if keep[0] != 0 or keep[-1] >= n:
            raise ValueError("sample_indices must start at 0 and lie on the grid")
    elif max_samples:
        keep = decimation_indices(n, max_samples)
    else:
        keep = np.arange(n)
    keep_mask = np.zeros(n, dtype=bool)
    keep_mask[keep] = True

    y = np.array(y0, dtype=complex)
    out = np.empty((keep.size,) + y.shape, dtype=complex)
    out[0] = y
    slot = 1
    half = 0.5 * h
    t_start = t_grid[0]
    for k in range(n - 1):
        t = t_start + k * h
        k1 = deriv(t, y)
        k2 = deriv(t + half, y + half * k1)
        k3 = deriv(t + half, y + half * k2)
        k4 = deriv(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if post_step is not None:
            y = post_step(t + h, y)
        if not np.isfinite(y).all():
            raise IntegrationError("non-finite state encountered", t + h)
        if keep_mask[k + 1]:
            out[slot] = y
            slot += 1
    return ODEResult(t=t_grid[keep], y=out, stored_indices=keep)


def refine_grid(t_grid: np.ndarray) -> np.ndarray:
    """Insert midpoints, halving the step."""
    t_grid = np.asarray(t_grid, dtype=float)
    fine = np.empty(2 * t_grid.size - 1)
    fine[0::2] = t_grid
    fine[1::2] = 0.5 * (t_grid[:-1] + t_grid[1:])
    return fine


def step_halving_deviation(
    deriv: Deriv,
    y0: np.ndarray,
    t_grid: np.ndarray,
    *,
    max_samples: int = 2000,
    post_step: Optional[PostStep] = None,
) -> float:
    """Max entrywise deviation between runs at step h and h/2.

    Compared on the (decimated) points common to both grids.
    """
    coarse = integrate_ode(deriv, y0, t_grid, max_samples=max_samples, post_step=post_step)
    fine = integrate_ode(
        deriv, y0, refine_grid(t_grid),
        sample_indices=2 * coarse.stored_indices, post_step=post_step,
    )
    return float(np.abs(coarse.y - fine.y).max())
