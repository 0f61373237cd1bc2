"""Scenario runners and parameter sweeps.

A :class:`Scenario` holds the *ideal* design (kind, pulses, coupling, decay
rates) plus optional relative deviations ``dev_*`` = (actual - ideal)/ideal.
Deviations act only on what is physically realized: the synthesized pulses
(``dev_t_f``, ``dev_omega0``, ``dev_theta_f``) and the cavity coupling
(``dev_g``).  The target state and the simulated time window stay ideal.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np

from .dynamics import (
    DrivenHamiltonian,
    evolve_lindblad,
    evolve_schrodinger,
    populations,
)
from .model import (
    EFFECTIVE_EMBEDDING,
    DecoherenceParams,
    HilbertSpace,
    SystemParams,
    bright_excited_state,
    check_zeno_regime,
    hamiltonian_terms,
    lindblad_operators,
)
from .pulses import ENTANGLEMENT_THETA, TRANSFER_THETA, PulseParams, control_fields, pulse_grid

KINDS = ("transfer", "entanglement")
SCHEMES = ("dressed", "stirap")
MODELS = ("full", "effective")
DEFAULT_STEPS = 20000
MANIFOLD_NAMES = ("phi1", "phi2", "phi3", "phi4", "phi5")

# cavity QED operating point for cesium, (g, kappa, gamma) / 2pi in MHz
CESIUM_RATES_MHZ = (750.0, 3.3, 2.62)


def ideal_theta(kind: str) -> float:
    if kind == "transfer":
        return TRANSFER_THETA
    if kind == "entanglement":
        return ENTANGLEMENT_THETA
    raise ValueError(f"unknown scenario kind {kind!r}")


@dataclass(frozen=True)
class Scenario:
    kind: str = "transfer"
    scheme: str = "dressed"
    model: str = "full"
    omega0: float = 1.0
    t_f: float = 40.0
    t0: Optional[float] = None
    tau: Optional[float] = None
    g: float = 10.0
    kappa: float = 0.0
    gamma: float = 0.0
    n_max: int = 1
    n_steps: int = DEFAULT_STEPS
    literal_regularizer: bool = False
    dev_t_f: float = 0.0
    dev_omega0: float = 0.0
    dev_theta_f: float = 0.0
    dev_g: float = 0.0

    def __post_init__(self):
        ideal_theta(self.kind)
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown pulse scheme {self.scheme!r}")
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.n_steps < 1:
            raise ValueError("n_steps must be positive")
        for name in ("dev_t_f", "dev_omega0", "dev_theta_f", "dev_g"):
            if not getattr(self, name) > -1.0:
                raise ValueError(f"{name} must exceed -1")
        # validates the pulse and system parameters eagerly
        self.actual_pulse
        self.system
        self.decoherence
        HilbertSpace(self.n_max)

    @property
    def theta_f(self) -> float:
        return ideal_theta(self.kind)

    @property
    def nominal_pulse(self) -> PulseParams:
        return PulseParams(
            omega0=self.omega0, t_f=self.t_f, theta_f=self.theta_f, t0=self.t0,
            tau=self.tau, literal_regularizer=self.literal_regularizer,
        )

    @property
    def actual_pulse(self) -> PulseParams:
        """Pulse parameters realized once the deviations are applied.

        A changed duration rescales the default delay and width with it.
        """
        scale_t = 1.0 + self.dev_t_f
        t0 = None if self.t0 is None else self.t0 * scale_t
        tau = None if self.tau is None else self.tau * scale_t
        return PulseParams(
            omega0=self.omega0 * (1.0 + self.dev_omega0),
            t_f=self.t_f * scale_t,
            theta_f=self.theta_f * (1.0 + self.dev_theta_f),
            t0=t0, tau=tau, literal_regularizer=self.literal_regularizer,
        )

    @property
    def system(self) -> SystemParams:
        return SystemParams(g=self.g * (1.0 + self.dev_g))

    @property
    def decoherence(self) -> DecoherenceParams:
        return DecoherenceParams(kappa=self.kappa, gamma=self.gamma)

    @property
    def step(self) -> float:
        return self.t_f / self.n_steps

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_f, self.n_steps + 1)

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def header(self) -> dict:
        """Resolved parameters identifying a run."""
        p = self.actual_pulse
        return {
            "kind": self.kind, "scheme": self.scheme, "model": self.model,
            "g": self.system.g, "t_f": self.t_f, "t0": p.t0, "tau": p.tau,
            "theta_f": p.theta_f, "omega0": p.omega0, "pulse_t_f": p.t_f,
            "kappa": self.kappa, "gamma": self.gamma, "n_max": self.n_max,
            "step": self.step, "literal_regularizer": self.literal_regularizer,
            "dev_t_f": self.dev_t_f, "dev_omega0": self.dev_omega0,
            "dev_theta_f": self.dev_theta_f, "dev_g": self.dev_g,
        }


@dataclass
class ModelSetup:
    hamiltonian: DrivenHamiltonian
    psi0: np.ndarray
    target: np.ndarray
    kets: np.ndarray  # rows phi1..phi5 in the model's space
    bright: np.ndarray  # the cavity-dark excited state |phi_d>
    jumps: list


def _coupling_fn(pulse: PulseParams, scheme: str, physical: bool):
    def coeffs(times):
        f = control_fields(pulse, times, check_window=False)
        a, b = f.drives(scheme) if physical else f.couplings(scheme)
        return np.column_stack([a, b])

    return coeffs


def build_model(s: Scenario) -> ModelSetup:
    """Hamiltonian, initial state, target and observables of a scenario."""
    pulse = s.actual_pulse
    if s.model == "effective":
        if not s.decoherence.closed:
            raise ValueError("the effective three-level model has no dissipation channels")
        o1 = np.zeros((3, 3), dtype=complex)
        o1[0, 1] = o1[1, 0] = 1.0
        o2 = np.zeros((3, 3), dtype=complex)
        o2[2, 1] = o2[1, 2] = 1.0
        ham = DrivenHamiltonian(np.zeros((3, 3)), [o1, o2], _coupling_fn(pulse, s.scheme, False))
        phi1 = np.array([1, 0, 0], dtype=complex)
        phi5 = np.array([0, 0, 1], dtype=complex)
        kets = EFFECTIVE_EMBEDDING.conj()
        bright = np.array([0, 1, 0], dtype=complex)
        jumps = []
    else:
        space = HilbertSpace(s.n_max)
        drive_a, drive_b = control_fields(pulse, pulse_grid(pulse)).drives(s.scheme)
        check_zeno_regime(s.system.g, drive_a, drive_b)
        terms = hamiltonian_terms(space)
        ham = DrivenHamiltonian(
            s.system.g * terms.cavity, [terms.drive_A, terms.drive_B],
            _coupling_fn(pulse, s.scheme, True),
        )
        phi1, phi5 = space.phi(1), space.phi(5)
        kets = space.manifold_kets()
        bright = bright_excited_state(space)
        jumps = lindblad_operators(space, s.decoherence)
    target = phi5 if s.kind == "transfer" else (phi1 + phi5) / math.sqrt(2.0)
    return ModelSetup(ham, phi1, target, kets, bright, jumps)


def run_scenario(s: Scenario, *, keep_states: bool = False):
    """Evolve one scenario; returns ``(trajectory, summary)``."""
    m = build_model(s)
    grid = s.grid()
    labels = MANIFOLD_NAMES
    if s.decoherence.closed:
        traj = evolve_schrodinger(
            m.hamiltonian, m.psi0, grid, target=m.target, kets=m.kets, labels=labels,
            keep_states=True,
        )
        density = False
    else:
        rho0 = np.outer(m.psi0, m.psi0.conj())
        traj = evolve_lindblad(
            m.hamiltonian, m.jumps, rho0, grid, target=m.target, kets=m.kets,
            labels=labels, keep_states=True,
        )
        density = True
    p_bright = populations(traj.states, m.bright, density=density)[:, 0]
    summary = {
        "scenario": s.header(),
        "final_fidelity": traj.final_fidelity,
        "final_residual_error": traj.final_error,
        "max_population_phi3": float(traj.populations[:, 2].max()),
        "max_population_phi_d": float(p_bright.max()),
        "final_populations": {
            lab: float(traj.populations[-1, k]) for k, lab in enumerate(labels)
        },
    }
    if not keep_states:
        traj.states = None
    return traj, summary


def final_fidelity(s: Scenario) -> float:
    return run_scenario(s)[0].final_fidelity


# --- sweeps --------------------------------------------------------------------

AXIS_NAMES = (
    "g", "t_f", "omega0", "kappa", "gamma",
    "dev_t_f", "dev_omega0", "dev_theta_f", "dev_g",
)


@dataclass(frozen=True)
class SweepAxis:
    """Evenly spaced samples of one parameter, or an explicit sample list."""

    name: str
    start: float
    stop: float
    num: int
    samples: Optional[tuple] = None

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown sweep axis {self.name!r}; choose from {AXIS_NAMES}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("sweep range must be finite")
        if self.samples is None and (int(self.num) != self.num or self.num < 2):
            raise ValueError("sweep axes need at least 2 samples")

    @classmethod
    def of(cls, name: str, values) -> "SweepAxis":
        values = tuple(float(v) for v in np.atleast_1d(values))
        if not values:
            raise ValueError("sweep axis needs at least one sample")
        return cls(name, values[0], values[-1], len(values), samples=values)

    @property
    def values(self) -> np.ndarray:
        if self.samples is not None:
            return np.array(self.samples)
        return np.linspace(self.start, self.stop, int(self.num))

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        """``"name start stop num"`` (whitespace or colon separated)."""
        parts = text.replace(":", " ").split()
        if len(parts) != 4:
            raise ValueError(f"axis needs 'name start stop num', got {text!r}")
        return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))

    def __str__(self) -> str:
        return f"{self.name} {self.start!r} {self.stop!r} {self.num}"


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep has one or two axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("sweep axes must be distinct")

    def cells(self) -> list[tuple]:
        return list(product(*(a.values for a in self.axes)))


@dataclass
class GridResult:
    """One row per cell: axis values, fidelity, residual error."""

    base: Scenario
    axis_names: tuple
    points: np.ndarray  # (n_cells, n_axes)
    fidelity: np.ndarray

    @property
    def residual_error(self) -> np.ndarray:
        return 1.0 - self.fidelity

    def table(self) -> dict:
        cols = {name: self.points[:, k] for k, name in enumerate(self.axis_names)}
        cols["fidelity"] = self.fidelity
        cols["residual_error"] = self.residual_error
        return cols

    def value(self, **coords) -> float:
        """Fidelity at the cell matching ``coords`` (nearest sample)."""
        mask = np.ones(len(self.fidelity), dtype=bool)
        for k, name in enumerate(self.axis_names):
            col = self.points[:, k]
            nearest = col[np.abs(col - coords[name]).argmin()]
            mask &= col == nearest
        return float(self.fidelity[mask][0])

    def as_grid(self) -> np.ndarray:
        shape = [len(np.unique(self.points[:, k])) for k in range(len(self.axis_names))]
        return self.fidelity.reshape(shape)


def apply_axis(s: Scenario, name: str, value: float) -> Scenario:
    if name == "n_max":
        return s.with_(n_max=int(value))
    return s.with_(**{name: float(value)})


def _cell_fidelity(s: Scenario) -> float:
    return final_fidelity(s)


def default_threads() -> int:
    return os.cpu_count() or 1


def run_cells(scenarios: Sequence[Scenario], threads: Optional[int] = None) -> np.ndarray:
    """Final fidelities for independent scenarios, in input order."""
    threads = default_threads() if threads is None else max(1, int(threads))
    out = np.empty(len(scenarios))
    if threads == 1 or len(scenarios) < 2:
        for k, s in enumerate(scenarios):
            out[k] = _cell_fidelity(s)
        return out
    with ProcessPoolExecutor(max_workers=min(threads, len(scenarios))) as pool:
        for k, f in enumerate(pool.map(_cell_fidelity, scenarios)):
            out[k] = f
    return out


def run_grid(base: Scenario, spec: SweepSpec, threads: Optional[int] = None) -> GridResult:
    cells = spec.cells()
    names = tuple(a.name for a in spec.axes)
    scenarios = []
    for cell in cells:
        s = base
        for name, value in zip(names, cell):
            s = apply_axis(s, name, value)
        scenarios.append(s)
    fid = run_cells(scenarios, threads)
    return GridResult(base, names, np.array(cells, dtype=float), fid)


def _for_kinds(base: Scenario, kinds: Iterable[str], spec: SweepSpec, threads):
    return {kind: run_grid(base.with_(kind=kind), spec, threads) for kind in kinds}


def sweep_coupling(base: Scenario, g_values, *, kinds=KINDS, threads=None) -> dict:
    """Final fidelity versus g for each scenario kind."""
    spec = SweepSpec((SweepAxis.of("g", g_values),))
    return _for_kinds(base, kinds, spec, threads)


def sweep_duration(base: Scenario, t_f_values, *, kinds=KINDS, threads=None) -> dict:
    """Final fidelity versus the nominal duration, same step count per run."""
    spec = SweepSpec((SweepAxis.of("t_f", t_f_values),))
    return _for_kinds(base, kinds, spec, threads)


def robustness_grid(base: Scenario, spec: SweepSpec, threads=None) -> GridResult:
    """Fidelity over relative pulse deviations, e.g. (dev_t_f, dev_omega0)."""
    for axis in spec.axes:
        if not axis.name.startswith("dev_"):
            raise ValueError(f"robustness axes are deviations, got {axis.name!r}")
    return run_grid(base, spec, threads)


def decoherence_grid(base: Scenario, kappas, gammas, threads=None) -> GridResult:
    """Master-equation fidelity on a (kappa, gamma) grid."""
    spec = SweepSpec((SweepAxis.of("kappa", kappas), SweepAxis.of("gamma", gammas)))
    return run_grid(base.with_(model="full"), spec, threads)


def mitigation_grids(base: Scenario, *, points: int = 21, deviation: bool = False,
                     threads=None) -> dict:
    """Coupling-vs-leakage and duration-vs-emission grids.

    ``deviation=False``: (g, kappa) at gamma = 0 and (t_f, gamma) at kappa = 0.
    ``deviation=True``: (dev_g, kappa) and (dev_t_f, gamma) around the design.
    """
    base = base.with_(model="full")
    rates = np.linspace(0.0, 0.1, points)
    if deviation:
        devs = np.linspace(-0.1, 0.1, points)
        first = SweepSpec((SweepAxis.of("dev_g", devs), SweepAxis.of("kappa", rates)))
        second = SweepSpec((SweepAxis.of("dev_t_f", devs), SweepAxis.of("gamma", rates)))
    else:
        first = SweepSpec(
            (SweepAxis.of("g", np.linspace(2.0, 20.0, points)), SweepAxis.of("kappa", rates))
        )
        second = SweepSpec(
            (SweepAxis.of("t_f", np.linspace(10.0, 100.0, points)), SweepAxis.of("gamma", rates))
        )
    return {
        "coupling_leakage": run_grid(base.with_(gamma=0.0), first, threads),
        "duration_emission": run_grid(base.with_(kappa=0.0), second, threads),
    }


def cesium_scenario(kind: str, *, closed: bool = False, **overrides) -> Scenario:
    """Design point with Omega0 = g/10 and t_f = 40/Omega0 for cesium rates."""
    g_mhz, kappa_mhz, gamma_mhz = CESIUM_RATES_MHZ
    omega0_mhz = g_mhz / 10.0
    return Scenario(
        kind=kind, model="full", g=g_mhz / omega0_mhz, t_f=40.0,
        kappa=0.0 if closed else kappa_mhz / omega0_mhz,
        gamma=0.0 if closed else gamma_mhz / omega0_mhz, **overrides,
    )


def cesium_benchmark(*, closed: bool = False, threads=None, **overrides) -> dict:
    scenarios = [cesium_scenario(kind, closed=closed, **overrides) for kind in KINDS]
    fid = run_cells(scenarios, threads)
    g_mhz, kappa_mhz, gamma_mhz = CESIUM_RATES_MHZ
    return {
        "rates_over_2pi_MHz": {"g": g_mhz, "kappa": kappa_mhz, "gamma": gamma_mhz},
        "omega0_over_2pi_MHz": g_mhz / 10.0,
        "scenario": scenarios[0].header(),
        "fidelity": {kind: float(f) for kind, f in zip(KINDS, fid)},
    }
