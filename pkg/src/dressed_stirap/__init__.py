"""Dressed-state shortcuts to STIRAP for two Lambda atoms in a cavity."""
from .dynamics import Trajectory, evolve_lindblad, evolve_schrodinger, fidelity, populations
from .experiments import Scenario, SweepAxis, SweepSpec, run_grid, run_scenario
from .model import DecoherenceParams, HilbertSpace, SystemParams
from .pulses import ControlFields, PulseParams, control_fields

__all__ = [
    "ControlFields",
    "DecoherenceParams",
    "HilbertSpace",
    "PulseParams",
    "Scenario",
    "SweepAxis",
    "SweepSpec",
    "SystemParams",
    "Trajectory",
    "control_fields",
    "evolve_lindblad",
    "evolve_schrodinger",
    "fidelity",
    "populations",
    "run_grid",
    "run_scenario",
]

__version__ = "0.1.0"
