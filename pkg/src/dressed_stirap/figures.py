"""Named presets regenerating the data tables behind each figure.

Each preset writes CSV tables into ``out_dir`` and returns their paths.
The base scenario carries the integrator step, photon cutoff and
regularizer choice; everything else is fixed by the preset.
"""
from __future__ import annotations

from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import experiments as ex
from .output import write_csv
from .pulses import control_fields, pulse_grid

PULSE_DURATIONS = (10.0, 20.0, 40.0, 60.0)
MU_DURATIONS = (20.0, 40.0, 60.0, 100.0)


def _header(s: ex.Scenario, **extra) -> dict:
    h = dict(s.header())
    h.update(extra)
    return h


def _grid_csv(path, result: ex.GridResult, **extra) -> Path:
    return write_csv(path, result.table(), header=_header(result.base, **extra))


def pulse_tables(base: ex.Scenario, out_dir: Path, durations, prefix: str) -> list[Path]:
    paths = []
    for kind in ex.KINDS:
        for t_f in durations:
            s = base.with_(kind=kind, t_f=t_f)
            p = s.actual_pulse
            f = control_fields(p, pulse_grid(p))
            name = f"{prefix}_{kind}_tf{t_f:g}.csv"
            paths.append(write_csv(out_dir / name, f.table(), header=_header(s)))
    return paths


def fig2(base, out_dir, points, threads):
    return pulse_tables(base, out_dir, PULSE_DURATIONS, "fig2")


def fig3(base, out_dir, points, threads):
    paths = []
    for kind in ex.KINDS:
        s = base.with_(kind=kind)
        p = s.actual_pulse
        f = control_fields(p, pulse_grid(p))
        cols = {"t_over_t_f": f.t / p.t_f, "theta": f.theta}
        paths.append(write_csv(out_dir / f"fig3_{kind}.csv", cols, header=_header(s)))
    return paths


def fig4(base, out_dir, points, threads):
    return pulse_tables(base, out_dir, MU_DURATIONS, "fig4")


def fig5(base, out_dir, points, threads):
    n = points or 41
    closed = base.with_(model="full", kappa=0.0, gamma=0.0)
    paths = []
    for kind, res in ex.sweep_coupling(closed, np.linspace(1.0, 20.0, n), threads=threads).items():
        paths.append(_grid_csv(out_dir / f"fig5a_{kind}.csv", res))
    for kind, res in ex.sweep_duration(closed, np.linspace(10.0, 100.0, n), threads=threads).items():
        paths.append(_grid_csv(out_dir / f"fig5b_{kind}.csv", res))
    return paths


def fig6(base, out_dir, points, threads):
    closed = base.with_(model="full", kappa=0.0, gamma=0.0)
    paths = []
    for kind in ex.KINDS:
        runs = {
            scheme: ex.run_scenario(closed.with_(kind=kind, scheme=scheme))[0]
            for scheme in ex.SCHEMES
        }
        t = runs["dressed"].t
        pops = {"t": t}
        errs = {"t": t}
        for scheme, traj in runs.items():
            pops[f"P_phi1_{scheme}"] = traj.populations[:, 0]
            pops[f"P_phi5_{scheme}"] = traj.populations[:, 4]
            errs[f"residual_error_{scheme}"] = traj.residual_error
        head = _header(closed.with_(kind=kind), scheme="dressed,stirap")
        paths.append(write_csv(out_dir / f"fig6_{kind}_populations.csv", pops, header=head))
        paths.append(write_csv(out_dir / f"fig6_{kind}_errors.csv", errs, header=head))
    return paths


def fig7(base, out_dir, points, threads):
    n = points or 21
    devs = np.linspace(-0.1, 0.1, n)
    closed = base.with_(model="full", kappa=0.0, gamma=0.0)
    a = ex.robustness_grid(
        closed.with_(kind="transfer"),
        ex.SweepSpec((ex.SweepAxis.of("dev_t_f", devs), ex.SweepAxis.of("dev_omega0", devs))),
        threads,
    )
    b = ex.robustness_grid(
        closed.with_(kind="entanglement"),
        ex.SweepSpec((ex.SweepAxis.of("dev_t_f", devs), ex.SweepAxis.of("dev_theta_f", devs))),
        threads,
    )
    return [_grid_csv(out_dir / "fig7a_transfer.csv", a), _grid_csv(out_dir / "fig7b_entanglement.csv", b)]


def fig8(base, out_dir, points, threads):
    n = points or 21
    rates = np.linspace(0.0, 0.1, n)
    paths = []
    for kind in ex.KINDS:
        res = ex.decoherence_grid(base.with_(kind=kind), rates, rates, threads)
        paths.append(_grid_csv(out_dir / f"fig8_{kind}.csv", res))
    return paths


def _mitigation(base, out_dir, points, threads, deviation, tag):
    paths = []
    for kind in ex.KINDS:
        grids = ex.mitigation_grids(
            base.with_(kind=kind), points=points or 21, deviation=deviation, threads=threads
        )
        for name, res in grids.items():
            paths.append(_grid_csv(out_dir / f"{tag}_{kind}_{name}.csv", res))
    return paths


def fig9(base, out_dir, points, threads):
    return _mitigation(base, out_dir, points, threads, False, "fig9")


def fig10(base, out_dir, points, threads):
    return _mitigation(base, out_dir, points, threads, True, "fig10")


PRESETS: dict[str, Callable] = {
    "fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6,
    "fig7": fig7, "fig8": fig8, "fig9": fig9, "fig10": fig10,
}


def run_preset(name: str, base: ex.Scenario, out_dir, *, points: Optional[int] = None,
               threads: Optional[int] = None) -> list[Path]:
    if name not in PRESETS:
        raise ValueError(f"unknown figure {name!r}; choose from {', '.join(PRESETS)}")
    return PRESETS[name](base, Path(out_dir), points, threads)
