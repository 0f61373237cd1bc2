"""Command-line front end.

    dressed-stirap [options] {pulses,evolve,sweep,figure,cesium} ...
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import experiments as ex
from .config import ConfigError, RunConfig, parse_config, serialize_config
from .figures import PRESETS, run_preset
from .linalg import IntegrationError
from .output import write_csv, write_json
from .pulses import control_fields, pulse_grid

OUT_ENV = "DRESSED_STIRAP_OUT"
log = logging.getLogger("dressed_stirap")


def _common(parser: argparse.ArgumentParser, defaults: bool) -> None:
    # subparsers repeat the options with SUPPRESS so they may follow the command
    d = None if defaults else argparse.SUPPRESS
    parser.add_argument("--config", metavar="PATH", default=d, help="key = value run configuration")
    parser.add_argument("--out", metavar="DIR", default=d, help="output directory")
    parser.add_argument("--step", type=float, metavar="REAL", default=d, help="integrator step")
    parser.add_argument("--nmax", type=int, metavar="INT", default=d, help="photon cutoff")
    parser.add_argument("--threads", type=int, metavar="INT", default=d, help="sweep worker processes")
    parser.add_argument("--points", type=int, metavar="INT", default=d,
                        help="samples per axis for figure presets")
    parser.add_argument("--literal-regularizer", action="store_true",
                        default=False if defaults else argparse.SUPPRESS,
                        help="use sech(t/tau) instead of sech((t - t_f/2)/tau)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dressed-stirap",
        description="Dressed-state shortcuts to STIRAP for two atoms in a cavity.",
    )
    _common(parser, True)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("pulses", "write the pulse table"),
        ("evolve", "evolve one scenario; trajectory CSV and JSON summary"),
        ("sweep", "run the configured one- or two-axis sweep"),
        ("cesium", "cesium cavity-QED benchmark"),
    ):
        _common(sub.add_parser(name, help=text), False)
    fig = sub.add_parser("figure", help="regenerate one figure's data")
    fig.add_argument("name", choices=sorted(PRESETS, key=lambda n: int(n[3:])))
    _common(fig, False)
    return parser


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
        try:
            cfg = parse_config(text)
        except ConfigError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    changes = {}
    if args.step is not None:
        changes["step"] = args.step
    if args.nmax is not None:
        changes["n_max"] = args.nmax
    if args.threads is not None:
        changes["threads"] = args.threads
    if args.points is not None:
        changes["points"] = args.points
    if args.literal_regularizer:
        changes["literal_regularizer"] = True
    return cfg.with_(**changes) if changes else cfg


def output_dir(args, cfg: RunConfig) -> Path:
    if args.out:
        return Path(args.out)
    if os.environ.get(OUT_ENV):
        return Path(os.environ[OUT_ENV])
    return Path(cfg.out_dir or ".")


def _config_header(cfg: RunConfig, scenario: Optional[ex.Scenario] = None) -> list[str]:
    lines = ["config: " + line for line in serialize_config(cfg).splitlines()]
    if scenario is not None:
        lines += [f"resolved: {k} = {v!r}" for k, v in scenario.header().items()]
    return lines


def cmd_pulses(cfg: RunConfig, out: Path) -> list[Path]:
    s = cfg.to_scenario()
    p = s.actual_pulse
    f = control_fields(p, pulse_grid(p))
    return [write_csv(out / "pulses.csv", f.table(), header=_config_header(cfg, s))]


def cmd_evolve(cfg: RunConfig, out: Path) -> list[Path]:
    s = cfg.to_scenario()
    traj, summary = ex.run_scenario(s)
    head = _config_header(cfg, s)
    return [
        write_csv(out / "trajectory.csv", traj.table(), header=head),
        write_json(out / "summary.json", {"config": serialize_config(cfg).splitlines(), **summary}),
    ]


def cmd_sweep(cfg: RunConfig, out: Path) -> list[Path]:
    s = cfg.to_scenario()
    result = ex.run_grid(s, cfg.sweep_spec(), cfg.threads)
    names = "_".join(result.axis_names)
    return [write_csv(out / f"sweep_{names}.csv", result.table(), header=_config_header(cfg, s))]


def cmd_cesium(cfg: RunConfig, out: Path) -> list[Path]:
    s = cfg.to_scenario()
    payload = ex.cesium_benchmark(
        threads=cfg.threads, n_steps=s.n_steps, n_max=s.n_max,
        literal_regularizer=s.literal_regularizer,
    )
    return [write_json(out / "cesium.json", payload)]


def cmd_figure(cfg: RunConfig, out: Path, name: str) -> list[Path]:
    s = cfg.to_scenario()
    base = ex.Scenario(n_steps=s.n_steps, n_max=s.n_max, literal_regularizer=s.literal_regularizer)
    return run_preset(name, base, out, points=cfg.points, threads=cfg.threads)


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        out = output_dir(args, cfg)
        if args.command == "pulses":
            paths = cmd_pulses(cfg, out)
        elif args.command == "evolve":
            paths = cmd_evolve(cfg, out)
        elif args.command == "sweep":
            paths = cmd_sweep(cfg, out)
        elif args.command == "cesium":
            paths = cmd_cesium(cfg, out)
        else:
            paths = cmd_figure(cfg, out, args.name)
    except ConfigError as exc:
        print(f"dressed-stirap: config error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"dressed-stirap: integration aborted: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        print(f"dressed-stirap: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
