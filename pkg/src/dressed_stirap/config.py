"""Line-based ``key = value`` run configuration."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Optional

from .experiments import DEFAULT_STEPS, KINDS, MODELS, SCHEMES, Scenario, SweepAxis, SweepSpec

UNIT_MODES = ("dimensionless", "physical")
DEFAULT_T_F = 40.0
DEFAULT_G = 10.0


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration.

    Values are stored in the declared units.  In ``physical`` mode rates
    (``g``, ``kappa``, ``gamma``) are given in the same unit as
    ``unit_scale`` (the peak Rabi frequency, e.g. 2pi x MHz) and times
    (``t_f``, ``t0``, ``tau``, ``step``) in its inverse.  ``omega0`` is
    always the relative pulse amplitude.  ``t0``, ``tau`` and ``step`` left
    unset follow ``t_f`` (3 t_f/40, t_f/10, t_f/20000).
    """

    kind: str = "transfer"
    scheme: str = "dressed"
    model: str = "full"
    units: str = "dimensionless"
    unit_scale: Optional[float] = None
    omega0: float = 1.0
    t_f: float = DEFAULT_T_F
    t0: Optional[float] = None
    tau: Optional[float] = None
    g: float = DEFAULT_G
    kappa: float = 0.0
    gamma: float = 0.0
    n_max: int = 1
    step: Optional[float] = None
    literal_regularizer: bool = False
    dev_t_f: float = 0.0
    dev_omega0: float = 0.0
    dev_theta_f: float = 0.0
    dev_g: float = 0.0
    axis1: Optional[str] = None
    axis2: Optional[str] = None
    points: Optional[int] = None
    threads: Optional[int] = None
    out_dir: Optional[str] = None

    @property
    def scale(self) -> float:
        return self.unit_scale if self.units == "physical" else 1.0

    def to_scenario(self) -> Scenario:
        s = self.scale
        t_f = self.t_f * s
        n_steps = DEFAULT_STEPS if self.step is None else max(1, round(self.t_f / self.step))
        return Scenario(
            kind=self.kind, scheme=self.scheme, model=self.model, omega0=self.omega0,
            t_f=t_f, t0=None if self.t0 is None else self.t0 * s,
            tau=None if self.tau is None else self.tau * s,
            g=self.g / s, kappa=self.kappa / s, gamma=self.gamma / s,
            n_max=self.n_max, n_steps=n_steps, literal_regularizer=self.literal_regularizer,
            dev_t_f=self.dev_t_f, dev_omega0=self.dev_omega0,
            dev_theta_f=self.dev_theta_f, dev_g=self.dev_g,
        )

    def sweep_spec(self) -> SweepSpec:
        axes = [SweepAxis.parse(a) for a in (self.axis1, self.axis2) if a]
        if not axes:
            raise ConfigError("sweep requires 'axis1' (and optionally 'axis2')")
        return SweepSpec(tuple(axes))

    def with_(self, **changes) -> "RunConfig":
        cfg = replace(self, **changes)
        validate(cfg)
        return cfg


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float(text: str) -> float:
    x = float(text)
    if not math.isfinite(x):
        raise ValueError(f"not a finite number: {text!r}")
    return x


def _choice(options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text

    return parse


def _axis(text: str) -> str:
    SweepAxis.parse(text)
    return " ".join(text.replace(":", " ").split())


_PARSERS = {
    "kind": _choice(KINDS),
    "scheme": _choice(SCHEMES),
    "model": _choice(MODELS),
    "units": _choice(UNIT_MODES),
    "unit_scale": _float,
    "omega0": _float,
    "t_f": _float,
    "t0": _float,
    "tau": _float,
    "g": _float,
    "kappa": _float,
    "gamma": _float,
    "n_max": int,
    "step": _float,
    "literal_regularizer": _bool,
    "dev_t_f": _float,
    "dev_omega0": _float,
    "dev_theta_f": _float,
    "dev_g": _float,
    "axis1": _axis,
    "axis2": _axis,
    "points": int,
    "threads": int,
    "out_dir": str,
}


def validate(cfg: RunConfig, lines: Optional[dict] = None) -> None:
    """Check cross-field invariants; errors name the offending line if known."""
    lines = lines or {}

    def fail(key, message):
        raise ConfigError(message, lines.get(key))

    if cfg.units == "physical":
        if cfg.unit_scale is None:
            fail("units", "physical units require 'unit_scale'")
        if not cfg.unit_scale > 0:
            fail("unit_scale", "unit_scale must be positive")
    elif cfg.unit_scale is not None:
        fail("unit_scale", "unit_scale is only allowed with 'units = physical'")
    if not cfg.t_f > 0:
        fail("t_f", "t_f must be positive")
    if cfg.step is not None and not 0 < cfg.step <= cfg.t_f:
        fail("step", "step must lie in (0, t_f]")
    for key in ("g", "kappa", "gamma"):
        if getattr(cfg, key) < 0:
            fail(key, f"{key} must be non-negative")
    if cfg.n_max < 1:
        fail("n_max", "n_max must be >= 1")
    for key in ("points", "threads"):
        value = getattr(cfg, key)
        if value is not None and value < 1:
            fail(key, f"{key} must be >= 1")
    if cfg.axis2 and not cfg.axis1:
        fail("axis2", "axis2 given without axis1")
    try:
        cfg.to_scenario()
        if cfg.axis1:
            cfg.sweep_spec()
    except ValueError as exc:
        culprit = next((k for k in lines if k in str(exc)), None)
        fail(culprit, str(exc))


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines ('#' starts a comment)."""
    values: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ConfigError(f"missing value for {key!r}", lineno)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"cannot parse {key} = {value!r}: {exc}", lineno) from None
        lines[key] = lineno

    if values.get("units") == "physical" and "unit_scale" in values:
        scale = values["unit_scale"]
        if scale > 0:
            values.setdefault("t_f", DEFAULT_T_F / scale)
            values.setdefault("g", DEFAULT_G * scale)
    cfg = RunConfig(**values)
    validate(cfg, lines)
    return cfg


def serialize_config(cfg: RunConfig) -> str:
    """Inverse of :func:`parse_config`; unset optional keys are omitted."""
    out = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        out.append(f"{f.name} = {text}")
    return "\n".join(out) + "\n"
