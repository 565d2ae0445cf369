"""Declarative run configuration: TOML parsing, validation, serialization.

A config file has the sections ``atom``, ``field``, ``grid``, ``oracle``,
``run``, ``output``; only ``atom`` and ``field`` are mandatory.  Unknown
keys are hard errors with their full path, and every numeric invariant of
the underlying parameter types is enforced at parse time.  The resolved
config round-trips: ``parse_config(serialize_config(cfg)) == cfg``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np
import tomli

from .continuum import AtomParams, FieldParams, ParameterError, derive_params
from .oracle import default_window
from .presets import DEFAULT_SWEEP, Preset

__all__ = [
    "ConfigError",
    "GridConfig",
    "OracleConfig",
    "SweepConfig",
    "OutputConfig",
    "RunConfig",
    "parse_config",
    "serialize_config",
    "config_from_preset",
    "grid_array",
]

MODES = ("analytic", "oracle", "both", "sweep")
FORMATS = ("csv", "json-lines")


class ConfigError(ValueError):
    """Invalid or malformed run configuration (reported with field path)."""


@dataclass(frozen=True)
class GridConfig:
    omega_min: float
    omega_max: float
    n_points: int = 601


@dataclass(frozen=True)
class OracleConfig:
    """Optional overrides; None means the oracle derives its own default."""

    window_min: float | None = None
    window_max: float | None = None
    n_points: int = 201
    dt: float | None = None
    t_final: float | None = None
    checkpoints: int = 24


@dataclass(frozen=True)
class SweepConfig:
    parameter: str = "a0"
    values: tuple = DEFAULT_SWEEP


@dataclass(frozen=True)
class OutputConfig:
    path: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    atom: AtomParams
    field_params: FieldParams
    grid: GridConfig
    oracle: OracleConfig = field(default_factory=OracleConfig)
    mode: str = "analytic"
    sweep: SweepConfig | None = None
    output: OutputConfig = field(default_factory=OutputConfig)


def _require_keys(section: dict, allowed, path: str):
    unknown = set(section) - set(allowed)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key '{path}.{key}' (allowed: {', '.join(sorted(allowed))})")


def _number(section: dict, key: str, path: str, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"missing required key '{path}.{key}'")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{path}.{key}' must be a number, got {value!r}")
    return float(value)


def _integer(section: dict, key: str, path: str, default):
    if key not in section:
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{path}.{key}' must be an integer, got {value!r}")
    return value


def _parse_atom(section: dict) -> AtomParams:
    _require_keys(section, {"omega1", "omega2", "gamma1", "gamma2", "q1", "q2",
                            "q_infinite"}, "atom")
    q_infinite = section.get("q_infinite", None)
    if q_infinite is not None and not isinstance(q_infinite, bool):
        raise ConfigError("'atom.q_infinite' must be a boolean")
    q1 = _number(section, "q1", "atom")
    q2 = _number(section, "q2", "atom")
    if q_infinite and (q1 is not None or q2 is not None):
        raise ConfigError("'atom.q_infinite = true' conflicts with 'atom.q1'/'atom.q2'")
    try:
        return AtomParams(
            omega1=_number(section, "omega1", "atom", required=True),
            omega2=_number(section, "omega2", "atom", required=True),
            gamma1=_number(section, "gamma1", "atom", required=True),
            gamma2=_number(section, "gamma2", "atom", required=True),
            q1=q1, q2=q2,
        )
    except ParameterError as exc:
        raise ConfigError(f"atom: {exc}") from exc


def _parse_field(section: dict) -> FieldParams:
    _require_keys(section, {"omega_laser", "b", "a0"}, "field")
    try:
        return FieldParams(
            omega_laser=_number(section, "omega_laser", "field", required=True),
            b=_number(section, "b", "field", default=0.0),
            a0=_number(section, "a0", "field", default=0.0),
        )
    except ParameterError as exc:
        raise ConfigError(f"field: {exc}") from exc


def _parse_grid(section: dict | None, atom: AtomParams, fld: FieldParams) -> GridConfig:
    if section is None:
        lo, hi = default_window(derive_params(atom), fld)
        return GridConfig(omega_min=lo, omega_max=hi)
    _require_keys(section, {"omega_min", "omega_max", "n_points"}, "grid")
    lo = _number(section, "omega_min", "grid", required=True)
    hi = _number(section, "omega_max", "grid", required=True)
    n = _integer(section, "n_points", "grid", 601)
    if not lo < hi:
        raise ConfigError("'grid.omega_min' must be below 'grid.omega_max'")
    if n < 2:
        raise ConfigError("'grid.n_points' must be at least 2")
    return GridConfig(omega_min=lo, omega_max=hi, n_points=n)


def _parse_oracle(section: dict | None) -> OracleConfig:
    if section is None:
        return OracleConfig()
    _require_keys(section, {"window_min", "window_max", "n_points", "dt",
                            "t_final", "checkpoints"}, "oracle")
    cfg = OracleConfig(
        window_min=_number(section, "window_min", "oracle"),
        window_max=_number(section, "window_max", "oracle"),
        n_points=_integer(section, "n_points", "oracle", 201),
        dt=_number(section, "dt", "oracle"),
        t_final=_number(section, "t_final", "oracle"),
        checkpoints=_integer(section, "checkpoints", "oracle", 24),
    )
    if (cfg.window_min is None) != (cfg.window_max is None):
        raise ConfigError("'oracle.window_min' and 'oracle.window_max' go together")
    if cfg.window_min is not None and not cfg.window_min < cfg.window_max:
        raise ConfigError("'oracle.window_min' must be below 'oracle.window_max'")
    if cfg.n_points < 2:
        raise ConfigError("'oracle.n_points' must be at least 2")
    for key in ("dt", "t_final"):
        value = getattr(cfg, key)
        if value is not None and value <= 0:
            raise ConfigError(f"'oracle.{key}' must be positive")
    if cfg.checkpoints < 2:
        raise ConfigError("'oracle.checkpoints' must be at least 2")
    return cfg


def _parse_run(section: dict | None):
    if section is None:
        return "analytic", None
    _require_keys(section, {"mode", "sweep"}, "run")
    mode = section.get("mode", "analytic")
    if mode not in MODES:
        raise ConfigError(f"'run.mode' must be one of {', '.join(MODES)}, got {mode!r}")
    sweep = None
    if "sweep" in section:
        sub = section["sweep"]
        if not isinstance(sub, dict):
            raise ConfigError("'run.sweep' must be a table")
        _require_keys(sub, {"parameter", "values"}, "run.sweep")
        parameter = sub.get("parameter", "a0")
        if parameter not in ("b", "a0"):
            raise ConfigError("'run.sweep.parameter' must be 'b' or 'a0'")
        raw = sub.get("values", list(DEFAULT_SWEEP))
        if not isinstance(raw, list) or not raw or \
                any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw):
            raise ConfigError("'run.sweep.values' must be a nonempty list of numbers")
        values = tuple(float(v) for v in raw)
        if any(v < 0 for v in values):
            raise ConfigError("'run.sweep.values' must be nonnegative")
        if len(values) > 1 and any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("'run.sweep.values' must be strictly ascending")
        sweep = SweepConfig(parameter=parameter, values=values)
    if mode == "sweep" and sweep is None:
        sweep = SweepConfig()
    if mode != "sweep" and sweep is not None:
        raise ConfigError("'run.sweep' requires 'run.mode = \"sweep\"'")
    return mode, sweep


def _parse_output(section: dict | None) -> OutputConfig:
    if section is None:
        return OutputConfig()
    _require_keys(section, {"path", "format"}, "output")
    path = section.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("'output.path' must be a string")
    fmt = section.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"'output.format' must be one of {', '.join(FORMATS)}")
    return OutputConfig(path=path, format=fmt)


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a TOML run configuration."""
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    _require_keys(data, {"atom", "field", "grid", "oracle", "run", "output"}, "config")
    for name in ("atom", "field"):
        if name not in data:
            raise ConfigError(f"missing required section [{name}]")
        if not isinstance(data[name], dict):
            raise ConfigError(f"section [{name}] must be a table")
    atom = _parse_atom(data["atom"])
    fld = _parse_field(data["field"])
    grid = _parse_grid(data.get("grid"), atom, fld)
    oracle = _parse_oracle(data.get("oracle"))
    mode, sweep = _parse_run(data.get("run"))
    output = _parse_output(data.get("output"))
    return RunConfig(atom=atom, field_params=fld, grid=grid, oracle=oracle,
                     mode=mode, sweep=sweep, output=output)


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {value!r}")


def serialize_config(cfg: RunConfig) -> str:
    """Emit the fully resolved config as TOML; inverse of parse_config."""
    lines = ["[atom]"]
    atom = cfg.atom
    for key in ("omega1", "omega2", "gamma1", "gamma2"):
        lines.append(f"{key} = {_toml_value(getattr(atom, key))}")
    if atom.q_infinite:
        lines.append("q_infinite = true")
    else:
        lines.append(f"q1 = {_toml_value(atom.q1)}")
        lines.append(f"q2 = {_toml_value(atom.q2)}")

    lines += ["", "[field]"]
    for key in ("omega_laser", "b", "a0"):
        lines.append(f"{key} = {_toml_value(getattr(cfg.field_params, key))}")

    lines += ["", "[grid]"]
    for f_ in fields(cfg.grid):
        lines.append(f"{f_.name} = {_toml_value(getattr(cfg.grid, f_.name))}")

    lines += ["", "[oracle]"]
    for f_ in fields(cfg.oracle):
        value = getattr(cfg.oracle, f_.name)
        if value is not None:
            lines.append(f"{f_.name} = {_toml_value(value)}")

    lines += ["", "[run]", f"mode = {_toml_value(cfg.mode)}"]
    if cfg.sweep is not None:
        lines += ["", "[run.sweep]",
                  f"parameter = {_toml_value(cfg.sweep.parameter)}",
                  f"values = {_toml_value(cfg.sweep.values)}"]

    lines += ["", "[output]"]
    if cfg.output.path is not None:
        lines.append(f"path = {_toml_value(cfg.output.path)}")
    lines.append(f"format = {_toml_value(cfg.output.format)}")
    return "\n".join(lines) + "\n"


def config_from_preset(preset: Preset, mode: str = "analytic") -> RunConfig:
    """Resolve a bundled preset into a full run configuration."""
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}")
    grid_pts = preset.spectral_grid()
    grid = GridConfig(omega_min=float(grid_pts[0]), omega_max=float(grid_pts[-1]),
                      n_points=int(grid_pts.size))
    sweep = None
    if mode == "sweep":
        sweep = SweepConfig(parameter=preset.swept_parameter,
                            values=tuple(float(v) for v in preset.sweep_values))
    return RunConfig(atom=preset.atom, field_params=preset.field_params,
                     grid=grid, mode=mode, sweep=sweep)


def grid_array(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.grid.omega_min, cfg.grid.omega_max, cfg.grid.n_points)
