"""Command-line surface: config-driven spectra, oracle runs, and sweeps.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .analysis import SweepSpec, run_sweep
from .config import (ConfigError, RunConfig, config_from_preset, grid_array,
                     parse_config, serialize_config)
from .continuum import ParameterError, derive_params
from .engine import (EngineOptions, PoleProximityError, SingularSystemError,
                     spectrum_analytic)
from .io import emit_plotscript, single_record, sweep_record, write_record
from .oracle import (ConvergenceError, IntegrationError, build_grid,
                     default_window, integrate, spectrum_oracle)
from .presets import get_preset, preset_names

__all__ = ["main"]

NUMERICAL_ERRORS = (PoleProximityError, SingularSystemError,
                    IntegrationError, ConvergenceError)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doublefano",
        description="Long-time photoelectron spectra of a noise-driven double "
                    "Fano system.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            src = p.add_mutually_exclusive_group(required=True)
            src.add_argument("--config", metavar="PATH",
                             help="TOML run configuration file")
            src.add_argument("--preset", metavar="NAME",
                             help=f"bundled preset ({', '.join(preset_names())})")
        p.add_argument("--out", metavar="PATH", help="output data file")
        p.add_argument("--format", choices=("csv", "json-lines"), default=None,
                       help="output format (default: config output.format)")
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit the timestamp header line (byte-identical reruns)")
        p.add_argument("--seedless-deterministic", action="store_true", default=True,
                       help="deterministic evaluation (always on; no randomness "
                            "exists in the pipeline)")

    add_common(sub.add_parser("spectrum", help="closed-form spectrum (or both "
                                               "methods if the config says so)"))
    add_common(sub.add_parser("oracle", help="time-domain oracle spectrum"))
    add_common(sub.add_parser("sweep", help="parameter sweep over b or a0"))

    p_presets = sub.add_parser("presets", help="list bundled presets")
    p_presets.add_argument("--preset", metavar="NAME",
                           help="show this preset's resolved configuration")

    p_plot = sub.add_parser("plotscript", help="emit a plot script for a data file")
    p_plot.add_argument("data", help="output file written by a previous run")
    p_plot.add_argument("--out", metavar="PATH", help="script path "
                        "(default: alongside the data file)")
    return parser


def _load_config(args, force_mode: str | None = None) -> RunConfig:
    if args.config:
        try:
            text = open(args.config).read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        cfg = parse_config(text)
        if force_mode and cfg.mode != force_mode:
            if force_mode == "sweep" and cfg.sweep is None:
                cfg = config_from_preset_mode(cfg, force_mode)
            else:
                cfg = replace(cfg, mode=force_mode)
    else:
        preset = get_preset_checked(args.preset)
        cfg = config_from_preset(preset, mode=force_mode or "analytic")
    if args.out:
        cfg = replace(cfg, output=replace(cfg.output, path=args.out))
    if args.format:
        cfg = replace(cfg, output=replace(cfg.output, format=args.format))
    return cfg


def config_from_preset_mode(cfg: RunConfig, mode: str) -> RunConfig:
    from .config import SweepConfig
    return replace(cfg, mode=mode, sweep=SweepConfig())


def get_preset_checked(name: str):
    try:
        return get_preset(name)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from exc


def _oracle_spectrum(cfg: RunConfig):
    derived = derive_params(cfg.atom)
    oc = cfg.oracle
    if oc.window_min is not None:
        window = (oc.window_min, oc.window_max)
    else:
        window = default_window(derived, cfg.field_params)
    grid = build_grid(window, oc.n_points, derived)
    run = integrate(grid, cfg.field_params, t_final=oc.t_final, dt=oc.dt,
                    derived=derived, checkpoints=oc.checkpoints)
    return spectrum_oracle(run)


def _run_single(cfg: RunConfig, mode: str):
    analytic = oracle = None
    if mode in ("analytic", "both"):
        analytic = spectrum_analytic(cfg.atom, cfg.field_params, grid_array(cfg),
                                     EngineOptions())
    if mode in ("oracle", "both"):
        raw = _oracle_spectrum(cfg)
        if analytic is not None:
            vals = np.interp(analytic.omegas, raw.omegas, raw.values,
                             left=0.0, right=0.0)
            from .spectrum import Spectrum
            oracle = Spectrum(analytic.omegas, vals, dict(raw.meta))
        else:
            oracle = raw
    return single_record(cfg, __version__, analytic=analytic, oracle=oracle)


def _run_sweep(cfg: RunConfig):
    sweep = cfg.sweep
    spec = SweepSpec(
        base_atom=cfg.atom,
        base_field=cfg.field_params,
        swept_parameter=sweep.parameter,
        values=np.asarray(sweep.values),
        grid=grid_array(cfg),
        methods=("analytic",),
    )
    result = run_sweep(spec)
    failures = [c for c in result.cells if c.spectrum is None]
    for cell in failures:
        print(f"sweep cell {sweep.parameter}={cell.value:g} failed: {cell.error}",
              file=sys.stderr)
    if len(failures) == len(result.cells):
        raise IntegrationError("every sweep cell failed")
    return sweep_record(cfg, __version__, result, "analytic")


def _emit(record, cfg: RunConfig, args) -> None:
    path = cfg.output.path
    if path is None:
        suffix = "jsonl" if cfg.output.format == "json-lines" else "csv"
        path = f"doublefano_{args.command}.{suffix}"
    write_record(record, path, fmt=cfg.output.format,
                 timestamp=not args.no_timestamp)
    print(f"wrote {path}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            if args.preset:
                preset = get_preset_checked(args.preset)
                print(f"# preset {preset.name}: {preset.description}")
                for note in preset.assumed:
                    print(f"# assumed: {note}")
                sys.stdout.write(serialize_config(config_from_preset(preset)))
            else:
                for name in preset_names():
                    print(f"{name}: {get_preset(name).description}")
            return 0

        if args.command == "plotscript":
            try:
                script = emit_plotscript(args.data, args.out)
            except FileNotFoundError as exc:
                raise ConfigError(str(exc)) from exc
            print(f"wrote {script}")
            return 0

        if args.command == "spectrum":
            cfg = _load_config(args)
            mode = cfg.mode if cfg.mode in ("analytic", "both") else "analytic"
            record = _run_single(cfg, mode)
        elif args.command == "oracle":
            cfg = _load_config(args, force_mode="oracle")
            record = _run_single(cfg, "oracle")
        else:  # sweep
            cfg = _load_config(args, force_mode="sweep")
            record = _run_sweep(cfg)
        _emit(record, cfg, args)
        return 0

    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
