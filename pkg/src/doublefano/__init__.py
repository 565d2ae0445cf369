"""Photoelectron spectra of a laser-driven double Fano system.

Two autoionizing states embedded in one continuum, driven by a laser with
a coherent amplitude and a white-noise component.  The package computes the
long-time photoelectron spectrum two independent ways: a closed-form
Laplace-domain engine and a brute-force time-domain integration oracle, and
ships parameter-sweep studies, spectral diagnostics, and a config-driven
command line on top.
"""

from .analysis import (
    ComparisonRecord,
    GridMismatchError,
    SpectrumDiagnostics,
    SweepResult,
    SweepSpec,
    TrendReport,
    compare,
    diagnose,
    run_sweep,
    trend_check,
    wedge_detected,
)
from .config import (
    ConfigError,
    RunConfig,
    config_from_preset,
    parse_config,
    serialize_config,
)
from .continuum import (
    AtomParams,
    DerivedParams,
    FieldParams,
    ParameterError,
    derive_params,
    form_factor,
    rabi_coupling,
)
from .engine import (
    EngineOptions,
    FormulaDiscrepancyReport,
    PoleProximityError,
    ResolventAmplitudes,
    SingularSystemError,
    SteadyAmplitudes,
    formula_discrepancy_report,
    solve_resolvent,
    solve_steady,
    spectrum_analytic,
    zeta_at,
    zeta_resolvent,
)
from .oracle import (
    ContinuumGrid,
    ConvergenceError,
    IntegrationError,
    OracleRun,
    OracleState,
    build_grid,
    default_window,
    integrate,
    spectrum_oracle,
    stable_dt,
)
from .presets import PRESETS, Preset, get_preset, preset_names
from .spectrum import Spectrum

__version__ = "0.1.0"

__all__ = [
    "AtomParams", "FieldParams", "DerivedParams", "ParameterError",
    "derive_params", "form_factor", "rabi_coupling",
    "EngineOptions", "SteadyAmplitudes", "ResolventAmplitudes",
    "solve_steady", "solve_resolvent", "spectrum_analytic",
    "zeta_at", "zeta_resolvent", "PoleProximityError", "SingularSystemError",
    "FormulaDiscrepancyReport", "formula_discrepancy_report",
    "ContinuumGrid", "OracleState", "OracleRun", "build_grid",
    "default_window", "stable_dt", "integrate", "spectrum_oracle",
    "IntegrationError", "ConvergenceError",
    "SweepSpec", "SweepResult", "SpectrumDiagnostics", "ComparisonRecord",
    "TrendReport", "GridMismatchError",
    "run_sweep", "diagnose", "wedge_detected", "compare", "trend_check",
    "Preset", "PRESETS", "get_preset", "preset_names",
    "ConfigError", "RunConfig", "parse_config", "serialize_config",
    "config_from_preset",
    "Spectrum",
    "__version__",
]
