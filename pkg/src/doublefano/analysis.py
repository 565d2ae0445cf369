"""Parameter sweeps, spectral shape diagnostics, and method comparison.

Quantifies the qualitative spectral features of the model — Autler-Townes
doublets, the sharp "wedge" at large coherent drive, two-peak nondegenerate
structure, and the noise-induced filling of Fano zeros — so that they can be
asserted numerically instead of read off a plot.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .continuum import AtomParams, FieldParams, derive_params
from .engine import EngineOptions, spectrum_analytic
from .oracle import build_grid, default_window, integrate, spectrum_oracle
from .spectrum import Spectrum

__all__ = [
    "SweepSpec",
    "SweepCell",
    "SweepResult",
    "PeakInfo",
    "MinimumInfo",
    "SpectrumDiagnostics",
    "ComparisonRecord",
    "TrendReport",
    "GridMismatchError",
    "run_sweep",
    "diagnose",
    "wedge_detected",
    "compare",
    "trend_check",
]

# peak detection: prominence threshold as a fraction of the global maximum,
# and minimum separation in grid steps (suppresses discretization ripple
# without hiding physical doublets)
PROMINENCE_FRACTION = 0.01
MIN_SEPARATION_STEPS = 3
# a peak is a "wedge" (near-cusp) when its second difference exceeds this
# multiple of the median second difference on its flanks
WEDGE_RATIO = 10.0


class GridMismatchError(ValueError):
    """Two spectra compared on different frequency grids."""


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter family of spectra: sweep b or a0, others fixed."""

    base_atom: AtomParams
    base_field: FieldParams
    swept_parameter: str                  # "b" or "a0"
    values: np.ndarray                    # ascending, nonnegative
    grid: np.ndarray                      # spectral omega grid (ascending)
    methods: tuple = ("analytic",)
    oracle_n: int = 201                   # oracle continuum resolution
    engine_options: EngineOptions = field(default_factory=EngineOptions)

    def __post_init__(self):
        if self.swept_parameter not in ("b", "a0"):
            raise ValueError("swept_parameter must be 'b' or 'a0'")
        values = np.asarray(self.values, dtype=float)
        if values.size == 0:
            raise ValueError("values must be nonempty")
        if np.any(values < 0):
            raise ValueError("swept values must be nonnegative")
        if values.size > 1 and not np.all(np.diff(values) > 0):
            raise ValueError("swept values must be strictly ascending")
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be a 1-D strictly increasing array")
        unknown = set(self.methods) - {"analytic", "oracle"}
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "methods", tuple(self.methods))

    def field_at(self, value: float) -> FieldParams:
        base = self.base_field
        if self.swept_parameter == "b":
            return FieldParams(omega_laser=base.omega_laser, b=value, a0=base.a0)
        return FieldParams(omega_laser=base.omega_laser, b=base.b, a0=value)


@dataclass(frozen=True)
class SweepCell:
    """One (parameter value, method) evaluation; error text if it failed."""

    value: float
    method: str
    spectrum: Spectrum | None
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    cells: tuple

    def cell(self, value: float, method: str) -> SweepCell:
        for c in self.cells:
            if c.method == method and c.value == value:
                return c
        raise KeyError(f"no sweep cell for value={value}, method={method}")

    def spectra(self, method: str) -> list:
        """(value, Spectrum) pairs for the cells of one method that succeeded."""
        return [(c.value, c.spectrum) for c in self.cells
                if c.method == method and c.spectrum is not None]


def _evaluate_cell(spec: SweepSpec, value: float, method: str) -> SweepCell:
    fld = spec.field_at(value)
    try:
        if method == "analytic":
            sp = spectrum_analytic(spec.base_atom, fld, spec.grid, spec.engine_options)
        else:
            derived = derive_params(spec.base_atom,
                                    residue_mix=spec.engine_options.residue_mix)
            grid = build_grid(default_window(derived, fld), spec.oracle_n, derived)
            run = integrate(grid, fld, derived=derived)
            raw = spectrum_oracle(run)
            # resample onto the sweep grid so all cells share one axis
            vals = np.interp(spec.grid, raw.omegas, raw.values,
                             left=0.0, right=0.0)
            meta = dict(raw.meta)
            meta["resampled_from_n"] = raw.omegas.size
            sp = Spectrum(spec.grid, vals, meta)
        return SweepCell(value=value, method=method, spectrum=sp)
    except Exception as exc:  # isolate failures per cell, never abort the sweep
        return SweepCell(value=value, method=method, spectrum=None,
                         error=f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, max_workers: int = 4) -> SweepResult:
    """Evaluate every (value, method) cell; deterministic ordering.

    Cells run concurrently but are assembled in spec order, and a failing
    cell is recorded with its error text instead of aborting the sweep.
    """
    jobs = [(float(v), m) for v in spec.values for m in spec.methods]
    with ThreadPoolExecutor(max_workers=min(max_workers, len(jobs))) as pool:
        cells = list(pool.map(lambda vm: _evaluate_cell(spec, *vm), jobs))
    return SweepResult(spec=spec, cells=tuple(cells))


@dataclass(frozen=True)
class PeakInfo:
    location: float
    height: float
    width: float          # full width at half prominence-height, omega units
    index: int            # grid index, used by the wedge detector


@dataclass(frozen=True)
class MinimumInfo:
    location: float
    value: float


@dataclass(frozen=True)
class SpectrumDiagnostics:
    peaks: tuple
    minima: tuple
    asymmetry: float
    total_weight: float

    @property
    def n_peaks(self) -> int:
        return len(self.peaks)


def diagnose(spectrum: Spectrum) -> SpectrumDiagnostics:
    """Peak/minimum scan plus the integrated asymmetry about the main peak."""
    w = spectrum.values
    om = spectrum.omegas
    top = float(np.max(w)) if w.size else 0.0
    if top <= 0.0:
        return SpectrumDiagnostics(peaks=(), minima=(), asymmetry=0.0, total_weight=0.0)

    prominence = PROMINENCE_FRACTION * top
    idx, props = find_peaks(w, prominence=prominence, distance=MIN_SEPARATION_STEPS)
    step = float(np.mean(np.diff(om)))
    if idx.size:
        widths = peak_widths(w, idx, rel_height=0.5)[0] * step
    else:
        widths = np.array([])
    peaks = tuple(PeakInfo(location=float(om[i]), height=float(w[i]),
                           width=float(wd), index=int(i))
                  for i, wd in zip(idx, widths))

    min_idx, _ = find_peaks(-w, prominence=prominence, distance=MIN_SEPARATION_STEPS)
    minima = tuple(MinimumInfo(location=float(om[i]), value=float(w[i]))
                   for i in min_idx)

    i_max = int(np.argmax(w))
    left = float(np.trapezoid(w[:i_max + 1], om[:i_max + 1])) if i_max > 0 else 0.0
    total = float(np.trapezoid(w, om))
    right = total - left
    asym = abs(left - right) / total if total > 0 else 0.0

    return SpectrumDiagnostics(peaks=peaks, minima=minima,
                               asymmetry=asym, total_weight=total)


def wedge_detected(spectrum: Spectrum, diagnostics: SpectrumDiagnostics | None = None,
                   flank: int = 12, guard: int = 2) -> bool:
    """Near-cusp test: the tallest peak's second difference spikes above its flanks.

    Fires when |second difference| at the peak exceeds WEDGE_RATIO times the
    median |second difference| over the flanking windows (guard..flank steps
    away on each side).
    """
    diagnostics = diagnostics or diagnose(spectrum)
    if not diagnostics.peaks:
        return False
    peak = max(diagnostics.peaks, key=lambda p: p.height)
    w = spectrum.values
    i = peak.index
    if i < guard + 1 or i > w.size - guard - 2:
        return False
    d2 = np.abs(np.diff(w, 2))          # d2[j] corresponds to grid point j+1
    center = d2[i - 1]
    lo = max(0, i - 1 - flank)
    hi = min(d2.size, i - 1 + flank + 1)
    flanks = np.concatenate([d2[lo:i - guard], d2[i + guard:hi]])
    if flanks.size == 0:
        return False
    ref = float(np.median(flanks))
    return bool(center > WEDGE_RATIO * ref + 1e-300)


@dataclass(frozen=True)
class ComparisonRecord:
    l2_distance: float        # after both spectra are normalized to unit integral
    max_pointwise: float      # max |difference| of the normalized spectra
    normalized: bool = True


def compare(first: Spectrum, second: Spectrum) -> ComparisonRecord:
    """Shape-only distance between two spectra on the same grid."""
    if first.omegas.shape != second.omegas.shape or \
            not np.allclose(first.omegas, second.omegas, rtol=0, atol=0):
        raise GridMismatchError("spectra must share an identical frequency grid")
    a = first.normalized().values
    b = second.normalized().values
    om = first.omegas
    num = float(np.sqrt(np.trapezoid((a - b) ** 2, om)))
    den = float(np.sqrt(np.trapezoid(b ** 2, om)))
    l2 = num / den if den > 0 else (0.0 if num == 0.0 else np.inf)
    return ComparisonRecord(l2_distance=l2, max_pointwise=float(np.max(np.abs(a - b))))


@dataclass(frozen=True)
class TrendReport:
    """Monotonicity verdicts for peak heights tracked across a sweep."""

    values: tuple                 # swept parameter values actually diagnosed
    tracked_heights: tuple        # one tuple of heights per tracked peak
    verdicts: tuple               # "increasing" | "decreasing" | "non-monotone"
    regime_transition: bool       # peak count changed somewhere in the sweep


def _verdict(heights) -> str:
    if len(heights) < 2:
        return "indeterminate"   # a single point carries no trend
    diffs = np.diff(heights)
    if np.all(diffs > 0):
        return "increasing"
    if np.all(diffs < 0):
        return "decreasing"
    return "non-monotone"


def trend_check(result: SweepResult, method: str = "analytic") -> TrendReport:
    """Track peaks by nearest location between consecutive sweep values.

    A change in peak count is flagged as a regime transition (peaks merge or
    split along the sweep), not an error; tracking restarts after it, and the
    verdicts cover the longest leading segment with a constant peak count.
    """
    pairs = result.spectra(method)
    if len(pairs) < 3:
        raise ValueError("trend_check needs at least 3 successful sweep cells")
    diags = [(v, diagnose(sp)) for v, sp in pairs]

    counts = [len(d.peaks) for _, d in diags]
    transition = len(set(counts)) > 1
    # longest leading run of constant peak count
    end = next((k for k in range(1, len(counts)) if counts[k] != counts[0]),
               len(counts))
    segment = diags[:end]
    n_tracks = counts[0]
    if n_tracks == 0:
        return TrendReport(values=tuple(v for v, _ in segment),
                           tracked_heights=(), verdicts=(),
                           regime_transition=transition)

    tracks = [[p.height] for p in segment[0][1].peaks]
    locations = [p.location for p in segment[0][1].peaks]
    for _, diag in segment[1:]:
        available = list(diag.peaks)
        for t, loc in enumerate(locations):
            nearest = min(available, key=lambda p: abs(p.location - loc))
            tracks[t].append(nearest.height)
            locations[t] = nearest.location
            available.remove(nearest)

    return TrendReport(
        values=tuple(v for v, _ in segment),
        tracked_heights=tuple(tuple(t) for t in tracks),
        verdicts=tuple(_verdict(t) for t in tracks),
        regime_transition=transition,
    )
