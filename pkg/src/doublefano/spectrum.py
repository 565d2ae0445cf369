"""Sampled photoelectron spectra with provenance metadata."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Spectrum"]


@dataclass(frozen=True)
class Spectrum:
    """Long-time photoelectron spectrum W(omega) on an ascending grid.

    ``meta`` records where the numbers came from (atom/field parameters and
    the method tag, "analytic" or "oracle") so output files are auditable.
    """

    omegas: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        omegas = np.asarray(self.omegas, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if omegas.ndim != 1 or omegas.shape != values.shape:
            raise ValueError("omegas and values must be 1-D arrays of equal length")
        if not np.all(np.diff(omegas) > 0):
            raise ValueError("omegas must be strictly increasing")
        if np.any(values < 0):
            raise ValueError("spectral values must be nonnegative")
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "values", values)

    @property
    def total_weight(self) -> float:
        """Trapezoid integral of W over the grid window."""
        return float(np.trapezoid(self.values, self.omegas))

    def normalized(self) -> "Spectrum":
        """Unit-integral copy (shape-only view for comparisons)."""
        w = self.total_weight
        if w <= 0.0:
            return self
        return Spectrum(self.omegas, self.values / w, dict(self.meta))
