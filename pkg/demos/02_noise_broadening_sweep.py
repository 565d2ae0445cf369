#!/usr/bin/env python3
"""How chaotic light reshapes the spectrum: a noise-strength sweep.

Keeping the weak coherent drive of the first demo fixed, we sweep the
white-noise strength a0 and watch the sharp line at the laser frequency
broaden and sink while the underlying resonance profile emerges.  All
spectra come from the closed-form engine, so this runs in seconds.
"""

import numpy as np

from doublefano import (AtomParams, FieldParams, SweepSpec, diagnose,
                        run_sweep, trend_check)

atom = AtomParams(omega1=0.5, omega2=0.5, gamma1=0.5, gamma2=0.5)
base = FieldParams(omega_laser=1.0, b=0.1, a0=0.0)
grid = np.linspace(-11.5, 12.5, 1201)

spec = SweepSpec(base_atom=atom, base_field=base, swept_parameter="a0",
                 values=np.array([0.02, 0.05, 0.1, 0.2, 0.4, 0.8]),
                 grid=grid)
result = run_sweep(spec)

print(f"{'a0':>5} {'peaks':>5} {'tallest peak':>14} {'its width':>10}")
for value, spectrum in result.spectra("analytic"):
    diag = diagnose(spectrum)
    top = max(diag.peaks, key=lambda p: p.height)
    print(f"{value:5.2f} {diag.n_peaks:5d} "
          f"{top.height:8.3f} @ {top.location:4.2f} {top.width:10.3f}")

report = trend_check(result)
print(f"\npeak count changes along the sweep (regime transition): "
      f"{report.regime_transition}")

# within the single-peak regime the height trend is clean: rerun the sweep
# there so trend_check can track one peak across every cell
single_peak = SweepSpec(base_atom=atom, base_field=base, swept_parameter="a0",
                        values=np.array([0.2, 0.3, 0.4, 0.6, 0.8]), grid=grid)
report = trend_check(run_sweep(single_peak))
print(f"peak-height trend in the single-peak regime: {report.verdicts}")
print("the line height falls monotonically as the noise eats the coherence;"
      "\nits width grows with a0 (the noise-broadened laser line).")
