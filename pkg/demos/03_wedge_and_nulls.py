#!/usr/bin/env python3
"""Two finite-asymmetry stories: the wedge, and interference nulls.

First: at zero noise, the coherent drive leaves an extremely narrow line at
the laser frequency (width ~ b^2/2 in units of the total width).  Sampled
on a finite grid it shows up as a sharp "wedge" on top of the resonance
profile; adding strong noise destroys it.  Second: the deep interference
nulls between two well-separated resonances survive coherent driving but
are filled in by noise.  Uses the bundled presets; runs in seconds.
"""

import numpy as np

from doublefano import (SweepSpec, diagnose, get_preset, run_sweep,
                        spectrum_analytic, wedge_detected)

# --- the wedge and its destruction ---------------------------------------

for name, label in (("fig6", "zero noise"), ("fig7", "strong noise a0=0.5")):
    preset = get_preset(name)
    spec = SweepSpec(base_atom=preset.atom, base_field=preset.field_params,
                     swept_parameter="b",
                     values=np.asarray(preset.sweep_values),
                     grid=preset.spectral_grid())
    result = run_sweep(spec)
    print(f"\n{name} ({label}): drive sweep")
    for value, spectrum in result.spectra("analytic"):
        diag = diagnose(spectrum)
        height = max((p.height for p in diag.peaks), default=0.0)
        marker = "  <-- wedge" if wedge_detected(spectrum, diag) else ""
        print(f"  b={value:4.2f}  tallest peak {height:8.3f}  "
              f"asymmetry {diag.asymmetry:.3f}{marker}")

# --- interference nulls under noise --------------------------------------

print("\ninterference nulls between well-separated resonances (at 2 and 5):")
for name, label in (("fig8", "zero noise"), ("fig9", "strong noise")):
    preset = get_preset(name)
    grid = preset.spectral_grid(1201)
    spectrum = spectrum_analytic(preset.atom, preset.field_params, grid)
    between = (grid > 2.0) & (grid < 5.0)
    floor = spectrum.values[between].min()
    print(f"  {name} ({label}): spectral floor between the resonances "
          f"= {floor:.2e} (max {spectrum.values.max():.2e})")
print("the noise lifts the null by orders of magnitude: with chaotic "
      "driving\nthe exact zeros of the interference profile are gone.")
