"""Closed-form spectral engine: kernel oracles, exact references, diagnostics."""

import numpy as np
import pytest
from scipy.integrate import quad

from doublefano import (AtomParams, EngineOptions, FieldParams, derive_params,
                        form_factor, spectrum_analytic)
from doublefano.engine import (PoleProximityError, formula_discrepancy_report,
                               h_factors, kernel_d, solve_resolvent)

TWO_POLE_ATOM = AtomParams(0.3, 1.4, 0.4, 0.6)
DEGENERATE_ATOM = AtomParams(0.5, 0.5, 0.5, 0.5)
FINITE_Q_ATOM = AtomParams(0.5, 0.5, 0.5, 0.5, q1=90.0, q2=100.0)


def test_noise_kernel_matches_quadrature():
    """kernel_d(z, w) = 4 * integral S(w') / (z - i(w - w')) dw'."""
    d = derive_params(TWO_POLE_ATOM)
    for z, om in [(0.05, 0.9), (0.01, -1.2), (0.3, 2.0)]:
        def integrand(op):
            return float(form_factor(op, d)) / (z - 1j * (om - op))
        re = quad(lambda x: integrand(x).real, -np.inf, np.inf, limit=400)[0]
        im = quad(lambda x: integrand(x).imag, -np.inf, np.inf, limit=400)[0]
        expected = 4.0 * (re + 1j * im)
        assert kernel_d(z, om, d) == pytest.approx(expected, rel=1e-8)


def test_noise_kernel_quadrature_degenerate():
    d = derive_params(DEGENERATE_ATOM)
    z, om = 0.02, 0.7

    def integrand(op):
        return float(form_factor(op, d)) / (z - 1j * (om - op))
    re = quad(lambda x: integrand(x).real, -np.inf, np.inf, limit=400)[0]
    im = quad(lambda x: integrand(x).imag, -np.inf, np.inf, limit=400)[0]
    assert kernel_d(z, om, d) == pytest.approx(4.0 * (re + 1j * im), rel=1e-8)


def _coherent_only_reference(atom, fld, grid, z):
    """Exact single-excitation spectrum at zero noise.

    With no noise the ground state feeds one coherence chain, so the
    long-time spectrum is S b^2 / |z + i(w_L - w) + b^2 d(z, w)/4|^2.
    """
    d = derive_params(atom)
    dv = np.array([kernel_d(z, o, d) for o in grid])
    den = z + 1j * (fld.omega_laser - grid) + fld.b**2 * dv / 4.0
    return form_factor(grid, d) * fld.b**2 / np.abs(den) ** 2


@pytest.mark.parametrize("atom,omega_laser", [
    (TWO_POLE_ATOM, 0.9),
    (DEGENERATE_ATOM, 0.5),
    (FINITE_Q_ATOM, 0.5),
])
def test_zero_noise_spectrum_matches_exact_reference(atom, omega_laser):
    fld = FieldParams(omega_laser=omega_laser, b=0.4, a0=0.0)
    grid = np.linspace(omega_laser - 6, omega_laser + 6, 1201)
    spec = spectrum_analytic(atom, fld, grid, EngineOptions())
    z = EngineOptions().z_reg * derive_params(atom).gamma_total
    ref = _coherent_only_reference(atom, fld, grid, z)
    rel = np.linalg.norm(spec.values - ref) / np.linalg.norm(ref)
    assert rel < 1e-5


def test_null_field_gives_exact_zero():
    grid = np.linspace(-5, 6, 101)
    spec = spectrum_analytic(TWO_POLE_ATOM, FieldParams(omega_laser=0.5), grid)
    assert np.all(spec.values == 0.0)


@pytest.mark.parametrize("b,a0", [(0.1, 0.2), (0.0, 0.2), (0.3, 0.05), (0.5, 0.001)])
def test_total_ionization_is_unity(b, a0):
    """Everything ionizes in the long-time limit; the spectrum integrates to 1
    up to window truncation of the Lorentzian wings."""
    fld = FieldParams(omega_laser=1.0, b=b, a0=a0)
    grid = np.linspace(-30, 31, 4001)
    spec = spectrum_analytic(DEGENERATE_ATOM, fld, grid)
    assert np.trapezoid(spec.values, grid) == pytest.approx(1.0, abs=0.05)


def test_steady_solution_is_well_conditioned():
    d = derive_params(TWO_POLE_ATOM)
    fld = FieldParams(omega_laser=0.9, b=0.2, a0=0.1)
    opts = EngineOptions()
    steady = solve_resolvent(d, fld, opts.z_reg * d.gamma_total, opts)
    assert steady.residual < 1e-8
    assert steady.cond < opts.cond_cap
    assert steady.conjugation_defect < 1e-6


def test_laplace_limit_has_converged():
    fld = FieldParams(omega_laser=1.0, b=0.1, a0=0.2)
    grid = np.linspace(-11, 13, 401)
    spec = spectrum_analytic(DEGENERATE_ATOM, fld, grid)
    assert spec.meta["z_limit_drift"] < 1e-3
    assert spec.meta["conjugation_defect"] < 1e-6


def test_on_axis_pole_is_guarded():
    d = derive_params(DEGENERATE_ATOM)
    fld = FieldParams(omega_laser=0.5, b=0.3, a0=0.0)
    with pytest.raises(PoleProximityError):
        h_factors(0.0, 0.5, d, fld)


def test_grid_validation():
    fld = FieldParams(omega_laser=0.5, b=0.1, a0=0.1)
    with pytest.raises(ValueError):
        spectrum_analytic(DEGENERATE_ATOM, fld, np.array([1.0, 0.5, 0.0]))
    with pytest.raises(ValueError):
        spectrum_analytic(DEGENERATE_ATOM, fld, np.array([[0.0, 1.0]]))


def test_unknown_chain_rejected():
    fld = FieldParams(omega_laser=0.5, b=0.1, a0=0.1)
    opts = EngineOptions(chain="mystery")
    with pytest.raises(ValueError):
        spectrum_analytic(DEGENERATE_ATOM, fld, np.linspace(-2, 3, 11), opts)


def test_discrepancy_report_flags_printed_chain():
    """Strong coherent drive: the as-transcribed closure misses badly and the
    report must name the first failing diagnostic."""
    grid = np.linspace(-11.5, 12.5, 801)
    fld = FieldParams(omega_laser=1.0, b=0.5, a0=0.05)
    report = formula_discrepancy_report(DEGENERATE_ATOM, fld, grid)
    assert report.exceeds_tolerance
    assert report.first_failing == "conjugation check"
    text = report.render()
    assert "first failing diagnostic: conjugation check" in text
    assert "FAIL" in text


def test_discrepancy_report_weak_drive_within_tolerance():
    """At weak coherent drive the printed closure stays within tolerance, so
    no report would be emitted."""
    grid = np.linspace(-11.5, 12.5, 801)
    fld = FieldParams(omega_laser=1.0, b=0.1, a0=0.2)
    report = formula_discrepancy_report(DEGENERATE_ATOM, fld, grid)
    assert not report.exceeds_tolerance


def test_coherent_line_narrows_with_drive():
    """At zero noise the line at the laser frequency has width ~ b^2/2 (unit
    total width, degenerate atom): halving b quarters the width."""
    from doublefano import diagnose
    widths = {}
    for b in (0.4, 0.8):
        fld = FieldParams(omega_laser=0.5, b=b, a0=0.0)
        grid = np.linspace(0.5 - 2, 0.5 + 2, 8001)
        spec = spectrum_analytic(FINITE_Q_ATOM, fld, grid)
        diag = diagnose(spec)
        widths[b] = max(diag.peaks, key=lambda p: p.height).width
    assert widths[0.8] / widths[0.4] == pytest.approx(4.0, rel=0.25)
