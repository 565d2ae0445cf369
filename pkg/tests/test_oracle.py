"""Time-domain oracle: conservation, refinement, and failure modes."""

import numpy as np
import pytest

from doublefano import AtomParams, FieldParams, derive_params
from doublefano.oracle import (ContinuumGrid, ConvergenceError,
                               IntegrationError, OracleState, build_grid,
                               default_window, integrate, rhs, spectrum_oracle,
                               stable_dt)

ATOM = AtomParams(0.5, 0.5, 0.5, 0.5)
FLD = FieldParams(omega_laser=1.0, b=0.1, a0=0.2)


def _grid(n=41, atom=ATOM, fld=FLD):
    derived = derive_params(atom)
    return build_grid(default_window(derived, fld), n, derived), derived


def test_trapezoid_weights():
    grid, _ = _grid(11)
    lo, hi = grid.window
    dw = (hi - lo) / 10
    assert grid.weights[0] == pytest.approx(0.5 * dw)
    assert grid.weights[-1] == pytest.approx(0.5 * dw)
    assert np.allclose(grid.weights[1:-1], dw)
    assert grid.weights.sum() == pytest.approx(hi - lo)
    # discrete coupling weight agrees with the trapezoid quadrature of S
    assert grid.coupling_weight == pytest.approx(
        np.trapezoid(grid.s_values, grid.points), rel=1e-12)


def test_grid_validation():
    _, derived = _grid()
    with pytest.raises(ValueError):
        build_grid((2.0, 1.0), 11, derived)
    with pytest.raises(ValueError):
        build_grid((0.0, 1.0), 2, derived)
    with pytest.raises(ValueError):
        ContinuumGrid(points=np.array([0.0, 1.0, 2.0]),
                      weights=np.array([1.0, 1.0, 1.0]),
                      window=(0.0, 2.0), s_values=np.zeros(3))


def test_rhs_conserves_total_population_pointwise():
    """The defining invariant: d/dt [p0 + sum w S diag(E)] = 0 at any state."""
    grid, _ = _grid(31)
    rng = np.random.default_rng(7)
    n = grid.n
    e = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    e = 0.5 * (e + e.conj().T)
    state = OracleState(t=0.0, p0=0.37,
                        d=rng.normal(size=n) + 1j * rng.normal(size=n),
                        e_mat=e)
    dp0, _, de = rhs(state, grid, FLD)
    u = grid.weights * grid.s_values
    total_rate = dp0 + float(np.real(u @ np.diag(de)))
    scale = abs(dp0) + 1.0
    assert abs(total_rate) < 1e-12 * scale


def test_conservation_along_trajectory():
    grid, derived = _grid(41)
    run = integrate(grid, FLD, derived=derived, t_final=5.0,
                    stop_when_converged=False)
    assert run.max_conservation_drift < 1e-9


def test_numba_and_numpy_integrators_agree():
    grid, _ = _grid(21)
    kwargs = dict(t_final=2.0, dt=0.002, checkpoints=4, stop_when_converged=False)
    fast = integrate(grid, FLD, **kwargs, use_numba=True)
    slow = integrate(grid, FLD, **kwargs, use_numba=False)
    assert fast.p0_history[-1] == pytest.approx(slow.p0_history[-1], abs=1e-10)
    assert np.allclose(fast.diag_history[-1], slow.diag_history[-1], atol=1e-10)


def test_null_field_is_exactly_static():
    grid, derived = _grid(21, fld=FieldParams(omega_laser=1.0))
    run = integrate(grid, FieldParams(omega_laser=1.0), derived=derived)
    assert all(p0 == 1.0 for p0 in run.p0_history)
    assert run.converged
    spec = spectrum_oracle(run)
    assert np.all(spec.values == 0.0)


def test_step_refinement_converges():
    grid, _ = _grid(21)
    dt = stable_dt(grid, FLD)
    runs = [integrate(grid, FLD, t_final=4.0, dt=step, checkpoints=2,
                      stop_when_converged=False)
            for step in (dt, dt / 2)]
    assert runs[0].p0_history[-1] == pytest.approx(runs[1].p0_history[-1],
                                                   abs=1e-8)


def test_grid_refinement_converges():
    """Doubling the continuum resolution changes the spectral shape by < 5%."""
    specs = []
    for n in (81, 161):
        grid, derived = _grid(n)
        run = integrate(grid, FLD, derived=derived)
        specs.append(spectrum_oracle(run))
    coarse = np.interp(specs[1].omegas, specs[0].omegas, specs[0].values)
    coarse /= np.trapezoid(coarse, specs[1].omegas)
    fine = specs[1].normalized().values
    l2 = np.sqrt(np.trapezoid((coarse - fine) ** 2, specs[1].omegas))
    l2 /= np.sqrt(np.trapezoid(fine ** 2, specs[1].omegas))
    assert l2 < 0.05


def test_oversized_step_is_detected():
    grid, _ = _grid(31)
    dt = 50.0 * stable_dt(grid, FLD)
    with pytest.raises(IntegrationError):
        integrate(grid, FLD, t_final=50.0, dt=dt, stop_when_converged=False)


def test_unconverged_run_refuses_to_emit_spectrum():
    grid, _ = _grid(31)
    run = integrate(grid, FLD, t_final=0.2, checkpoints=2,
                    stop_when_converged=False)
    assert not run.converged
    with pytest.raises(ConvergenceError):
        spectrum_oracle(run)


def test_default_window_contains_laser_and_resonances():
    atom = AtomParams(2.0, 5.0, 0.1, 10.0, q1=90.0, q2=100.0)
    derived = derive_params(atom)
    fld = FieldParams(omega_laser=2.0, b=0.5, a0=0.0)
    lo, hi = default_window(derived, fld, atom)
    g = derived.gamma_total
    assert lo <= fld.omega_laser - 12 * g
    assert hi >= fld.omega_laser + 12 * g
    assert lo <= min(atom.omega1, atom.omega2) - 8 * g
    assert hi >= max(atom.omega1, atom.omega2) + 8 * g
