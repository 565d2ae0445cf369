"""Structural identities of the dressed-continuum algebra."""

import math
import time

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from doublefano import (AtomParams, FieldParams, ParameterError, derive_params,
                        form_factor)
from doublefano.continuum import rabi_coupling

REL = 1e-12


def _random_atoms(n, seed=0):
    rng = np.random.default_rng(seed)
    atoms = []
    for _ in range(n):
        w1, w2 = rng.uniform(-5.0, 5.0, 2)
        g1, g2 = rng.uniform(0.01, 10.0, 2)
        if rng.random() < 0.5:
            atoms.append(AtomParams(w1, w2, g1, g2))
        else:
            q1, q2 = rng.uniform(-150.0, 150.0, 2)
            atoms.append(AtomParams(w1, w2, g1, g2, q1=q1, q2=q2))
    return atoms


def test_sum_rules_over_1000_random_atoms_under_one_second():
    atoms = _random_atoms(1000)
    start = time.perf_counter()
    for atom in atoms:
        d = derive_params(atom)
        gamma = d.gamma_total
        pole_sum = d.omega_plus + d.omega_minus
        expected = atom.omega1 + atom.omega2 + 1j * gamma
        assert abs(pole_sum - expected) < REL * max(abs(expected), gamma)
        amp_sum = d.a_plus + d.a_minus
        assert abs(amp_sum - gamma) < REL * gamma
    assert time.perf_counter() - start < 1.0


atom_strategy = st.builds(
    lambda w1, w2, g1, g2, qpair: AtomParams(w1, w2, g1, g2, *qpair),
    st.floats(-5, 5, allow_nan=False),
    st.floats(-5, 5, allow_nan=False),
    st.floats(0.01, 10.0),
    st.floats(0.01, 10.0),
    st.one_of(st.just((None, None)),
              st.tuples(st.floats(-150, 150), st.floats(-150, 150))),
)


def _derive_or_skip(atom):
    try:
        return derive_params(atom)
    except ParameterError:
        assume(False)


@settings(max_examples=200, deadline=None)
@given(atom_strategy)
def test_splitting_algebra_invariants(atom):
    """theta/phi satisfy their defining quadratic relations."""
    d = _derive_or_skip(atom)
    gamma = d.gamma_total
    w21 = atom.omega2 - atom.omega1
    scale = max(gamma**2, w21**2, 1.0)
    assert d.theta >= 0.0 and d.phi >= 0.0
    assert abs(d.theta**2 - d.phi**2 - (w21**2 - gamma**2)) < 1e-9 * scale
    # ill-conditioned when one of theta/phi is tiny, hence the loose bound
    assert abs(d.theta * d.phi - abs(w21 * (atom.gamma2 - atom.gamma1))) < 1e-6 * scale
    # the weaker pole always decays slower but still decays
    assert 0.0 <= d.phi <= gamma + 1e-12


@settings(max_examples=200, deadline=None)
@given(atom_strategy)
def test_pole_and_amplitude_sum_rules(atom):
    # level spacings at roundoff scale (but nonzero) force the weaker pole's
    # residue to be dropped; exact degeneracy is covered by its own test
    w21 = atom.omega2 - atom.omega1
    assume(w21 == 0.0 or abs(w21) > 1e-6)
    d = _derive_or_skip(atom)
    gamma = d.gamma_total
    expected = atom.omega1 + atom.omega2 + 1j * gamma
    assert abs(d.omega_plus + d.omega_minus - expected) <= 1e-11 * max(abs(expected), gamma)
    assert abs(d.a_plus + d.a_minus - gamma) <= 1e-11 * gamma


def test_degenerate_limit_identities():
    atom = AtomParams(omega1=0.7, omega2=0.7, gamma1=0.4, gamma2=0.9)
    d = derive_params(atom)
    gamma = atom.gamma1 + atom.gamma2
    assert d.theta == pytest.approx(0.0, abs=1e-12)
    assert d.phi == pytest.approx(gamma, rel=1e-12)
    assert d.a_minus == 0.0
    assert d.b_minus == 0.0
    assert d.omega_plus == pytest.approx(0.7 + 1j * gamma, rel=1e-12)
    assert d.omega_minus == pytest.approx(0.7 + 0j, abs=1e-12)


def test_degenerate_unit_width_reference_values():
    # unit total width, infinite asymmetry: the single active pole carries
    # the full amplitude, its pair residue is -i, and the noise self-energy
    # coefficient is exactly 1
    atom = AtomParams(omega1=0.5, omega2=0.5, gamma1=0.5, gamma2=0.5)
    d = derive_params(atom)
    assert d.a_plus == pytest.approx(1.0, rel=1e-12)
    assert d.b_plus == pytest.approx(-1j, rel=1e-12)
    assert d.c_coef == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("atom", [
    AtomParams(0.3, 1.4, 0.4, 0.6),
    AtomParams(-1.0, 2.0, 1.5, 0.25),
    AtomParams(0.5, 0.5, 0.5, 0.5),
])
def test_noise_coefficient_equals_four_times_coupling_weight(atom):
    """c = 4 * integral of S(omega) whenever the flat background is absent."""
    d = derive_params(atom)
    total, _ = quad(lambda x: float(form_factor(x, d)), -np.inf, np.inf,
                    limit=400)
    assert d.c_coef.real == pytest.approx(4.0 * total, rel=1e-7)
    assert abs(d.c_coef.imag) < 1e-2 * abs(d.c_coef.real) + 1e-9


def test_state_relabeling_symmetry():
    atom = AtomParams(0.2, 1.1, 0.3, 0.8, q1=25.0, q2=-40.0)
    d1 = derive_params(atom)
    d2 = derive_params(atom.swapped())
    grid = np.linspace(-4, 6, 301)
    assert np.allclose(form_factor(grid, d1), form_factor(grid, d2), rtol=1e-10)
    assert d2.c_coef == pytest.approx(d1.c_coef, rel=1e-10)
    assert {round(d1.omega_plus.real, 9), round(d1.omega_minus.real, 9)} == \
           {round(d2.omega_plus.real, 9), round(d2.omega_minus.real, 9)}


def test_form_factor_nonnegative_and_background_limit():
    atom = AtomParams(0.0, 1.0, 0.4, 0.7, q1=8.0, q2=12.0)
    d = derive_params(atom)
    grid = np.linspace(-50, 50, 2001)
    s = form_factor(grid, d)
    assert np.all(s >= 0)
    background = 1.0 / (4.0 * math.pi * d.gamma_total * (d.q_eff**2 + 1.0))
    assert float(form_factor(1e6, d)) == pytest.approx(background, rel=1e-4)


def test_infinite_asymmetry_has_no_background():
    atom = AtomParams(0.0, 1.0, 0.4, 0.7)
    d = derive_params(atom)
    assert d.q_infinite
    assert d.inv_q_plus_i == 0.0
    assert d.inv_q2_plus_1 == 0.0
    assert float(form_factor(1e6, d)) < 1e-10


def test_rabi_coupling_matches_form_factor():
    atom = AtomParams(0.1, 0.9, 0.2, 0.7, q1=30.0, q2=60.0)
    d = derive_params(atom)
    grid = np.linspace(-3, 4, 101)
    assert np.allclose(np.abs(rabi_coupling(grid, d))**2, form_factor(grid, d))


def test_parameter_validation():
    with pytest.raises(ParameterError):
        AtomParams(0.0, 1.0, -0.1, 0.5)
    with pytest.raises(ParameterError):
        AtomParams(0.0, 1.0, 0.0, 0.5)
    with pytest.raises(ParameterError):
        AtomParams(0.0, 1.0, 0.5, 0.5, q1=10.0, q2=None)
    with pytest.raises(ParameterError):
        FieldParams(omega_laser=1.0, b=-0.1)
    with pytest.raises(ParameterError):
        FieldParams(omega_laser=1.0, a0=-0.2)


def test_pole_coalescence_point_rejected():
    # equal widths with spacing exactly equal to the total width: defective
    # (second-order) pole, no two-Lorentzian decomposition
    with pytest.raises(ParameterError):
        derive_params(AtomParams(0.0, 1.0, 0.5, 0.5))
    # a small perturbation away the decomposition exists again
    d = derive_params(AtomParams(0.0, 1.001, 0.5, 0.5))
    assert np.isfinite(d.a_plus) and np.isfinite(d.b_plus)


def test_noise_strength_convention():
    fld = FieldParams(omega_laser=1.0, b=0.1, a0=0.25)
    assert fld.a == 2.0
