"""Shared fixtures: cached time-domain oracle runs for the acceptance gate.

The oracle integrations at N = 401 take minutes each, so they are computed
once per session and shared between the conservation and equivalence tests.
"""

import pytest

from doublefano import FieldParams, derive_params, get_preset
from doublefano.oracle import build_grid, default_window, integrate

_CACHE = {}


def cached_oracle_run(atom, fld, n_points):
    key = (atom, fld, n_points)
    if key not in _CACHE:
        derived = derive_params(atom)
        grid = build_grid(default_window(derived, fld), n_points, derived)
        _CACHE[key] = integrate(grid, fld, derived=derived)
    return _CACHE[key]


@pytest.fixture(scope="session")
def fig2_oracle_a02():
    p = get_preset("fig2")
    return cached_oracle_run(p.atom, p.field_params, 401)


@pytest.fixture(scope="session")
def fig2_oracle_a02_coarse():
    p = get_preset("fig2")
    return cached_oracle_run(p.atom, p.field_params, 201)


@pytest.fixture(scope="session")
def fig2_oracle_a005():
    p = get_preset("fig2")
    fld = FieldParams(omega_laser=p.field_params.omega_laser,
                      b=p.field_params.b, a0=0.05)
    return cached_oracle_run(p.atom, fld, 401)


@pytest.fixture(scope="session")
def fig4_oracle():
    p = get_preset("fig4")
    return cached_oracle_run(p.atom, p.field_params, 401)


@pytest.fixture(scope="session")
def fig8_oracle():
    p = get_preset("fig8")
    return cached_oracle_run(p.atom, p.field_params, 401)
