"""Numba kernels for the time-domain oracle's dense RK4 loop.

The state is (p0, D[N], E[N,N]) with E the continuum coherence matrix.
Everything is fixed-step classic RK4 with a fixed reduction order so that
identical inputs reproduce bit-identical trajectories.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def _deriv(p0, D, E, uc, omg, w_laser, a, b, big_f, dD, dE):
    """Write the state derivative into (dD, dE) and return dp0."""
    n = uc.shape[0]
    rowsum = np.dot(E, uc)          # integral over the second index
    colsum = np.dot(uc, E)          # integral over the first index

    s_d = 0.0 + 0.0j
    quad = 0.0 + 0.0j
    imd = 0.0
    for k in range(n):
        s_d += uc[k] * D[k]
        quad += uc[k] * rowsum[k]
        imd += uc[k].real * D[k].imag

    dp0 = -a * big_f * p0 + 2.0 * b * imd + a * quad.real

    half_a = 0.5 * a
    for k in prange(n):
        dD[k] = (-1j * b * p0
                 + (1j * (w_laser - omg[k]) - half_a * big_f) * D[k]
                 - half_a * s_d + 1j * b * colsum[k])
        dck = np.conj(D[k])
        base = a * p0 - 1j * b * dck - half_a * rowsum[k]
        for j in range(n):
            dE[k, j] = (base + 1j * b * D[j]
                        + 1j * (omg[k] - omg[j]) * E[k, j]
                        - half_a * colsum[j])
    return dp0


@njit(cache=True, parallel=True)
def _axpy_state(p0, D, E, dp, dD, dE, h, tD, tE):
    """tmp = state + h * derivative (elementwise, in place)."""
    n = D.shape[0]
    for k in prange(n):
        tD[k] = D[k] + h * dD[k]
        for j in range(n):
            tE[k, j] = E[k, j] + h * dE[k, j]
    return p0 + h * dp


@njit(cache=True, parallel=True)
def _combine(p0, D, E, dp1, dD1, dE1, dp2, dD2, dE2, dp3, dD3, dE3, dp4, dD4, dE4, dt):
    n = D.shape[0]
    w = dt / 6.0
    for k in prange(n):
        D[k] += w * (dD1[k] + 2.0 * dD2[k] + 2.0 * dD3[k] + dD4[k])
        for j in range(n):
            E[k, j] += w * (dE1[k, j] + 2.0 * dE2[k, j] + 2.0 * dE3[k, j] + dE4[k, j])
    return p0 + w * (dp1 + 2.0 * dp2 + 2.0 * dp3 + dp4)


@njit(cache=True)
def rk4_run(p0, D, E, uc, omg, w_laser, a, b, big_f, dt, nsteps):
    """Advance (p0, D, E) in place by nsteps classic RK4 steps; return p0.

    Returns -1.0 as a blow-up sentinel (caller raises) when any magnitude
    exceeds 1e6.
    """
    n = D.shape[0]
    dD1 = np.empty(n, np.complex128); dE1 = np.empty((n, n), np.complex128)
    dD2 = np.empty(n, np.complex128); dE2 = np.empty((n, n), np.complex128)
    dD3 = np.empty(n, np.complex128); dE3 = np.empty((n, n), np.complex128)
    dD4 = np.empty(n, np.complex128); dE4 = np.empty((n, n), np.complex128)
    tD = np.empty(n, np.complex128); tE = np.empty((n, n), np.complex128)

    for _ in range(nsteps):
        dp1 = _deriv(p0, D, E, uc, omg, w_laser, a, b, big_f, dD1, dE1)
        tp = _axpy_state(p0, D, E, dp1, dD1, dE1, 0.5 * dt, tD, tE)
        dp2 = _deriv(tp, tD, tE, uc, omg, w_laser, a, b, big_f, dD2, dE2)
        tp = _axpy_state(p0, D, E, dp2, dD2, dE2, 0.5 * dt, tD, tE)
        dp3 = _deriv(tp, tD, tE, uc, omg, w_laser, a, b, big_f, dD3, dE3)
        tp = _axpy_state(p0, D, E, dp3, dD3, dE3, dt, tD, tE)
        dp4 = _deriv(tp, tD, tE, uc, omg, w_laser, a, b, big_f, dD4, dE4)
        p0 = _combine(p0, D, E, dp1, dD1, dE1, dp2, dD2, dE2,
                      dp3, dD3, dE3, dp4, dD4, dE4, dt)
        if abs(p0) > 1e6:
            return -1.0
    # cheap blow-up scan once per chunk
    mx = 0.0
    for k in range(n):
        v = abs(D[k])
        if v > mx:
            mx = v
    if mx > 1e6:
        return -1.0
    return p0
