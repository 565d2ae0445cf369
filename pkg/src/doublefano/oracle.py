"""Brute-force time-domain oracle for the long-time photoelectron spectrum.

Discretizes the continuum on a uniform trapezoid grid and integrates the
exactly averaged equations of motion for (ground population, ground-to-
continuum coherences, continuum coherence matrix) with fixed-step classic
RK4 until the diagonal spectrum stops changing.  Serves as the independent
ground truth for the closed-form engine: it never touches the Laplace-domain
kernels or the complex resonance poles.

The truncation window makes the total coupling weight F window-dependent
whenever the flat background is present (finite asymmetry parameters); all
grid sums use the same discrete weights so the population conservation law
holds exactly on the grid, not just in the continuum limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .continuum import AtomParams, DerivedParams, FieldParams, derive_params, form_factor
from .spectrum import Spectrum

__all__ = [
    "ContinuumGrid",
    "OracleState",
    "OracleRun",
    "IntegrationError",
    "ConvergenceError",
    "default_window",
    "build_grid",
    "stable_dt",
    "rhs",
    "integrate",
    "spectrum_oracle",
]


class IntegrationError(RuntimeError):
    """The fixed-step integration blew up (step size too large)."""


class ConvergenceError(RuntimeError):
    """The spectrum had not settled by the end of the integration."""


@dataclass(frozen=True)
class ContinuumGrid:
    """Uniform continuum discretization with trapezoid weights."""

    points: np.ndarray
    weights: np.ndarray
    window: tuple[float, float]
    s_values: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        sv = np.asarray(self.s_values, dtype=float)
        if pts.size < 3 or not np.all(np.diff(pts) > 0):
            raise ValueError("grid needs at least 3 strictly increasing points")
        if np.any(wts <= 0):
            raise ValueError("quadrature weights must be positive")
        width = self.window[1] - self.window[0]
        if not math.isclose(float(wts.sum()), width, rel_tol=1e-12):
            raise ValueError("weights are inconsistent with the window")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)
        object.__setattr__(self, "s_values", sv)

    @property
    def n(self) -> int:
        return self.points.size

    @property
    def coupling_weight(self) -> float:
        """Discrete total coupling weight F = sum w_k S(omega_k)."""
        return float(self.weights @ self.s_values)


@dataclass
class OracleState:
    """Averaged dynamical variables at time t."""

    t: float
    p0: float
    d: np.ndarray        # ground-continuum coherences, length N
    e_mat: np.ndarray    # continuum coherence matrix, N x N, Hermitian

    @classmethod
    def initial(cls, grid: ContinuumGrid) -> "OracleState":
        n = grid.n
        return cls(t=0.0, p0=1.0,
                   d=np.zeros(n, dtype=complex),
                   e_mat=np.zeros((n, n), dtype=complex))

    def conserved_total(self, grid: ContinuumGrid) -> float:
        """p0 plus the grid-summed continuum population; stays at 1."""
        u = grid.weights * grid.s_values
        return self.p0 + float(np.real(u @ np.diag(self.e_mat)))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.e_mat - self.e_mat.conj().T)))

    def resymmetrize(self):
        self.e_mat = 0.5 * (self.e_mat + self.e_mat.conj().T)


@dataclass
class OracleRun:
    """Checkpointed trajectory summary returned by :func:`integrate`."""

    grid: ContinuumGrid
    field_params: FieldParams
    dt: float
    times: list[float] = field(default_factory=list)
    p0_history: list[float] = field(default_factory=list)
    conservation_history: list[float] = field(default_factory=list)
    diag_history: list[np.ndarray] = field(default_factory=list)
    converged: bool = False
    final_state: OracleState | None = None

    @property
    def max_conservation_drift(self) -> float:
        return max(abs(c - 1.0) for c in self.conservation_history)


def default_window(derived: DerivedParams, fld: FieldParams,
                   atom: AtomParams | None = None) -> tuple[float, float]:
    """Truncation window: 12 Gamma around the laser, widened to keep both
    resonances at least 8 Gamma inside."""
    g = derived.gamma_total
    lo = fld.omega_laser - 12.0 * g
    hi = fld.omega_laser + 12.0 * g
    res = [derived.omega_plus.real, derived.omega_minus.real]
    if atom is not None:
        res += [atom.omega1, atom.omega2]
    lo = min(lo, min(res) - 8.0 * g)
    hi = max(hi, max(res) + 8.0 * g)
    return (lo, hi)


def build_grid(window: tuple[float, float], n: int, derived: DerivedParams) -> ContinuumGrid:
    """Uniform grid with trapezoid weights and precomputed S values."""
    lo, hi = window
    if not (lo < hi):
        raise ValueError("window must satisfy omega_min < omega_max")
    if n < 3:
        raise ValueError("need at least 3 grid points")
    pts = np.linspace(lo, hi, n)
    dw = (hi - lo) / (n - 1)
    wts = np.full(n, dw)
    wts[0] = wts[-1] = 0.5 * dw
    return ContinuumGrid(points=pts, weights=wts, window=(lo, hi),
                         s_values=form_factor(pts, derived))


def stable_dt(grid: ContinuumGrid, fld: FieldParams) -> float:
    """Fixed step bounded by the fastest rotation and damping rates."""
    lo, hi = grid.window
    width = hi - lo
    rates = [abs(hi - fld.omega_laser), width,
             fld.a * grid.coupling_weight,
             fld.b * math.sqrt(float(grid.s_values.max()) * width)]
    return 0.1 / max(max(rates), 1e-12)


def rhs(state: OracleState, grid: ContinuumGrid, fld: FieldParams):
    """Time derivative (dp0, dd, de) of the averaged equations of motion.

    Reference implementation; the integration loop uses the compiled twin
    in ``_fast`` which must agree to roundoff.
    """
    u = grid.weights * grid.s_values
    omg = grid.points
    a, b = fld.a, fld.b
    big_f = grid.coupling_weight
    d, e = state.d, state.e_mat

    rowsum = e @ u            # integral over the second continuum index
    colsum = u @ e            # integral over the first continuum index
    s_d = u @ d
    quad = float(np.real(u @ rowsum))

    dp0 = -a * big_f * state.p0 + 2.0 * b * float(u @ d.imag) + a * quad
    dd = (-1j * b * state.p0
          + (1j * (fld.omega_laser - omg) - 0.5 * a * big_f) * d
          - 0.5 * a * s_d + 1j * b * colsum)
    de = (a * state.p0
          + 1j * b * (d[None, :] - np.conj(d)[:, None])
          + 1j * (omg[:, None] - omg[None, :]) * e
          - 0.5 * a * (colsum[None, :] + rowsum[:, None]))
    return dp0, dd, de


def _rk4_step_numpy(state: OracleState, grid, fld, dt):
    p0, d, e = state.p0, state.d, state.e_mat
    k1 = rhs(state, grid, fld)
    s2 = OracleState(state.t, p0 + 0.5 * dt * k1[0], d + 0.5 * dt * k1[1], e + 0.5 * dt * k1[2])
    k2 = rhs(s2, grid, fld)
    s3 = OracleState(state.t, p0 + 0.5 * dt * k2[0], d + 0.5 * dt * k2[1], e + 0.5 * dt * k2[2])
    k3 = rhs(s3, grid, fld)
    s4 = OracleState(state.t, p0 + dt * k3[0], d + dt * k3[1], e + dt * k3[2])
    k4 = rhs(s4, grid, fld)
    w = dt / 6.0
    state.p0 = p0 + w * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    state.d = d + w * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    state.e_mat = e + w * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    state.t += dt


def _default_t_final(grid: ContinuumGrid, fld: FieldParams, derived: DerivedParams) -> float:
    """Heuristic horizon from the slowest depletion rate present."""
    s_laser = float(form_factor(fld.omega_laser, derived))
    rate = fld.a * grid.coupling_weight + 2.0 * math.pi * fld.b**2 * s_laser
    if rate <= 0.0:
        return 10.0 / derived.gamma_total
    return min(max(12.0 / rate, 40.0 / derived.gamma_total), 4000.0 / derived.gamma_total)


def integrate(grid: ContinuumGrid, fld: FieldParams,
              t_final: float | None = None, dt: float | None = None,
              derived: DerivedParams | None = None,
              checkpoints: int = 24, convergence_tol: float = 0.005,
              use_numba: bool = True, stop_when_converged: bool = True) -> OracleRun:
    """Integrate from the undriven initial condition and checkpoint.

    Stops early once the normalized diagonal spectrum changes by less than
    ``convergence_tol`` in L2 between consecutive checkpoints (unless
    ``stop_when_converged`` is false).  The coherence matrix is
    re-symmetrized at every checkpoint.
    """
    if dt is None:
        dt = stable_dt(grid, fld)
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final is None:
        if derived is None:
            raise ValueError("need either t_final or derived params for the horizon heuristic")
        t_final = _default_t_final(grid, fld, derived)
    if t_final <= 0:
        raise ValueError("t_final must be positive")

    state = OracleState.initial(grid)
    run = OracleRun(grid=grid, field_params=fld, dt=dt)
    u = grid.weights * grid.s_values
    uc = u.astype(complex)

    steps_total = max(int(math.ceil(t_final / dt)), 1)
    chunk = max(steps_total // checkpoints, 1)

    def checkpoint():
        state.resymmetrize()
        run.times.append(state.t)
        run.p0_history.append(state.p0)
        run.conservation_history.append(state.conserved_total(grid))
        run.diag_history.append(np.real(np.diag(state.e_mat)).copy())

    checkpoint()
    if use_numba:
        from ._fast import rk4_run as _rk4_run_fast

    done = 0
    prev_w = None
    while done < steps_total:
        n_now = min(chunk, steps_total - done)
        if use_numba:
            p0 = _rk4_run_fast(state.p0, state.d, state.e_mat, uc, grid.points,
                               fld.omega_laser, fld.a, fld.b, grid.coupling_weight,
                               dt, n_now)
            if p0 < -0.5:
                raise IntegrationError(
                    f"state magnitude exceeded 1e6 at t~{state.t:.3g}; reduce dt "
                    f"(currently {dt:.3g}) or shrink the window")
            state.p0 = p0
            state.t += n_now * dt
        else:
            for _ in range(n_now):
                _rk4_step_numpy(state, grid, fld, dt)
                if abs(state.p0) > 1e6:
                    raise IntegrationError(
                        f"state magnitude exceeded 1e6 at t~{state.t:.3g}; reduce dt")
        done += n_now
        checkpoint()

        w_now = grid.s_values * run.diag_history[-1]
        if prev_w is not None:
            scale = np.linalg.norm(w_now)
            if scale > 0:
                change = np.linalg.norm(w_now - prev_w) / scale
                if change < convergence_tol:
                    run.converged = True
                    if stop_when_converged:
                        break
        prev_w = w_now

    if fld.b == 0.0 and fld.a0 == 0.0:
        run.converged = True  # nothing evolves; the zero spectrum is final
    run.final_state = state
    return run


def spectrum_oracle(run: OracleRun, clip: float = 1e-9) -> Spectrum:
    """Spectrum W(omega_k) = S(omega_k) * Re E_kk from a converged run."""
    if not run.converged:
        raise ConvergenceError(
            "spectrum had not converged by t_final; raise t_final or loosen the tolerance")
    grid = run.grid
    diag = run.diag_history[-1]
    if np.any(diag < -clip):
        raise IntegrationError("continuum populations went significantly negative")
    w = grid.s_values * np.clip(diag, 0.0, None)
    return Spectrum(grid.points, w, meta={
        "method": "oracle",
        "field": run.field_params,
        "window": grid.window,
        "n_points": grid.n,
        "dt": run.dt,
        "t_final": run.times[-1],
        "p0_final": run.p0_history[-1],
        "max_conservation_drift": run.max_conservation_drift,
    })


def dump_checkpoints(run: OracleRun, path):
    """Textual checkpoint snapshot: one CSV row per (t, p0, diag...)."""
    with open(path, "w") as fh:
        head = ",".join(f"e_diag_{k}" for k in range(run.grid.n))
        fh.write(f"t,p0,{head}\n")
        for t, p0, diag in zip(run.times, run.p0_history, run.diag_history):
            row = ",".join(f"{v:.17g}" for v in diag)
            fh.write(f"{t:.17g},{p0:.17g},{row}\n")
