"""Closed-form steady-state solver for the long-time photoelectron spectrum.

The exactly averaged equations of motion are linear, so their Laplace
transform collapses, via a separation ansatz for the continuum coherence
matrix, onto a 5x5 complex linear system in the ground-state transform and
four auxiliary amplitudes.  Solving that system near z = 0 and evaluating
the separated coherence amplitude zeta at each observation frequency gives
the spectrum W(omega) = S(omega) * |2 Re zeta(omega)| without any time
integration.

The z -> 0 limit is taken by evaluating at a small regularized z and
re-solving at z/10 to confirm convergence.  A few transcription ambiguities
in the source formulas (residue pairing, the mirror equation of the
coherence amplitude, the frame of the two-pole kernel) are exposed as
options on :class:`EngineOptions`; the defaults are the variants validated
against the independent time-domain oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .continuum import AtomParams, DerivedParams, FieldParams, derive_params, form_factor
from .spectrum import Spectrum

__all__ = [
    "EngineOptions",
    "Kernels",
    "SteadyAmplitudes",
    "PoleProximityError",
    "SingularSystemError",
    "kernel_d",
    "kernel_e",
    "kernel_f",
    "kernel_g",
    "h_factors",
    "build_kernels",
    "solve_steady",
    "zeta_at",
    "ResolventAmplitudes",
    "solve_resolvent",
    "zeta_resolvent",
    "spectrum_analytic",
    "DiscrepancyDiagnostic",
    "FormulaDiscrepancyReport",
    "formula_discrepancy_report",
]


class PoleProximityError(ArithmeticError):
    """A kernel denominator fell below the resolvable threshold."""


class SingularSystemError(np.linalg.LinAlgError):
    """The steady-state linear system is numerically singular."""


@dataclass(frozen=True)
class EngineOptions:
    """Evaluation and formula-variant switches for the analytic chain.

    chain:          "resolvent" (default) closes the continuum integrals of
                    the separated amplitudes exactly over the Lorentzian
                    poles of the coupling weight; "printed" uses the
                    as-transcribed single-constant closure (kept as a
                    diagnostic because the two disagree when the coherent
                    drive dominates).
    z_reg:          regularized Laplace point, in units of the total width.
    residue_mix:    pole-pair residue pairing, "cross" (default) or "printed".
    mirror_form:    mirror equation for the second coherence amplitude:
                    "conjugate" (default; the form consistent with the
                    Hermiticity of the coherence matrix at real z) or
                    "printed" (bare symbol substitution).
    f_frame:        two-pole kernel measured from the laser frequency
                    ("laser", default, the translation-invariant choice) or
                    from the absolute energy zero ("printed").
    source_factor:  coefficient of the noise source term feeding the
                    coherence amplitudes (4 as printed); diagnostic knob.
    assembly_omega: observation frequency at which the omega-dependent
                    factors of the amplitude system are pinned; None means
                    the laser frequency.
    pole_threshold: denominators smaller than this (times Gamma) raise
                    PoleProximityError.
    cond_cap:       condition-number cap for the equilibrated 5x5 system.
    """

    chain: str = "resolvent"
    z_reg: float = 1e-8
    residue_mix: str = "cross"
    mirror_form: str = "conjugate"
    f_frame: str = "laser"
    kernel_poles: str = "conjugated"
    source_factor: float = 4.0
    assembly_omega: float | None = None
    pole_threshold: float = 1e-12
    cond_cap: float = 1e12


@dataclass(frozen=True)
class SteadyAmplitudes:
    """Solution of the steady-state system at a given Laplace point."""

    z: complex
    p0: complex
    a_plus_amp: complex
    a_minus_amp: complex
    d_plus_amp: complex
    d_minus_amp: complex
    residual: float
    cond: float

    @property
    def conjugation_defect(self) -> float:
        """Relative departure of D- from conj(D+); transcription diagnostic."""
        denom = abs(self.d_plus_amp) + 1e-300
        return abs(self.d_minus_amp - np.conj(self.d_plus_amp)) / denom


@dataclass(frozen=True)
class Kernels:
    """Scalar kernels of the steady-state system at a fixed Laplace point."""

    z: complex
    e_coef: complex
    f_coef: complex
    g_coef: complex
    derived: DerivedParams
    field_params: FieldParams
    options: EngineOptions = field(default_factory=EngineOptions)

    def d_fn(self, omega):
        return kernel_d(self.z, omega, self.derived,
                        pole_threshold=self.options.pole_threshold,
                        poles=self.options.kernel_poles)

    def h_plus(self, omega):
        return h_factors(self.z, omega, self.derived, self.field_params,
                         pole_threshold=self.options.pole_threshold,
                         poles=self.options.kernel_poles)[0]

    def h_minus(self, omega):
        return h_factors(self.z, omega, self.derived, self.field_params,
                         pole_threshold=self.options.pole_threshold,
                         poles=self.options.kernel_poles)[1]


def _guard(den, gamma, threshold, what):
    if np.any(np.abs(den) < threshold * gamma):
        raise PoleProximityError(f"denominator of {what} within {threshold}*Gamma of a pole")
    return den


def _pole_terms(derived: DerivedParams, poles: str):
    """(pole, residue) pairs of the noise kernels.

    "conjugated": the lower-half-plane poles a contour evaluation of the
    coupling-weight integral actually encloses, with the matching negated
    conjugate residues.  "printed": the upper-half resonance poles verbatim.
    """
    if poles == "conjugated":
        terms = [(np.conj(derived.omega_plus), -np.conj(derived.b_plus))]
        if derived.b_minus != 0.0:
            terms.append((np.conj(derived.omega_minus), -np.conj(derived.b_minus)))
    elif poles == "printed":
        terms = [(derived.omega_plus, derived.b_plus)]
        if derived.b_minus != 0.0:
            terms.append((derived.omega_minus, derived.b_minus))
    else:
        raise ValueError(f"unknown kernel_poles {poles!r}")
    return terms


def kernel_d(z, omega, derived: DerivedParams, pole_threshold: float = 1e-12,
             poles: str = "conjugated"):
    """Two-pole noise kernel d(z, omega); vectorized over real omega."""
    d = derived
    omega = np.asarray(omega)
    val = complex(d.inv_q2_plus_1)
    for pole, res in _pole_terms(d, poles):
        den = _guard(pole - omega - 1j * z, d.gamma_total, pole_threshold, "d")
        val = val + res / den
    return val / d.gamma_total


def kernel_e(z, derived: DerivedParams, fld: FieldParams, pole_threshold: float = 1e-12,
             poles: str = "conjugated"):
    """Kernel d evaluated at the noise-shifted laser frequency."""
    d = derived
    shift = fld.omega_laser + 1j * fld.a0 * np.conj(d.c_coef)
    val = complex(d.inv_q2_plus_1)
    for pole, res in _pole_terms(d, poles):
        den = _guard(pole - shift - 1j * z, d.gamma_total, pole_threshold, "e")
        val = val + res / den
    return val / d.gamma_total


def kernel_f(z, derived: DerivedParams, fld: FieldParams, frame: str = "laser",
             pole_threshold: float = 1e-12, poles: str = "conjugated"):
    """Two-pole kernel at twice the pole detuning (sum-frequency channel)."""
    d = derived
    val = complex(d.inv_q2_plus_1)
    for pole, res in _pole_terms(d, poles):
        if frame == "laser":
            wp = 2.0 * (pole - fld.omega_laser)
        elif frame == "printed":
            wp = 2.0 * pole
        else:
            raise ValueError(f"unknown f_frame {frame!r}")
        den = _guard(wp - 1j * z, d.gamma_total, pole_threshold, "f")
        val = val + res / den
    return val / d.gamma_total


def kernel_g(z, derived: DerivedParams, fld: FieldParams, pole_threshold: float = 1e-12,
             poles: str = "conjugated"):
    """Sum of the two pole propagators at the laser detuning."""
    d = derived
    if poles == "conjugated":
        a0c = fld.a0 * np.conj(d.c_coef)
        wp, wm = np.conj(d.omega_plus), np.conj(d.omega_minus)
    else:
        a0c = fld.a0 * d.c_coef
        wp, wm = d.omega_plus, d.omega_minus
    den_p = _guard(z + a0c + 1j * (wp - fld.omega_laser),
                   d.gamma_total, pole_threshold, "g (+ pole)")
    den_m = _guard(z + a0c + 1j * (wm - fld.omega_laser),
                   d.gamma_total, pole_threshold, "g (- pole)")
    return 1.0 / den_p + 1.0 / den_m


def _pole_factor(z, omega, derived: DerivedParams, fld: FieldParams,
                 pole_threshold: float = 1e-12):
    """1 / (z + a0 c + i (omega_L - omega)); vectorized over omega."""
    den = z + fld.a0 * derived.c_coef + 1j * (fld.omega_laser - np.asarray(omega))
    _guard(den, derived.gamma_total, pole_threshold, "laser-detuning factor")
    return 1.0 / den


def h_factors(z, omega, derived: DerivedParams, fld: FieldParams,
              pole_threshold: float = 1e-12, poles: str = "conjugated"):
    """Return (H+, H-) at (z, omega); vectorized over omega.

    The minus factor uses the conjugated kernel and self-energy, valid at
    (near-)real z, which is the only regime the engine evaluates.
    """
    d_val = kernel_d(z, omega, derived, pole_threshold, poles)
    gp = _pole_factor(z, omega, derived, fld, pole_threshold)
    den_m = z + fld.a0 * np.conj(derived.c_coef) - 1j * (fld.omega_laser - np.asarray(omega))
    _guard(den_m, derived.gamma_total, pole_threshold, "conjugate laser-detuning factor")
    b2 = fld.b**2
    h_plus = 1.0 + fld.a0 * d_val + b2 * d_val * gp / 4.0
    h_minus = 1.0 + fld.a0 * np.conj(d_val) + b2 * np.conj(d_val) / (4.0 * den_m)
    return h_plus, h_minus


def build_kernels(z, derived: DerivedParams, fld: FieldParams,
                  options: EngineOptions = EngineOptions()) -> Kernels:
    pt = options.pole_threshold
    kp = options.kernel_poles
    return Kernels(
        z=z,
        e_coef=complex(kernel_e(z, derived, fld, pt, kp)),
        f_coef=complex(kernel_f(z, derived, fld, options.f_frame, pt, kp)),
        g_coef=complex(kernel_g(z, derived, fld, pt, kp)),
        derived=derived,
        field_params=fld,
        options=options,
    )


@dataclass(frozen=True)
class ResolventAmplitudes:
    """Solution of the exact pole-closure system at a given Laplace point.

    ``zeta_poles``/``eta_poles`` are the separated coherence amplitudes
    evaluated at the resonance poles and their conjugates; together with
    (P0, A+, A-) they determine the coherence amplitude everywhere.
    """

    z: complex
    p0: complex
    a_plus_amp: complex
    a_minus_amp: complex
    zeta_poles: tuple
    eta_poles: tuple
    residual: float
    cond: float

    @property
    def conjugation_defect(self) -> float:
        """Departure of the eta pole values from conj(zeta at the mirror
        pole), which an Hermitian coherence matrix requires at real z."""
        worst = 0.0
        for zt, es in zip(self.zeta_poles, self.eta_poles):
            worst = max(worst, abs(es - np.conj(zt)) / (abs(zt) + 1e-300))
        return worst


def _active_poles(derived: DerivedParams):
    """(pole, residue) pairs with nonvanishing residue, upper half-plane."""
    terms = [(derived.omega_plus, derived.b_plus)]
    if derived.b_minus != 0.0:
        terms.append((derived.omega_minus, derived.b_minus))
    return terms


def _resolvent_system(z, derived: DerivedParams, fld: FieldParams, options: EngineOptions):
    """Assemble the exact closure system for x = (P0, A+, A-, zeta_t.., eta_s..).

    The continuum integrals of the separated amplitudes close over the
    Lorentzian poles of the coupling weight, leaving the amplitudes' values
    at those poles as the only unknowns beyond (P0, A+, A-).  Background
    principal-value pieces of order 1/(Q^2+1) are dropped (they vanish for
    infinite asymmetry and are negligible at the large finite values used).
    """
    d = derived
    gamma = d.gamma_total
    a0, b = fld.a0, fld.b
    w_l = fld.omega_laser
    c = d.c_coef
    pt = options.pole_threshold

    up = _active_poles(d)                       # (omega_t, B_t)
    dn = [(np.conj(w), -np.conj(r)) for w, r in up]   # (omega_s*, D_s)
    n_act = len(up)
    dim = 3 + 2 * n_act

    def d_fn(om):
        val = complex(d.inv_q2_plus_1)
        for ws, rs in dn:
            val += rs / _guard(ws - om - 1j * z, gamma, pt, "resolvent d")
        return val / gamma

    def dbar_fn(om):
        val = complex(d.inv_q2_plus_1)
        for wt, rt in up:
            val += -rt / _guard(wt - om + 1j * z, gamma, pt, "resolvent dbar")
        return val / gamma

    def gbar(om):   # D+ / zeta side propagator
        return 1.0 / _guard(z + a0 * c + 1j * (w_l - om), gamma, pt, "resolvent gbar")

    def gtil(om):   # D / eta side propagator
        return 1.0 / _guard(z + a0 * np.conj(c) - 1j * (w_l - om), gamma, pt, "resolvent gtil")

    e_coef = complex(d.inv_q2_plus_1)
    for ws, rs in dn:
        e_coef += rs / _guard(ws - w_l - 1j * (z + a0 * np.conj(c)), gamma, pt, "resolvent e")
    e_coef /= gamma
    ebar_coef = complex(d.inv_q2_plus_1)
    for wt, rt in up:
        ebar_coef += -rt / _guard(wt - w_l + 1j * (z + a0 * c), gamma, pt, "resolvent ebar")
    ebar_coef /= gamma

    # index helpers into x = (P0, A+, A-, zeta_0.., eta_0..)
    iz0, izp, izm = 0, 1, 2
    izt = lambda t: 3 + t
    ies = lambda s: 3 + n_act + s

    def ieta_row(om):
        """Iη(om) as a coefficient row over the eta unknowns."""
        row = np.zeros(dim, dtype=complex)
        for s, (ws, rs) in enumerate(dn):
            row[ies(s)] = rs / (4.0 * gamma * (ws - om - 1j * z))
        return row

    def izeta_row(om):
        row = np.zeros(dim, dtype=complex)
        for t, (wt, rt) in enumerate(up):
            row[izt(t)] = -rt / (4.0 * gamma * (wt - om + 1j * z))
        return row

    def k_row(s):
        """K at the conjugated pole s, as a coefficient row."""
        ws = dn[s][0]
        row = izeta_row(ws)
        row[ies(s)] += dbar_fn(ws) / 4.0
        return row

    def g_row(t):
        """G at the resonance pole t, as a coefficient row."""
        wt = up[t][0]
        row = ieta_row(wt)
        row[izt(t)] += d_fn(wt) / 4.0
        return row

    m = np.zeros((dim, dim), dtype=complex)
    rhs = np.zeros(dim, dtype=complex)

    # ground-state transform, multiplied through by z
    row = np.zeros(dim, dtype=complex)
    row[iz0] = z + 2.0 * a0 * c
    row[izm] = 1j * b * e_coef / 4.0
    row[izp] = -1j * b * ebar_coef / 4.0
    for s, (ws, rs) in enumerate(dn):
        row -= (1j * b) * (b / (4.0 * gamma)) * rs * gtil(ws) * k_row(s)
    for t, (wt, rt) in enumerate(up):
        row -= (1j * b) * (b / (4.0 * gamma)) * rt * gbar(wt) * g_row(t)
        row -= (8.0 * a0) * (1j / (4.0 * gamma)) * rt * g_row(t)
    m[0] = row
    rhs[0] = 1.0

    # plus coherence amplitude: (1 + a0 ebar) A+ - ib P0 + (a0 b/G) sum B_t gbar_t G_t = 0
    row = np.zeros(dim, dtype=complex)
    row[izp] = 1.0 + a0 * ebar_coef
    row[iz0] = -1j * b
    for t, (wt, rt) in enumerate(up):
        row += (a0 * b / gamma) * rt * gbar(wt) * g_row(t)
    m[1] = row

    # minus coherence amplitude: (1 + a0 e) A- + ib P0 - (a0 b/G) sum D_s gtil_s K_s = 0
    row = np.zeros(dim, dtype=complex)
    row[izm] = 1.0 + a0 * e_coef
    row[iz0] = 1j * b
    for s, (ws, rs) in enumerate(dn):
        row -= (a0 * b / gamma) * rs * gtil(ws) * k_row(s)
    m[2] = row

    # zeta at each resonance pole
    for t, (wt, rt) in enumerate(up):
        gb = gbar(wt)
        h_plus = 1.0 + a0 * d_fn(wt) + b**2 * d_fn(wt) * gb / 4.0
        row = np.zeros(dim, dtype=complex)
        row[izt(t)] = h_plus
        row[iz0] = -options.source_factor * a0
        row[izp] = 1j * b * gb
        row += (4.0 * a0 + b**2 * gb) * ieta_row(wt)
        m[3 + t] = row

    # eta at each conjugated pole
    for s, (ws, rs) in enumerate(dn):
        gt = gtil(ws)
        h_minus = 1.0 + a0 * dbar_fn(ws) + b**2 * dbar_fn(ws) * gt / 4.0
        row = np.zeros(dim, dtype=complex)
        row[ies(s)] = h_minus
        row[iz0] = -options.source_factor * a0
        row[izm] = -1j * b * gt
        row += (4.0 * a0 + b**2 * gt) * izeta_row(ws)
        m[3 + n_act + s] = row

    return m, rhs, n_act


def solve_resolvent(derived: DerivedParams, fld: FieldParams, z,
                    options: EngineOptions = EngineOptions()) -> ResolventAmplitudes:
    """Solve the exact pole-closure system at Laplace point z."""
    m, rhs, n_act = _resolvent_system(z, derived, fld, options)
    scale = np.max(np.abs(m), axis=1)
    scale[scale == 0.0] = 1.0
    ms = m / scale[:, None]
    rs = rhs / scale
    cond = float(np.linalg.cond(ms))
    if not np.isfinite(cond) or cond > options.cond_cap:
        raise SingularSystemError(
            f"pole-closure system condition number {cond:.3e} exceeds "
            f"{options.cond_cap:.1e} at z={z!r} (b={fld.b}, a0={fld.a0})")
    x = np.linalg.solve(ms, rs)
    residual = float(np.linalg.norm(ms @ x - rs)
                     / (np.linalg.norm(ms, ord=2) * np.linalg.norm(x) + np.linalg.norm(rs)))
    return ResolventAmplitudes(
        z=complex(z), p0=complex(x[0]),
        a_plus_amp=complex(x[1]), a_minus_amp=complex(x[2]),
        zeta_poles=tuple(x[3:3 + n_act]), eta_poles=tuple(x[3 + n_act:]),
        residual=residual, cond=cond,
    )


def zeta_resolvent(omega, steady: ResolventAmplitudes, derived: DerivedParams,
                   fld: FieldParams, options: EngineOptions = EngineOptions()):
    """Separated coherence amplitude from the pole-closure solution."""
    z = steady.z
    d = derived
    gamma = d.gamma_total
    a0, b = fld.a0, fld.b
    pt = options.pole_threshold
    omega = np.asarray(omega, dtype=float)

    up = _active_poles(d)
    dn = [(np.conj(w), -np.conj(r)) for w, r in up]

    d_val = kernel_d(z, omega, d, pt, poles="conjugated")
    gb = 1.0 / _guard(z + a0 * d.c_coef + 1j * (fld.omega_laser - omega), gamma, pt,
                      "resolvent laser-detuning factor")
    i_eta = np.zeros(omega.shape, dtype=complex)
    for (ws, rs), es in zip(dn, steady.eta_poles):
        i_eta = i_eta + rs * es / (4.0 * gamma * (ws - omega - 1j * z))
    h_plus = 1.0 + a0 * d_val + b**2 * d_val * gb / 4.0
    num = (options.source_factor * a0 * steady.p0
           - 1j * b * steady.a_plus_amp * gb
           - (4.0 * a0 + b**2 * gb) * i_eta)
    return num / h_plus


def _assemble(z, derived: DerivedParams, fld: FieldParams, options: EngineOptions,
              omega_eval: float):
    """Build the 5x5 system for x = (P0, A+, A-, D+, D-); returns (M, rhs)."""
    ker = build_kernels(z, derived, fld, options)
    e, f, g = ker.e_coef, ker.f_coef, ker.g_coef
    es, fs = np.conj(e), np.conj(f)
    a0, b = fld.a0, fld.b
    c = derived.c_coef
    sf = options.source_factor
    h_plus, h_minus = h_factors(z, omega_eval, derived, fld, options.pole_threshold,
                                options.kernel_poles)
    h_plus = complex(h_plus)
    h_minus = complex(h_minus)

    kappa = b**2 * e * f + b**2 * es * fs + f

    m = np.zeros((5, 5), dtype=complex)
    rhs = np.zeros(5, dtype=complex)

    # ground-state transform, multiplied through by z
    m[0, 0] = z + 2.0 * a0 * c
    m[0, 1] = -0.25j * b * es
    m[0, 2] = 0.25j * b * e
    m[0, 3] = kappa / 16.0
    m[0, 4] = kappa / 16.0
    rhs[0] = 1.0

    # minus coherence amplitude
    m[1, 0] = 1j * b
    m[1, 2] = 1.0 + a0 * e
    m[1, 3] = -0.25j * a0 * b * e * f
    m[1, 4] = -0.25j * a0 * b * e * f

    # plus coherence amplitude
    m[2, 0] = -1j * b
    m[2, 1] = 1.0 + a0 * es
    m[2, 3] = 0.25j * a0 * b * es * fs
    m[2, 4] = 0.25j * a0 * b * es * fs

    # separated-amplitude closure, plus branch
    m[3, 0] = sf * a0
    m[3, 2] = 1j * b * g
    m[3, 3] = h_minus
    m[3, 4] = h_minus - 1.0

    # separated-amplitude closure, minus branch (mirror equation)
    m[4, 0] = sf * a0
    if options.mirror_form == "conjugate":
        m[4, 1] = -1j * b * np.conj(g)
    elif options.mirror_form == "printed":
        m[4, 1] = 1j * b * g
    else:
        raise ValueError(f"unknown mirror_form {options.mirror_form!r}")
    m[4, 3] = h_plus - 1.0
    m[4, 4] = h_plus

    return m, rhs


def solve_steady(derived: DerivedParams, fld: FieldParams, z,
                 options: EngineOptions = EngineOptions(),
                 omega_eval: float | None = None) -> SteadyAmplitudes:
    """Solve the steady-state 5x5 system at Laplace point z.

    The omega-dependent closure factors are pinned at ``omega_eval``
    (defaults to the option's assembly frequency, then the laser frequency).
    """
    if omega_eval is None:
        omega_eval = (options.assembly_omega if options.assembly_omega is not None
                      else fld.omega_laser)
    m, rhs = _assemble(z, derived, fld, options, omega_eval)

    # row equilibration so the condition number reflects the solve actually done
    scale = np.max(np.abs(m), axis=1)
    scale[scale == 0.0] = 1.0
    ms = m / scale[:, None]
    rs = rhs / scale
    cond = float(np.linalg.cond(ms))
    if not np.isfinite(cond) or cond > options.cond_cap:
        raise SingularSystemError(
            f"steady-state system condition number {cond:.3e} exceeds "
            f"{options.cond_cap:.1e} at z={z!r} (b={fld.b}, a0={fld.a0})")
    x = np.linalg.solve(ms, rs)
    residual = float(np.linalg.norm(ms @ x - rs)
                     / (np.linalg.norm(ms, ord=2) * np.linalg.norm(x) + np.linalg.norm(rs)))
    return SteadyAmplitudes(
        z=complex(z), p0=complex(x[0]),
        a_plus_amp=complex(x[1]), a_minus_amp=complex(x[2]),
        d_plus_amp=complex(x[3]), d_minus_amp=complex(x[4]),
        residual=residual, cond=cond,
    )


def zeta_at(omega, steady: SteadyAmplitudes, derived: DerivedParams, fld: FieldParams,
            options: EngineOptions = EngineOptions()):
    """Separated coherence amplitude zeta at real omega; vectorized."""
    z = steady.z
    d_val = kernel_d(z, omega, derived, options.pole_threshold, options.kernel_poles)
    gp = _pole_factor(z, omega, derived, fld, options.pole_threshold)
    corr = fld.a0 * d_val + fld.b**2 * d_val * gp / 4.0
    h_plus = 1.0 + corr
    num = (options.source_factor * fld.a0 * steady.p0
           - 1j * fld.b * steady.a_plus_amp * gp
           + steady.d_plus_amp * corr)
    return num / h_plus


def _spectrum_values(derived, fld, grid, options, z):
    if options.chain == "resolvent":
        steady = solve_resolvent(derived, fld, z, options)
        zeta = zeta_resolvent(grid, steady, derived, fld, options)
    elif options.chain == "printed":
        steady = solve_steady(derived, fld, z, options)
        zeta = zeta_at(grid, steady, derived, fld, options)
    else:
        raise ValueError(f"unknown chain variant {options.chain!r}")
    s_vals = form_factor(grid, derived)
    w = s_vals * np.abs(2.0 * np.real(zeta))
    return w, steady


def spectrum_analytic(atom: AtomParams, fld: FieldParams, grid,
                      options: EngineOptions = EngineOptions()) -> Spectrum:
    """Analytic long-time spectrum on an ascending real frequency grid.

    Evaluates at the regularized Laplace point z* = z_reg * Gamma and
    re-solves at z*/10; the pointwise drift between the two is recorded in
    the metadata so callers can see whether the z -> 0 limit has converged.
    At a0 = 0 the coherent line at the laser frequency is quasi-singular
    (width b^2/(2 Gamma) in the degenerate case): its on-grid samples are
    finite and exact, but diagnostics that depend on resolving the line are
    grid-resolution limited.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or not np.all(np.diff(grid) > 0):
        raise ValueError("grid must be a 1-D strictly increasing array")
    derived = derive_params(atom, residue_mix=options.residue_mix)
    gamma = derived.gamma_total

    if fld.b == 0.0 and fld.a0 == 0.0:
        # no driving: the continuum never populates
        return Spectrum(grid, np.zeros_like(grid),
                        meta=_meta(atom, fld, options, 0.0, 0.0))

    z_star = options.z_reg * gamma
    w, steady = _spectrum_values(derived, fld, grid, options, z_star)
    w_check, _ = _spectrum_values(derived, fld, grid, options, z_star / 10.0)
    denom = np.maximum(np.abs(w), 1e-300)
    z_drift = float(np.max(np.abs(w - w_check) / denom))

    return Spectrum(grid, np.maximum(w, 0.0),
                    meta=_meta(atom, fld, options, steady.conjugation_defect, z_drift))


@dataclass(frozen=True)
class DiscrepancyDiagnostic:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class FormulaDiscrepancyReport:
    """Why the as-printed closed forms disagree with the validated spectrum.

    ``printed_l2`` is the normalized L2 distance of the printed-chain
    spectrum from the reference (the exact pole-closure spectrum unless an
    oracle spectrum is supplied); ``first_failing`` names the first
    diagnostic that fails, in the fixed order conjugation check, factor-4
    knob, mirror-kernel argument.
    """

    printed_l2: float
    tolerance: float
    diagnostics: tuple
    reference_method: str

    @property
    def exceeds_tolerance(self) -> bool:
        return self.printed_l2 > self.tolerance

    @property
    def first_failing(self) -> str | None:
        for diag in self.diagnostics:
            if not diag.passed:
                return diag.name
        return None

    def render(self) -> str:
        lines = [
            "formula-discrepancy report",
            f"  printed-chain normalized L2 vs {self.reference_method}: "
            f"{self.printed_l2:.4f} (tolerance {self.tolerance})",
        ]
        for diag in self.diagnostics:
            status = "pass" if diag.passed else "FAIL"
            lines.append(f"  [{status}] {diag.name}: {diag.detail}")
        if self.first_failing:
            lines.append(f"  first failing diagnostic: {self.first_failing}")
        return "\n".join(lines)


def _normalized_l2(values_a, values_b, grid):
    wa = np.trapezoid(values_a, grid)
    wb = np.trapezoid(values_b, grid)
    a = values_a / wa if wa > 0 else values_a
    b = values_b / wb if wb > 0 else values_b
    den = np.sqrt(np.trapezoid(b ** 2, grid))
    if den == 0.0:
        return 0.0
    return float(np.sqrt(np.trapezoid((a - b) ** 2, grid)) / den)


def formula_discrepancy_report(atom: AtomParams, fld: FieldParams, grid,
                               tolerance: float = 0.05,
                               reference: Spectrum | None = None) -> FormulaDiscrepancyReport:
    """Diagnose the as-printed closed-form chain against a trusted spectrum.

    Emitted whenever the printed single-constant closure exceeds the
    equivalence tolerance; the exact pole closure (or a supplied oracle
    spectrum) serves as the reference.
    """
    grid = np.asarray(grid, dtype=float)
    printed = spectrum_analytic(atom, fld, grid,
                                replace(EngineOptions(), chain="printed"))
    if reference is None:
        ref_values = spectrum_analytic(atom, fld, grid, EngineOptions()).values
        ref_method = "pole-closure spectrum"
    else:
        if reference.omegas.shape != grid.shape or not np.array_equal(reference.omegas, grid):
            raise ValueError("reference spectrum must live on the requested grid")
        ref_values = reference.values
        ref_method = reference.meta.get("method", "reference")
    printed_l2 = _normalized_l2(printed.values, ref_values, grid)

    derived = derive_params(atom)
    z_star = EngineOptions().z_reg * derived.gamma_total
    diagnostics = []

    # 1. conjugation check: with the mirror equation transcribed verbatim the
    #    second coherence amplitude must still come out as conj(D+) at real z
    steady_printed = solve_steady(derived, fld, z_star,
                                  replace(EngineOptions(), chain="printed",
                                          mirror_form="printed"))
    defect = steady_printed.conjugation_defect
    diagnostics.append(DiscrepancyDiagnostic(
        name="conjugation check",
        passed=defect < 1e-6,
        detail=f"verbatim mirror equation gives |D- - conj(D+)|/|D+| = {defect:.3e}",
    ))

    # 2. factor-4 knob: no rescaling of the noise source coefficient brings
    #    the printed chain within tolerance
    best = (4.0, printed_l2)
    for factor in (1.0, 2.0, 8.0):
        opts = replace(EngineOptions(), chain="printed", source_factor=factor)
        try:
            alt = spectrum_analytic(atom, fld, grid, opts)
        except (PoleProximityError, SingularSystemError):
            continue
        l2 = _normalized_l2(alt.values, ref_values, grid)
        if l2 < best[1]:
            best = (factor, l2)
    diagnostics.append(DiscrepancyDiagnostic(
        name="factor-4 knob",
        passed=printed_l2 <= tolerance,
        detail=(f"source factor 4 gives L2={printed_l2:.4f}; best rescaling "
                f"(factor {best[0]:g}) still gives L2={best[1]:.4f}"),
    ))

    # 3. mirror-kernel argument: the noise kernel entering H- must decay in
    #    time, i.e. carry the conjugated (lower half-plane) poles; the
    #    verbatim transcription places them in the growing half-plane
    d_printed = kernel_d(z_star, fld.omega_laser, derived, poles="printed")
    d_conj = kernel_d(z_star, fld.omega_laser, derived, poles="conjugated")
    h_gap = abs(d_printed - d_conj) / (abs(d_conj) + 1e-300)
    diagnostics.append(DiscrepancyDiagnostic(
        name="H- argument",
        passed=h_gap < 1e-9,
        detail=(f"verbatim vs conjugated noise kernel at the laser frequency "
                f"differ by {h_gap:.3e} (relative)"),
    ))

    return FormulaDiscrepancyReport(
        printed_l2=printed_l2, tolerance=tolerance,
        diagnostics=tuple(diagnostics), reference_method=ref_method,
    )


def _meta(atom, fld, options, conj_defect, z_drift):
    return {
        "method": "analytic",
        "atom": atom,
        "field": fld,
        "options": options,
        "conjugation_defect": conj_defect,
        "z_limit_drift": z_drift,
    }
