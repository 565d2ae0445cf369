"""Structural quantities of the double Fano dressed continuum.

Two discrete states embedded in one flat continuum produce, after
configuration-interaction diagonalization, a structured continuum whose
coupling to the ground state is a sum of two complex Lorentzians plus a
flat background.  Everything here is closed-form algebra on the raw atomic
parameters: the complex resonance poles ``omega_plus``/``omega_minus``,
their residues, the pole-pair residues entering the noise kernels, and the
continuum form factor S(omega).

All frequencies and widths are dimensionless (the caller picks the unit);
the overall radiative coupling strength is normalized out, so the drive
amplitudes ``b`` and ``a0`` carry all coupling strength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AtomParams",
    "FieldParams",
    "DerivedParams",
    "ParameterError",
    "derive_params",
    "rabi_coupling",
    "form_factor",
]

# Below this fraction of Gamma, the weaker pole's residue is treated as an
# exact zero (removable 0/0 at degeneracy).
_RESIDUE_FLOOR = 1e-14


class ParameterError(ValueError):
    """Atomic or field parameters outside the model's domain."""


@dataclass(frozen=True)
class AtomParams:
    """Bare two-level-plus-continuum atom.

    ``q1``/``q2`` are the Fano asymmetry parameters; both ``None`` selects
    the infinite-asymmetry limit (no flat background in the coupling).
    """

    omega1: float
    omega2: float
    gamma1: float
    gamma2: float
    q1: float | None = None
    q2: float | None = None

    def __post_init__(self):
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise ParameterError("both autoionization widths must be positive "
                                 "(each discrete state must decay into the continuum)")
        if (self.q1 is None) != (self.q2 is None):
            raise ParameterError("q1 and q2 must both be finite or both infinite")

    @property
    def q_infinite(self) -> bool:
        return self.q1 is None

    def swapped(self) -> "AtomParams":
        """Exchange the two discrete states (a relabeling symmetry)."""
        return AtomParams(self.omega2, self.omega1, self.gamma2, self.gamma1,
                          self.q2, self.q1)


@dataclass(frozen=True)
class FieldParams:
    """Driving laser: frequency, coherent amplitude b, chaotic strength a0.

    ``a0`` is one eighth of the white-noise correlation strength; the
    equations of motion use ``a = 8 * a0``.
    """

    omega_laser: float
    b: float = 0.0
    a0: float = 0.0

    def __post_init__(self):
        if self.b < 0 or self.a0 < 0:
            raise ParameterError("field amplitudes must be nonnegative")

    @property
    def a(self) -> float:
        return 8.0 * self.a0


@dataclass(frozen=True)
class DerivedParams:
    """All closed-form dressed-continuum quantities."""

    gamma_total: float
    q_eff: float            # math.inf in the infinite-asymmetry limit
    theta: float
    phi: float
    omega_plus: complex
    omega_minus: complex
    k_coef: complex
    a_plus: complex
    a_minus: complex
    b_plus: complex
    b_minus: complex
    c_coef: complex

    @property
    def q_infinite(self) -> bool:
        return math.isinf(self.q_eff)

    @property
    def inv_q_plus_i(self) -> complex:
        """Background term 1/(Q+i); zero in the infinite-q limit."""
        return 0.0 if self.q_infinite else 1.0 / (self.q_eff + 1j)

    @property
    def inv_q2_plus_1(self) -> float:
        """Background term 1/(Q^2+1); zero in the infinite-q limit."""
        return 0.0 if self.q_infinite else 1.0 / (self.q_eff**2 + 1.0)


def derive_params(atom: AtomParams, residue_mix: str = "cross") -> DerivedParams:
    """Compute every dressed-continuum quantity from the bare atom.

    ``residue_mix`` selects how the pole-pair residues B+/B- mix the two
    Lorentzian amplitudes: ``"cross"`` pairs each pole with the conjugate
    amplitude of the *other* pole (the combination that makes the noise
    self-energy coefficient equal four times the coupling-weight integral,
    as a contour evaluation of that integral requires); ``"printed"`` pairs
    each pole with its own conjugate amplitude.
    """
    g1, g2 = atom.gamma1, atom.gamma2
    gamma = g1 + g2
    w21 = atom.omega2 - atom.omega1

    if atom.q_infinite:
        q_eff = math.inf
        k = complex((g2 - g1) / gamma)
        inv_q_minus_i = 0.0
    else:
        q_eff = (atom.q1 * g1 + atom.q2 * g2) / gamma
        k = (atom.q2 * g2 - atom.q1 * g1 + 1j * (g2 - g1)) / (gamma * (q_eff + 1j))
        inv_q_minus_i = 1.0 / (q_eff - 1j)

    # theta (real splitting) and phi (width splitting); principal nonnegative
    # square roots at both nesting levels.
    inner = math.sqrt((w21**2 - gamma**2) ** 2 + 4.0 * w21**2 * (g2 - g1) ** 2)
    phi = math.sqrt(max(inner - w21**2 + gamma**2, 0.0) / 2.0)
    theta = math.sqrt(max(inner + w21**2 - gamma**2, 0.0) / 2.0)

    if abs(theta) + abs(phi) < 1e-10 * gamma:
        # equal widths with level spacing exactly equal to the total width:
        # the two poles coalesce into a second-order pole and the
        # two-Lorentzian decomposition does not exist
        raise ParameterError(
            "resonance poles coalesce at this parameter point (equal widths, "
            "|omega2 - omega1| = total width); perturb the levels slightly")

    mean = 0.5 * (atom.omega1 + atom.omega2)
    omega_p = mean + 0.5 * theta + 0.5j * (gamma + phi)
    omega_m = mean - 0.5 * theta + 0.5j * (gamma - phi)

    ratio = (w21 * k + 1j * gamma) / (theta + 1j * phi)
    a_p = 0.5 * gamma * (1.0 + ratio)
    a_m = 0.5 * gamma * (1.0 - ratio)
    # gamma - phi underflowing to zero means the level spacing is at roundoff
    # scale: the weaker pole's residue and pair residue (both O(spacing^2))
    # are negligible and their formulas would divide by zero
    if abs(a_m) <= _RESIDUE_FLOOR * gamma or gamma - phi <= 0.0:
        a_m = 0.0

    if residue_mix == "cross":
        x_p, x_m = np.conj(a_m), np.conj(a_p)
    elif residue_mix == "printed":
        x_p, x_m = np.conj(a_p), np.conj(a_m)
    else:
        raise ValueError(f"unknown residue_mix {residue_mix!r}")

    b_p = 2.0 * a_p * (np.conj(a_p) / (1j * (gamma + phi))
                       + x_p / (1j * gamma + theta) + inv_q_minus_i)
    if a_m == 0.0:
        b_m = 0.0  # removable 0/0: the residue vanishes with the amplitude
    else:
        b_m = 2.0 * a_m * (np.conj(a_m) / (1j * (gamma - phi))
                           + x_m / (1j * gamma - theta) + inv_q_minus_i)

    c = 1j * (b_p + b_m) / gamma

    return DerivedParams(
        gamma_total=gamma, q_eff=q_eff, theta=theta, phi=phi,
        omega_plus=omega_p, omega_minus=omega_m, k_coef=k,
        a_plus=complex(a_p), a_minus=complex(a_m),
        b_plus=complex(b_p), b_minus=complex(b_m), c_coef=complex(c),
    )


def rabi_coupling(omega, derived: DerivedParams):
    """Complex ground-to-continuum coupling amplitude at real frequency omega.

    Two complex Lorentzians plus a flat background, normalized by
    1/sqrt(4 pi Gamma).  The weaker pole's term is dropped outright when its
    residue is an exact zero (degenerate atom), which removes the on-axis
    0/0 there.
    """
    omega = np.asarray(omega, dtype=float)
    d = derived
    val = d.a_plus / (omega - d.omega_plus) + d.inv_q_plus_i
    if d.a_minus != 0.0:
        val = val + d.a_minus / (omega - d.omega_minus)
    return val / math.sqrt(4.0 * math.pi * d.gamma_total)


def form_factor(omega, derived: DerivedParams):
    """Continuum weight S(omega) = |rabi_coupling|^2, real and nonnegative."""
    amp = rabi_coupling(omega, derived)
    return np.abs(amp) ** 2
