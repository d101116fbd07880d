"""Two-level state algebra: pulses, kinematic phases, post-selection, weak values.

Basis ordering is (|g>, |e>) with sigma_z = |e><e| - |g><g|, i.e. the
excited state is the +1 eigenstate.  All operations are pure functions on
immutable values and are safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._numutil import wrap_angle
from .constants import HBAR
from .errors import SingularPostselectionError

#: Pauli matrices in the (g, e) ordering; sigma_z = diag(-1, +1).
IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)

#: Below this post-selection amplitude the conditioned value is reported as
#: singular rather than as a huge float.
EPS_OVERLAP = 1e-8

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class TwoLevelState:
    """Normalized internal state amp_g |g> + amp_e |e>."""

    amp_g: complex
    amp_e: complex

    def __post_init__(self) -> None:
        norm_sq = abs(self.amp_g) ** 2 + abs(self.amp_e) ** 2
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm^2 = {norm_sq!r}, expected 1 within {_NORM_TOL}")

    @classmethod
    def from_unnormalized(cls, amp_g: complex, amp_e: complex) -> "TwoLevelState":
        norm = math.sqrt(abs(amp_g) ** 2 + abs(amp_e) ** 2)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amp_g / norm, amp_e / norm)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp_g, self.amp_e], dtype=complex)


def ground_state() -> TwoLevelState:
    return TwoLevelState(1.0, 0.0)


def excited_state() -> TwoLevelState:
    return TwoLevelState(0.0, 1.0)


def initial_superposition(phi: float) -> TwoLevelState:
    """Pre-selected state (|g> - i e^{i phi} |e>)/sqrt(2).

    This is the state after the pi/2 splitting pulse once the relative
    phase phi (kinetic plus field-induced) has accumulated.
    """
    rt2 = math.sqrt(2.0)
    return TwoLevelState(1.0 / rt2, -1.0j * np.exp(1.0j * phi) / rt2)


def postselection_state(theta: float) -> TwoLevelState:
    """Post-selection state cos(theta)|g> + i sin(theta)|e>."""
    return TwoLevelState(math.cos(theta), 1.0j * math.sin(theta))


@dataclass(frozen=True)
class PulseOp:
    """SU(2) rotation by `angle` about the Bloch-sphere `axis` (unit 3-vector)."""

    axis: tuple[float, float, float]
    angle: float

    def __post_init__(self) -> None:
        norm = math.sqrt(sum(a * a for a in self.axis))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"pulse axis norm {norm!r} is not 1 within {_NORM_TOL}")

    @property
    def matrix(self) -> np.ndarray:
        nx, ny, nz = self.axis
        n_dot_sigma = nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z
        half = 0.5 * self.angle
        return math.cos(half) * IDENTITY - 1.0j * math.sin(half) * n_dot_sigma

    def inverse(self) -> "PulseOp":
        return PulseOp(self.axis, -self.angle)


def apply_pulse(state: TwoLevelState, pulse: PulseOp) -> TwoLevelState:
    """Apply exp(-i angle (axis . sigma) / 2) to the state; norm is preserved."""
    out = pulse.matrix @ state.vector
    return TwoLevelState(complex(out[0]), complex(out[1]))


@dataclass(frozen=True)
class RamanParams:
    """Two-photon coupling parameters: Rabi rates, one-photon detuning, splitting."""

    rabi_1: complex  # rad/s
    rabi_2: complex  # rad/s
    detuning: float  # rad/s
    omega_internal: float  # rad/s

    @property
    def large_detuning_ok(self) -> bool:
        """True when |detuning| >= 10x the larger Rabi rate (adiabatic-elimination margin)."""
        return abs(self.detuning) >= 10.0 * max(abs(self.rabi_1), abs(self.rabi_2))


class EffectiveRabi(NamedTuple):
    omega: complex  # rad/s
    large_detuning_ok: bool


def effective_rabi(params: RamanParams) -> EffectiveRabi:
    """Effective two-level Rabi rate Omega_1 conj(Omega_2) / (2 Delta)."""
    if params.detuning == 0.0:
        raise ValueError("effective Rabi rate undefined at zero detuning")
    omega = params.rabi_1 * np.conj(params.rabi_2) / (2.0 * params.detuning)
    return EffectiveRabi(complex(omega), params.large_detuning_ok)


@dataclass(frozen=True)
class KinematicPhases:
    phi_g: float  # rad
    phi_e: float  # rad
    phi_field: float  # rad


def free_evolution_phases(
    v_g: float, k_eff: float, mass: float, t: float, phi_field: float = 0.0
) -> KinematicPhases:
    """Kinetic phases (1/2) m v^2 t / hbar accumulated by the two branches.

    The excited branch moves at v_e = v_g + hbar k_eff / (2 m); phi_field
    is carried through untouched.
    """
    if mass <= 0.0:
        raise ValueError("mass must be positive")
    if t < 0.0:
        raise ValueError("evolution time must be non-negative")
    v_e = v_g + HBAR * k_eff / (2.0 * mass)
    phi_g = 0.5 * mass * v_g**2 * t / HBAR
    phi_e = 0.5 * mass * v_e**2 * t / HBAR
    return KinematicPhases(phi_g=phi_g, phi_e=phi_e, phi_field=phi_field)


def relative_phase(phases: KinematicPhases) -> float:
    """phi = phi_e - phi_g + phi_field, wrapped to (-pi, pi]."""
    return wrap_angle(phases.phi_e - phases.phi_g + phases.phi_field)


def postselect_overlap(pre: TwoLevelState, post: TwoLevelState) -> complex:
    """Inner product <post|pre>; its squared modulus is the success probability."""
    return complex(np.vdot(post.vector, pre.vector))


@dataclass(frozen=True)
class WeakValue:
    """Conditioned value of an observable between pre- and post-selection."""

    re: float
    im: float

    @property
    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    @property
    def magnitude(self) -> float:
        return abs(self.as_complex)


def weak_value(pre: TwoLevelState, post: TwoLevelState, observable: np.ndarray) -> WeakValue:
    """<post|A|pre> / <post|pre> for a 2x2 Hermitian observable A.

    Raises SingularPostselectionError when |<post|pre>| <= EPS_OVERLAP;
    callers that sweep near-orthogonal pairs must handle that case.
    """
    obs = np.asarray(observable, dtype=complex)
    if obs.shape != (2, 2):
        raise ValueError("observable must be a 2x2 matrix")
    if not np.allclose(obs, obs.conj().T, atol=1e-12):
        raise ValueError("observable must be Hermitian")
    overlap = postselect_overlap(pre, post)
    if abs(overlap) <= EPS_OVERLAP:
        raise SingularPostselectionError(
            f"post-selection overlap {abs(overlap):.3e} below {EPS_OVERLAP:.0e}"
        )
    value = np.vdot(post.vector, obs @ pre.vector) / overlap
    return WeakValue(re=float(value.real), im=float(value.imag))


def weak_value_sigma_z_half(theta: float, phi: float) -> WeakValue:
    """Definition-based weak value of sigma_z/2 for the standard state pair."""
    return weak_value(initial_superposition(phi), postselection_state(theta), SIGMA_Z / 2.0)


@dataclass(frozen=True)
class ClosedFormWeakValue:
    """Published closed-form trig expression for the weak value, plus cross-check.

    The printed expression disagrees with the definition-based value (its
    "imaginary part" even carries an explicit factor i, dropped here to
    return a real number).  It is evaluated verbatim only so the mismatch
    can be quantified; `definition` is the authoritative value.
    """

    re: float
    im: float
    definition: WeakValue
    abs_mismatch: float
    rel_mismatch: float

    @property
    def matches_definition(self) -> bool:
        return self.rel_mismatch <= 1e-6


def weak_value_closed_form(theta: float, phi: float) -> ClosedFormWeakValue:
    """Evaluate the printed closed form at (theta, phi) and cross-check it.

    re = 1 + (2 cos(phi) cot(theta) + 2) / (cot^2 - 2 cos(phi) cot + 1)
    im = -2 sin(phi) cot(theta) / (cot^2 - 2 cos(phi) cot + 1)
    """
    if theta == 0.0 or theta == math.pi / 2:
        raise ValueError("cot(theta) undefined at theta in {0, pi/2}")
    cot = 1.0 / math.tan(theta)
    denom = cot**2 - 2.0 * math.cos(phi) * cot + 1.0
    if denom == 0.0:
        raise ValueError("closed-form denominator vanished")
    re = 1.0 + (2.0 * math.cos(phi) * cot + 2.0) / denom
    im = -2.0 * math.sin(phi) * cot / denom
    definition = weak_value_sigma_z_half(theta, phi)
    mismatch = abs(complex(re, im) - definition.as_complex)
    return ClosedFormWeakValue(
        re=re,
        im=im,
        definition=definition,
        abs_mismatch=mismatch,
        rel_mismatch=mismatch / max(definition.magnitude, 1e-300),
    )


@dataclass(frozen=True)
class WeakValueMismatchReport:
    """Side-by-side record of the definition-based and closed-form weak values."""

    theta: float
    phi: float
    definition_re: float
    definition_im: float
    closed_form_re: float
    closed_form_im: float
    abs_mismatch: float
    rel_mismatch: float
    agrees: bool
    summary: str


def weak_value_mismatch_report(theta: float, phi: float) -> WeakValueMismatchReport:
    """Quantify how far the printed closed form is from the definition.

    The report is always generated, never suppressed: when the two paths
    agree the summary says so explicitly.
    """
    cf = weak_value_closed_form(theta, phi)
    d = cf.definition
    if cf.matches_definition:
        summary = (
            f"closed form agrees with definition at theta={theta!r}, phi={phi!r} "
            f"(|diff| = {cf.abs_mismatch:.3e})"
        )
    else:
        summary = (
            f"closed form disagrees with definition at theta={theta!r}, phi={phi!r}: "
            f"definition ({d.re:.6g}, {d.im:.6g}) vs printed ({cf.re:.6g}, {cf.im:.6g}), "
            f"|diff| = {cf.abs_mismatch:.6g} ({cf.rel_mismatch:.3g} relative); "
            "the definition-based value is used everywhere downstream"
        )
    return WeakValueMismatchReport(
        theta=theta,
        phi=phi,
        definition_re=d.re,
        definition_im=d.im,
        closed_form_re=cf.re,
        closed_form_im=cf.im,
        abs_mismatch=cf.abs_mismatch,
        rel_mismatch=cf.rel_mismatch,
        agrees=cf.matches_definition,
        summary=summary,
    )


@dataclass(frozen=True)
class PostselectionSequence:
    """Pulse-level realization of the projection onto the post-selection state.

    Rotate by +2 theta about x (mapping psi_p onto |g>), project onto the
    ground state, then rotate back by -2 theta.  The sandwich equals the
    rank-1 projector |psi_p><psi_p| up to global phase; the intermediate
    ground-state projection is what a fluorescence measurement realizes.
    """

    theta: float
    pre_pulse: PulseOp
    restore_pulse: PulseOp

    def apply(self, state: TwoLevelState) -> tuple[TwoLevelState, complex]:
        """Run the sequence; returns (post-measurement state, success amplitude).

        A zero amplitude means the ground-state detection never fires for
        this input; the returned state is then the never-realized branch.
        """
        rotated = apply_pulse(state, self.pre_pulse)
        amplitude = rotated.amp_g
        collapsed = ground_state()
        return apply_pulse(collapsed, self.restore_pulse), complex(amplitude)

    def projected_vector(self, state: TwoLevelState) -> np.ndarray:
        """Unnormalized output amplitude * state, for comparison with a projector."""
        out, amp = self.apply(state)
        return amp * out.vector


def postselection_pulse_sequence(theta: float) -> PostselectionSequence:
    """Decompose projection onto psi_p(theta) into x-rotations plus R_g.

    U_x(-2 theta)|g> = cos(theta)|g> + i sin(theta)|e> = psi_p, so the
    +2 theta pre-rotation sends psi_p to |g> where the projection happens.
    At theta = 0 the rotations degenerate to the identity and the sequence
    is a bare ground-state projection.
    """
    axis = (1.0, 0.0, 0.0)
    return PostselectionSequence(
        theta=theta,
        pre_pulse=PulseOp(axis, 2.0 * theta),
        restore_pulse=PulseOp(axis, -2.0 * theta),
    )
