"""Phase-diagram traces, phase-jump constants, the pi / pi-half phase-shift
conditions, and the cross-phase-modulation metric.

A trace follows the complex transmitted/incident field ratio as the
accumulated optical depth grows from 0; in the phase diagram the distance
from the origin squared is the transmission and the polar angle the phase
shift.  A phase jump happens exactly when a trace passes through the
origin, which pins both a critical depth alpha_c and a jump relative phase
(phi_pj for the probe, phi_sj for the signal).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .model import (
    TWO_PI,
    ZERO_AMPLITUDE,
    DleitError,
    FieldPair,
    ParameterError,
    SystemParams,
    canonical_phase,
    params_with_relative_phase,
    phase_separation,
    validate,
)
from .steady_state import (
    balanced_decay_factor,
    propagate_balanced,
    transfer_matrix,
    transmission_phase,
)

# A trace sample closer to the origin than this resets phase unwrapping.
ORIGIN_TOLERANCE = 1e-9


class TargetInfeasibleError(DleitError, ValueError):
    """The requested phase-shift condition has no solution at these parameters."""


@dataclass(frozen=True)
class PhaseTrace:
    """Sampled complex trajectory of both field ratios versus optical depth."""

    zeta: np.ndarray
    probe: np.ndarray
    signal: np.ndarray
    phi_r: float
    delta: float

    def probe_phase_unwrapped(self) -> np.ndarray:
        return unwrap_phase(self.probe)

    def signal_phase_unwrapped(self) -> np.ndarray:
        return unwrap_phase(self.signal)


@dataclass(frozen=True)
class JumpParameters:
    """Critical constants of the phase jump for one odd branch index n."""

    r_exponent: float  # R evaluated at alpha_c
    i_exponent: float  # I evaluated at alpha_c (equals n*pi/2 by construction)
    n: int
    alpha_c: float
    phi_pj: float
    phi_sj: float


def decay_exponents(alpha: float, delta: float) -> tuple[float, float]:
    """Exponents (R, I) of the attenuated mode exp(R - i*I) in the balanced regime.

    R = -(alpha/2) / (delta^2 + 1),  I = (alpha/2) * delta / (delta^2 + 1).
    """
    denom = delta * delta + 1.0
    return -0.5 * alpha / denom, 0.5 * alpha * delta / denom


def _check_jump_args(delta: float, n: int) -> None:
    if delta == 0.0:
        raise ParameterError("delta = 0: no finite critical depth exists")
    if not math.isfinite(delta):
        raise ParameterError("delta not finite")
    if n <= 0 or n % 2 == 0:
        raise ParameterError("branch index n must be an odd positive integer")


def critical_depth(delta: float, n: int = 1) -> float:
    """Optical depth at which the field is extinguished inside the medium.

    alpha_c = n*pi*(delta^2 + 1)/|delta| for odd n; diverges as delta -> 0.
    """
    _check_jump_args(delta, n)
    return n * math.pi * (delta * delta + 1.0) / abs(delta)


def jump_phases(delta: float, n: int = 1) -> tuple[float, float]:
    """Relative phases (phi_pj, phi_sj) of the probe/signal phase jumps.

    phi_pj = 2*atan(-sin(n*pi/2) * exp(n*pi/(2*delta))) mapped to [0, 2*pi),
    and phi_sj is its mirror (phi_pj + phi_sj = 2*pi).  For delta < 0 the
    probe and signal roles swap, which the sign folding below absorbs.
    """
    _check_jump_args(delta, n)
    sign = math.copysign(1.0, delta)
    magnitude = math.exp(n * math.pi / (2.0 * abs(delta)))
    branch = math.sin(0.5 * n * math.pi)  # +1 or -1 for odd n
    phi_pj = canonical_phase(2.0 * math.atan(-sign * branch * magnitude))
    phi_sj = canonical_phase(2.0 * math.atan(sign * branch * magnitude))
    return phi_pj, phi_sj


def jump_parameters(delta: float, n: int = 1) -> JumpParameters:
    """Bundle alpha_c, the jump phases, and the exponents at the jump."""
    alpha_c = critical_depth(delta, n)
    r_exp, i_exp = decay_exponents(alpha_c, delta)
    phi_pj, phi_sj = jump_phases(delta, n)
    return JumpParameters(
        r_exponent=r_exp,
        i_exponent=i_exp,
        n=n,
        alpha_c=alpha_c,
        phi_pj=phi_pj,
        phi_sj=phi_sj,
    )


def phase_trace(phi_r: float, delta: float, alpha_max: float, n_samples: int) -> PhaseTrace:
    """Balanced-regime phase-diagram trace sampled at uniform optical depths.

    The first sample sits at zeta = 0 where both ratios are exactly 1.
    """
    if not (alpha_max > 0 and math.isfinite(alpha_max)):
        raise ParameterError("alpha_max must be positive and finite")
    if n_samples < 2:
        raise ParameterError("n_samples must be at least 2")
    zeta = np.linspace(0.0, alpha_max, n_samples)
    decay = balanced_decay_factor(zeta, delta)
    em = cmath.exp(-1j * phi_r)
    ep = cmath.exp(1j * phi_r)
    probe = 0.5 * ((1.0 + em) + (1.0 - em) * decay)
    signal = 0.5 * ((1.0 + ep) + (1.0 - ep) * decay)
    return PhaseTrace(zeta=zeta, probe=probe, signal=signal, phi_r=phi_r, delta=delta)


def unwrap_phase(values: np.ndarray, origin_tol: float = ORIGIN_TOLERANCE) -> np.ndarray:
    """Unwrap the phase of a sampled complex trajectory.

    Nearest-branch continuation from sample to sample; samples within
    origin_tol of the origin have undefined phase (NaN) and reset the
    unwrapping, since no continuous continuation exists through the origin.
    """
    values = np.asarray(values, dtype=complex)
    out = np.full(values.shape, math.nan)
    defined = np.abs(values) >= origin_tol
    raw = np.angle(values)
    idx = np.flatnonzero(defined)
    if idx.size == 0:
        return out
    # split into runs of consecutive defined samples and unwrap each run
    breaks = np.flatnonzero(np.diff(idx) > 1)
    for run in np.split(idx, breaks + 1):
        out[run] = np.unwrap(raw[run])
    return out


def pi_phase_relative(alpha: float, delta: float) -> float:
    """Relative phase that puts the transmitted probe on the negative x-axis.

    phi_r = 2*atan[(cos(I) - exp(-R)) / sin(I)] in [0, 2*pi).  Raises
    TargetInfeasibleError on the singular set sin(I) = 0 and when the root
    lands on the positive x-axis instead (outside the feasible zones); a
    terminal point exactly at the origin is the degenerate alpha = alpha_c
    boundary and is accepted.
    """
    r_exp, i_exp = decay_exponents(alpha, delta)
    sin_i = math.sin(i_exp)
    if sin_i == 0.0:
        raise TargetInfeasibleError(
            f"sin(I) = 0 at alpha={alpha}, delta={delta}; perturb delta to leave the singular set"
        )
    t = (math.cos(i_exp) - math.exp(-r_exp)) / sin_i
    phi_r = canonical_phase(2.0 * math.atan(t))
    probe, _ = propagate_balanced(phi_r, alpha, delta)
    if abs(probe) < ZERO_AMPLITUDE:
        return phi_r  # origin-touching boundary of the feasible zone
    if abs(probe.imag) > 1e-9 * max(1.0, abs(probe)):
        raise TargetInfeasibleError(
            f"pi-phase condition failed to close at alpha={alpha}, delta={delta}"
        )
    if probe.real >= 0.0:
        raise TargetInfeasibleError(
            f"terminal point on the positive x-axis at alpha={alpha}, delta={delta}: "
            "no pi phase shift here"
        )
    return phi_r


def half_pi_phase_candidates(alpha: float, delta: float) -> tuple[float, ...]:
    """Relative phases that put the transmitted probe on the negative y-axis.

    Solves Re(probe ratio) = 0 for tan(phi_r/2) (a quadratic with
    coefficients e^R*cos(I), e^R*sin(I), 1) and keeps the roots with
    Im(probe ratio) < 0.  Returns an empty tuple when the condition is
    infeasible at these parameters.
    """
    r_exp, i_exp = decay_exponents(alpha, delta)
    er = math.exp(r_exp)
    a = er * math.cos(i_exp)
    b = er * math.sin(i_exp)
    roots: list[float] = []
    if abs(a) < 1e-300:
        if b != 0.0:
            roots.append(-1.0 / b)
    else:
        disc = b * b - 4.0 * a
        if disc >= 0.0:
            sq = math.sqrt(disc)
            q = -0.5 * (b + math.copysign(sq, b)) if b != 0.0 else -0.5 * sq
            if q != 0.0:
                roots.extend((q / a, 1.0 / q))
            else:  # b = 0 and disc = -4a = 0 cannot happen with a != 0
                roots.append(0.0)
    out = []
    for t in roots:
        phi_r = canonical_phase(2.0 * math.atan(t))
        probe, _ = propagate_balanced(phi_r, alpha, delta)
        if abs(probe) >= ZERO_AMPLITUDE and probe.imag < 0.0:
            out.append(phi_r)
    return tuple(sorted(out))


@dataclass(frozen=True)
class XpmMetric:
    """Probe phase with/without the signal input and their separation."""

    phi_with: float
    phi_without: float
    delta_phi: float         # |phi_with - phi_without| wrapped to [0, pi]
    t_with: float
    t_without: float


def xpm_metric(params: SystemParams, alpha: float, phi_r: float) -> XpmMetric:
    """Cross-phase modulation of the probe by the signal field.

    Both branches share the pumps, detuning and optical depth; the
    "without" branch only zeroes the signal input.  Works in the balanced
    and the general regime (the propagation always goes through the
    matrix-exponential path, which reduces to the closed form in the ideal
    regime).  An extinguished probe has undefined phase, which propagates
    as NaN into delta_phi.
    """
    p = replace(
        params_with_relative_phase(validate(params, require_double_lambda=True), phi_r),
        alpha=float(alpha),
    )
    tm = transfer_matrix(p, p.alpha)
    with_signal = tm.apply(FieldPair(1.0, 1.0))
    without_signal = tm.apply(FieldPair(1.0, 0.0))
    t_with, phi_with = transmission_phase(with_signal.omega_p)
    t_without, phi_without = transmission_phase(without_signal.omega_p)
    return XpmMetric(
        phi_with=phi_with,
        phi_without=phi_without,
        delta_phi=phase_separation(phi_with, phi_without),
        t_with=t_with,
        t_without=t_without,
    )
