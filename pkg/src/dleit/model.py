"""Domain types, unit conventions, and phase arithmetic for the double-lambda
EIT medium.

Conventions used throughout the package:

* All rates are expressed in units of the excited-state coherence decay rate
  Gamma (Gamma == 1), time in units of 1/Gamma.
* Propagation through the medium is measured by the accumulated optical
  depth zeta in [0, alpha]; no length or speed of light appears anywhere.
* Optical phases live on the complex field amplitudes.  The closed-loop
  relative phase phi_r = phi_p - phi_c + phi_d - phi_s is always derived
  from the amplitudes, never stored separately.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace

TWO_PI = 2.0 * math.pi

# Magnitude below which the phase of a complex amplitude is reported as
# undefined (NaN) rather than 0.
ZERO_AMPLITUDE = 1e-12

# Default upper bound on |rho_ij| for the first-order (weak-field) model.
PERTURBATION_BOUND = 0.1


class DleitError(Exception):
    """Base class for all domain errors raised by this package."""


class ParameterError(DleitError, ValueError):
    """A parameter set violates one of the model invariants."""


class WeakFieldWarning(UserWarning):
    """Coherences exceeded the perturbative bound; the first-order model is
    still well defined but no longer physically trustworthy."""


@dataclass(frozen=True)
class SystemParams:
    """Atomic and pump-field constants of the double-lambda medium.

    alpha    -- dimensionless optical depth, shared by both transitions
    delta    -- signal-transition detuning in units of Gamma
    omega_c  -- complex coupling Rabi frequency (units of Gamma)
    omega_d  -- complex driving Rabi frequency (units of Gamma)
    gamma31, gamma41 -- excited-state coherence decay rates (units of Gamma)
    gamma21  -- ground-state dephasing rate (units of Gamma)
    """

    alpha: float
    delta: float
    omega_c: complex
    omega_d: complex
    gamma31: float = 1.0
    gamma41: float = 1.0
    gamma21: float = 0.0

    @property
    def pump_power(self) -> float:
        """Total pump power |Omega_c|^2 + |Omega_d|^2."""
        return abs(self.omega_c) ** 2 + abs(self.omega_d) ** 2

    @property
    def is_closed_form_regime(self) -> bool:
        """True in the ideal regime gamma21 = 0, gamma31 = gamma41 = Gamma,
        where the analytic steady-state solutions hold exactly."""
        return self.gamma21 == 0.0 and self.gamma31 == 1.0 and self.gamma41 == 1.0

    @property
    def balanced_pumps(self) -> bool:
        return math.isclose(abs(self.omega_c), abs(self.omega_d), rel_tol=1e-12)


@dataclass(frozen=True)
class FieldPair:
    """Complex probe and signal amplitudes at one propagation coordinate.

    At the medium entrance the pair defines Omega_p(0) and Omega_s(0).
    """

    omega_p: complex
    omega_s: complex


@dataclass(frozen=True)
class Coherences:
    """Slowly varying density-matrix amplitudes rho21, rho31, rho41."""

    rho21: complex
    rho31: complex
    rho41: complex

    @property
    def max_magnitude(self) -> float:
        return max(abs(self.rho21), abs(self.rho31), abs(self.rho41))


def validate(params: SystemParams, require_double_lambda: bool = False) -> SystemParams:
    """Check all SystemParams invariants; return the (unchanged) params.

    Raises ParameterError naming the first violated invariant.  Single-lambda
    operations permit |omega_d| = 0; pass require_double_lambda=True for
    operations that need both pumps.
    """
    for name in ("alpha", "delta", "gamma31", "gamma41", "gamma21"):
        if not math.isfinite(getattr(params, name)):
            raise ParameterError(f"{name} not finite")
    for name in ("omega_c", "omega_d"):
        if not cmath.isfinite(complex(getattr(params, name))):
            raise ParameterError(f"{name} not finite")
    if params.alpha < 0:
        raise ParameterError("alpha negative")
    if params.gamma31 <= 0:
        raise ParameterError("gamma31 nonpositive")
    if params.gamma41 <= 0:
        raise ParameterError("gamma41 nonpositive")
    if params.gamma21 < 0:
        raise ParameterError("gamma21 negative")
    if abs(params.omega_c) == 0.0:
        raise ParameterError("omega_c vanishes")
    if require_double_lambda and abs(params.omega_d) == 0.0:
        raise ParameterError("omega_d vanishes (double-lambda operation)")
    return params


def validate_fields(fields: FieldPair) -> FieldPair:
    """Check that both field amplitudes are finite."""
    if not cmath.isfinite(complex(fields.omega_p)):
        raise ParameterError("omega_p not finite")
    if not cmath.isfinite(complex(fields.omega_s)):
        raise ParameterError("omega_s not finite")
    return fields


def canonical_phase(theta: float) -> float:
    """Map an angle in radians onto the canonical range [0, 2*pi)."""
    if not math.isfinite(theta):
        raise ParameterError("phase not finite")
    wrapped = theta % TWO_PI
    # float rounding can land a tiny negative angle exactly on 2*pi
    return 0.0 if wrapped >= TWO_PI else wrapped


def relative_phase(fields: FieldPair, params: SystemParams) -> float:
    """Closed-loop relative phase phi_p - phi_c + phi_d - phi_s in [0, 2*pi).

    Derived from the complex amplitudes; amplitudes of magnitude zero carry
    no phase and contribute 0.
    """
    phi = (
        cmath.phase(complex(fields.omega_p))
        - cmath.phase(complex(params.omega_c))
        + cmath.phase(complex(params.omega_d))
        - cmath.phase(complex(fields.omega_s))
    )
    return canonical_phase(phi)


def params_with_relative_phase(params: SystemParams, phi_r: float) -> SystemParams:
    """Return params with pump phases set so unit probe/signal inputs (with
    phase 0) realise the given closed-loop phase.

    The phase is imposed on the coupling field (omega_c -> |omega_c|
    exp(-i*phi_r), omega_d -> |omega_d|), mirroring how an electro-optic
    modulator on the coupling beam scans phi_r.  Only phi_r is observable, so
    any other split would give identical physics.
    """
    return replace(
        params,
        omega_c=abs(params.omega_c) * cmath.exp(-1j * canonical_phase(phi_r)),
        omega_d=complex(abs(params.omega_d)),
    )


def check_perturbative(coherences: Coherences, bound: float = PERTURBATION_BOUND) -> Coherences:
    """Warn (never raise) when a coherence magnitude exceeds the weak-field
    bound; the first-order model stays mathematically well defined."""
    mag = coherences.max_magnitude
    if mag > bound:
        warnings.warn(
            f"coherence magnitude {mag:.3g} exceeds perturbative bound {bound:.3g}",
            WeakFieldWarning,
            stacklevel=3,
        )
    return coherences


def phase_separation(phi_a: float, phi_b: float) -> float:
    """Circular distance |phi_a - phi_b| wrapped to [0, pi].

    NaN (undefined phase) in either argument propagates.
    """
    if math.isnan(phi_a) or math.isnan(phi_b):
        return math.nan
    d = canonical_phase(phi_a - phi_b)
    return min(d, TWO_PI - d)
