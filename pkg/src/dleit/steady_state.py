"""Steady-state propagation of the probe/signal pair through the
double-lambda medium, plus the single-lambda EIT spectrum.

Two routes are provided and cross-checked by the test suite:

* the closed-form solution valid in the ideal regime (gamma21 = 0,
  gamma31 = gamma41 = Gamma), where the transmitted fields are a fixed
  combination of a non-decaying mode and a mode attenuated by
  exp(-i*zeta/(2*xi)) with xi = i + 2|Omega_c|^2*delta/(|Omega|^2*gamma31);
* a general route that solves the steady optical Bloch equations as a 3x3
  complex linear system and propagates the fields with the exponential of
  the resulting 2x2 coupling matrix (constant coefficients in zeta).

Transmission never gets clamped: values above 1 are physical gain fed by
the other field through the two four-wave-mixing paths.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    ZERO_AMPLITUDE,
    Coherences,
    DleitError,
    FieldPair,
    ParameterError,
    SystemParams,
    check_perturbative,
    validate,
)


class SingularSystemError(DleitError, ArithmeticError):
    """The steady-state linear system is singular for this parameter set."""


@dataclass(frozen=True)
class PropagationConstants:
    """Derived constants of the closed-form propagation solution."""

    omega_sq: float  # |Omega_c|^2 + |Omega_d|^2
    xi: complex      # i + 2|Omega_c|^2 * delta / (omega_sq * gamma31)


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 complex map taking (Omega_p(0), Omega_s(0)) to (Omega_p(zeta), Omega_s(zeta))."""

    matrix: np.ndarray
    zeta: float

    def apply(self, fields: FieldPair) -> FieldPair:
        out = self.matrix @ np.array([fields.omega_p, fields.omega_s], dtype=complex)
        return FieldPair(complex(out[0]), complex(out[1]))

    @property
    def eigenvalue_magnitudes(self) -> tuple[float, float]:
        eig = np.linalg.eigvals(self.matrix)
        return (abs(eig[0]), abs(eig[1]))


def propagation_constants(params: SystemParams) -> PropagationConstants:
    """|Omega|^2 and xi for the closed-form solution.

    xi carries gamma31 explicitly; in the ideal regime gamma31 = 1 and xi
    reduces to i + 2|Omega_c|^2*delta/|Omega|^2 (and to i at delta = 0).
    """
    validate(params)
    omega_sq = params.pump_power
    xi = 1j + 2.0 * abs(params.omega_c) ** 2 * params.delta / (omega_sq * params.gamma31)
    return PropagationConstants(omega_sq=omega_sq, xi=xi)


def coherences(params: SystemParams, fields: FieldPair, check: bool = True) -> Coherences:
    """Closed-form steady-state coherences in the ideal regime.

    Valid only for gamma21 = 0, gamma31 = gamma41 = Gamma; use
    coherences_general otherwise.  Satisfies the zero-derivative optical
    Bloch equations to machine precision.
    """
    validate(params)
    if not params.is_closed_form_regime:
        raise ParameterError(
            "closed-form coherences need gamma21 = 0 and gamma31 = gamma41 = 1; "
            "use coherences_general"
        )
    wp, ws = complex(fields.omega_p), complex(fields.omega_s)
    wc, wd = complex(params.omega_c), complex(params.omega_d)
    two_delta = 2.0 * params.delta
    d = -(1j * abs(wd) ** 2 + (two_delta + 1j) * abs(wc) ** 2)
    if d == 0:
        raise SingularSystemError("denominator vanishes: both pump fields are zero")
    rho21 = (wp * wc.conjugate() * (two_delta + 1j) + ws * wd.conjugate() * 1j) / d
    rho31 = (wp * abs(wd) ** 2 - ws * wc * wd.conjugate()) / d
    rho41 = (ws * abs(wc) ** 2 - wp * wc.conjugate() * wd) / d
    out = Coherences(rho21, rho31, rho41)
    return check_perturbative(out) if check else out


def coherences_general(params: SystemParams, fields: FieldPair, check: bool = True) -> Coherences:
    """Steady-state coherences for arbitrary gamma21, gamma31, gamma41.

    Solves the 3x3 complex linear system obtained from the optical Bloch
    equations with all time derivatives set to zero.  Reduces to
    coherences() in the ideal regime.
    """
    validate(params)
    wp, ws = complex(fields.omega_p), complex(fields.omega_s)
    wc, wd = complex(params.omega_c), complex(params.omega_d)
    # unknowns x = [rho21, rho31, rho41]; rows are the steady rho21/rho31/rho41 equations
    a = np.array(
        [
            [-0.5 * params.gamma21, 0.5j * wc.conjugate(), 0.5j * wd.conjugate()],
            [0.5j * wc, -0.5 * params.gamma31, 0.0],
            [0.5j * wd, 0.0, 1j * params.delta - 0.5 * params.gamma41],
        ],
        dtype=complex,
    )
    b = np.array([0.0, -0.5j * wp, -0.5j * ws], dtype=complex)
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"singular steady-state system for {params!r}") from exc
    out = Coherences(complex(x[0]), complex(x[1]), complex(x[2]))
    return check_perturbative(out) if check else out


def coupling_matrix(params: SystemParams) -> np.ndarray:
    """2x2 matrix M of the steady field equations d(Omega_p, Omega_s)/dzeta = M @ (Omega_p, Omega_s).

    Built column by column from the general steady-state coherences at unit
    probe/signal inputs, so it is valid for any decay rates.
    """
    col_p = coherences_general(params, FieldPair(1.0, 0.0), check=False)
    col_s = coherences_general(params, FieldPair(0.0, 1.0), check=False)
    return np.array(
        [
            [0.5j * params.gamma31 * col_p.rho31, 0.5j * params.gamma31 * col_s.rho31],
            [0.5j * params.gamma41 * col_p.rho41, 0.5j * params.gamma41 * col_s.rho41],
        ],
        dtype=complex,
    )


def _sinhc(z: complex) -> complex:
    """sinh(z)/z with a series branch near zero."""
    if abs(z) < 1e-4:
        z2 = z * z
        return 1.0 + z2 / 6.0 + z2 * z2 / 120.0
    return cmath.sinh(z) / z


def _expm2(a: np.ndarray) -> np.ndarray:
    """Exponential of a 2x2 complex matrix.

    Uses the trace/deviator split: with mu = tr(a)/2 and n = a - mu*I
    (traceless, n^2 = s^2 * I), expm(a) = e^mu (cosh(s) I + sinh(s)/s n).
    This is the closed-form eigen-decomposition; the sinh(s)/s series takes
    over smoothly when the eigenvalues are (near-)degenerate.
    """
    mu = 0.5 * (a[0, 0] + a[1, 1])
    n = a - mu * np.eye(2)
    s = cmath.sqrt(n[0, 0] * n[0, 0] + n[0, 1] * n[1, 0])
    return cmath.exp(mu) * (cmath.cosh(s) * np.eye(2) + _sinhc(s) * n)


def _expm2_scaled(m: np.ndarray, zetas: np.ndarray) -> np.ndarray:
    """expm(zeta * m) for an array of zeta values; returns shape (n, 2, 2)."""
    zetas = np.asarray(zetas, dtype=float)
    mu = 0.5 * (m[0, 0] + m[1, 1])
    n = m - mu * np.eye(2)
    s = cmath.sqrt(n[0, 0] * n[0, 0] + n[0, 1] * n[1, 0])
    sz = s * zetas
    small = np.abs(sz) < 1e-4
    sinhc = np.empty_like(sz, dtype=complex)
    sinhc[small] = 1.0 + sz[small] ** 2 / 6.0 + sz[small] ** 4 / 120.0
    sinhc[~small] = np.sinh(sz[~small]) / sz[~small]
    factor = np.exp(mu * zetas)
    eye = np.eye(2, dtype=complex)
    out = np.cosh(sz)[:, None, None] * eye[None, :, :]
    out += (zetas * sinhc)[:, None, None] * n[None, :, :]
    out *= factor[:, None, None]
    return out


def transfer_matrix(params: SystemParams, zeta: float) -> TransferMatrix:
    """Transfer matrix of the medium after optical depth zeta >= 0.

    In the ideal regime this reproduces the closed-form transmitted fields
    exactly; for general decay rates it is the exponential of zeta times the
    coupling matrix.
    """
    validate(params)
    if not (math.isfinite(zeta) and zeta >= 0.0):
        raise ParameterError("zeta must be finite and nonnegative")
    m = coupling_matrix(params)
    return TransferMatrix(matrix=_expm2(zeta * m), zeta=zeta)


def balanced_decay_factor(alpha, delta):
    """The attenuated-mode factor exp(-i*alpha/(2*xi)) of the balanced regime.

    Equals exp(R - i*I) with R = -(alpha/2)/(delta^2+1) and
    I = (alpha/2)*delta/(delta^2+1).  Accepts scalars or numpy arrays.
    """
    denom = 2.0 * (delta * delta + 1.0)
    return np.exp((-alpha - 1j * alpha * delta) / denom)


def propagate_balanced(phi_r: float, alpha: float, delta: float):
    """Closed-form transmitted/incident field ratios of the balanced regime.

    Assumes |Omega_c| = |Omega_d|, |Omega_p(0)| = |Omega_s(0)|, gamma21 = 0
    and gamma31 = gamma41 = Gamma.  Returns (probe ratio, signal ratio);
    transmission is |ratio|^2 and the phase shift is arg(ratio).
    """
    decay = complex(balanced_decay_factor(alpha, delta))
    em = cmath.exp(-1j * phi_r)
    ep = cmath.exp(1j * phi_r)
    probe = 0.5 * (1.0 + em + (1.0 - em) * decay)
    signal = 0.5 * (1.0 + ep + (1.0 - ep) * decay)
    return probe, signal


def transmission_phase(ratio: complex) -> tuple[float, float]:
    """Transmission |ratio|^2 and four-quadrant phase of a field ratio.

    Below the zero-amplitude threshold the phase is undefined and reported
    as NaN, never silently 0.
    """
    ratio = complex(ratio)
    t = abs(ratio) ** 2
    if abs(ratio) < ZERO_AMPLITUDE:
        return t, math.nan
    return t, math.atan2(ratio.imag, ratio.real)


def eit_exit_ratio(params: SystemParams, delta_p: float) -> complex:
    """Complex exit/entrance probe ratio of the single-lambda EIT medium.

    The probe detuning delta_p enters the rho31 and rho21 steady equations
    as +i*delta_p terms (two-photon detuning, resonant coupling), extending
    the on-resonance model; the sign follows the +i*delta pattern of the
    signal-transition equation.  Requires omega_d = 0 (no second lambda).
    """
    validate(params)
    if abs(params.omega_d) != 0.0:
        raise ParameterError("EIT spectrum is a single-lambda operation: omega_d must be 0")
    g21, g31 = params.gamma21, params.gamma31
    oc2 = abs(params.omega_c) ** 2
    if g21 == 0.0 and delta_p == 0.0:
        return 1.0 + 0.0j  # dark state: exact transparency
    denom = (0.5 * g31 - 1j * delta_p) + (0.25 * oc2) / (0.5 * g21 - 1j * delta_p)
    rho31_per_probe = 0.5j / denom
    return cmath.exp(0.5j * g31 * params.alpha * rho31_per_probe)


def eit_spectrum(params: SystemParams, probe_detunings) -> np.ndarray:
    """Probe transmission versus probe detuning for the single-lambda medium.

    Returns an array of (delta_p, T) rows.
    """
    detunings = np.asarray(list(probe_detunings), dtype=float)
    out = np.empty((detunings.size, 2), dtype=float)
    for i, dp in enumerate(detunings):
        ratio = eit_exit_ratio(params, float(dp))
        out[i, 0] = dp
        out[i, 1] = abs(ratio) ** 2
    return out
