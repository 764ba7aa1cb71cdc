import cmath
import math

import numpy as np
import pytest

from dleit import (
    Coherences,
    FieldPair,
    ParameterError,
    SystemParams,
    WeakFieldWarning,
    coherences,
    coherences_general,
    eit_exit_ratio,
    eit_spectrum,
    propagate_balanced,
    propagation_constants,
    transfer_matrix,
    transmission_phase,
)

TWO_PI = 2.0 * math.pi


def obe_steady_residuals(params: SystemParams, fields: FieldPair, coh: Coherences):
    """Right-hand sides of the optical Bloch equations at zero time derivative.

    Written out independently of the solver as the oracle for both coherence
    routes.
    """
    wp, ws = complex(fields.omega_p), complex(fields.omega_s)
    wc, wd = complex(params.omega_c), complex(params.omega_d)
    r41 = 0.5j * ws + 0.5j * wd * coh.rho21 + (1j * params.delta - 0.5 * params.gamma41) * coh.rho41
    r31 = 0.5j * wp + 0.5j * wc * coh.rho21 - 0.5 * params.gamma31 * coh.rho31
    r21 = 0.5j * wc.conjugate() * coh.rho31 + 0.5j * wd.conjugate() * coh.rho41 \
        - 0.5 * params.gamma21 * coh.rho21
    return max(abs(r21), abs(r31), abs(r41))


def random_params(rng, ideal=False):
    phase_c, phase_d = rng.uniform(0, TWO_PI, 2)
    return SystemParams(
        alpha=rng.uniform(0.0, 120.0),
        delta=rng.uniform(-40.0, 40.0),
        omega_c=rng.uniform(0.3, 1.5) * np.exp(1j * phase_c),
        omega_d=rng.uniform(0.3, 1.5) * np.exp(1j * phase_d),
        gamma31=1.0 if ideal else rng.uniform(0.8, 1.6),
        gamma41=1.0 if ideal else rng.uniform(0.8, 1.6),
        gamma21=0.0 if ideal else rng.uniform(0.0, 0.05),
    )


class TestCoherences:
    def test_zero_fields_give_zero_coherences(self):
        p = SystemParams(alpha=10.0, delta=3.0, omega_c=1.0, omega_d=1.0)
        coh = coherences(p, FieldPair(0.0, 0.0))
        assert coh.rho21 == 0 and coh.rho31 == 0 and coh.rho41 == 0

    def test_transparency_mode(self):
        # matched inputs on resonance: the numerators of rho31/rho41 cancel
        p = SystemParams(alpha=10.0, delta=0.0, omega_c=0.8, omega_d=0.8)
        coh = coherences(p, FieldPair(0.01, 0.01))
        assert abs(coh.rho31) < 1e-15
        assert abs(coh.rho41) < 1e-15

    def test_residuals_randomized(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            p = random_params(rng, ideal=True)
            fields = FieldPair(
                complex(rng.normal(), rng.normal()) * 0.02,
                complex(rng.normal(), rng.normal()) * 0.02,
            )
            coh = coherences(p, fields, check=False)
            assert obe_steady_residuals(p, fields, coh) < 1e-12

    def test_rejects_general_regime(self):
        p = SystemParams(alpha=1.0, delta=0.0, omega_c=1.0, omega_d=1.0, gamma31=1.25)
        with pytest.raises(ParameterError, match="closed-form"):
            coherences(p, FieldPair(0.01, 0.01))

    def test_weak_field_warning(self):
        p = SystemParams(alpha=1.0, delta=0.0, omega_c=0.3, omega_d=0.3)
        with pytest.warns(WeakFieldWarning):
            coherences(p, FieldPair(1.0, -1.0))


class TestCoherencesGeneral:
    def test_matches_closed_form_in_ideal_regime(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            p = random_params(rng, ideal=True)
            fields = FieldPair(
                complex(rng.normal(), rng.normal()) * 0.02,
                complex(rng.normal(), rng.normal()) * 0.02,
            )
            a = coherences(p, fields)
            b = coherences_general(p, fields)
            assert abs(a.rho21 - b.rho21) < 1e-12
            assert abs(a.rho31 - b.rho31) < 1e-12
            assert abs(a.rho41 - b.rho41) < 1e-12

    def test_single_lambda_hand_solution(self):
        # resonant probe, no second lambda: rho31 = i*Omega_p*g21/(g21*g31 + |Omega_c|^2)
        p = SystemParams(alpha=52.0, delta=0.0, omega_c=0.7, omega_d=0.0,
                         gamma31=1.25, gamma41=1.25, gamma21=0.02)
        wp = 0.01
        coh = coherences_general(p, FieldPair(wp, 0.0))
        expected = 1j * wp * p.gamma21 / (p.gamma21 * p.gamma31 + abs(p.omega_c) ** 2)
        assert abs(coh.rho31 - expected) < 1e-15
        assert abs(coh.rho41) < 1e-18

    def test_residuals_general(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            p = random_params(rng)
            fields = FieldPair(
                complex(rng.normal(), rng.normal()) * 0.02,
                complex(rng.normal(), rng.normal()) * 0.02,
            )
            coh = coherences_general(p, fields, check=False)
            assert obe_steady_residuals(p, fields, coh) < 1e-12

    def test_main_fig2_parameters(self):
        p = SystemParams(alpha=52.0, delta=0.0, omega_c=0.7, omega_d=0.0,
                         gamma31=1.25, gamma41=1.25, gamma21=0.001)
        fields = FieldPair(0.016, 0.0)
        coh = coherences_general(p, fields)
        assert obe_steady_residuals(p, fields, coh) < 1e-12
        assert abs(coh.rho31) > 0
        assert 0 < coh.rho31.imag < 0.1 * abs(fields.omega_p)  # residual absorption only


class TestPropagationConstants:
    def test_xi_reduces_to_i_on_resonance(self):
        p = SystemParams(alpha=1.0, delta=0.0, omega_c=1.0, omega_d=1.0)
        c = propagation_constants(p)
        assert c.xi == 1j
        assert c.omega_sq == pytest.approx(2.0)

    def test_xi_imaginary_part_is_unity(self):
        p = SystemParams(alpha=1.0, delta=7.0, omega_c=0.9, omega_d=1.2)
        assert propagation_constants(p).xi.imag == 1.0


class TestTransferMatrix:
    def test_identity_at_zero_depth(self):
        p = SystemParams(alpha=10.0, delta=5.0, omega_c=1.0, omega_d=1.0)
        tm = transfer_matrix(p, 0.0)
        assert np.allclose(tm.matrix, np.eye(2), atol=1e-15)

    def test_matches_balanced_closed_form(self):
        from dleit import params_with_relative_phase

        rng = np.random.default_rng(13)
        for _ in range(40):
            alpha = rng.uniform(0.5, 120.0)
            delta = rng.uniform(-40.0, 40.0)
            phi_r = rng.uniform(0.0, TWO_PI)
            base = SystemParams(alpha=alpha, delta=delta, omega_c=1.0, omega_d=1.0)
            tm = transfer_matrix(params_with_relative_phase(base, phi_r), alpha)
            out = tm.apply(FieldPair(1.0, 1.0))
            ref_p, ref_s = propagate_balanced(phi_r, alpha, delta)
            assert abs(out.omega_p - ref_p) < 1e-12
            assert abs(out.omega_s - ref_s) < 1e-12

    def test_deep_medium_limit(self):
        # probe-only input, balanced pumps, resonance: the decaying mode dies
        # and each output carries a quarter of the input power; the converted
        # signal inherits the pump phase difference
        phase_c, phase_d = 0.4, -1.1
        p = SystemParams(alpha=2000.0, delta=0.0,
                         omega_c=cmath.exp(1j * phase_c), omega_d=cmath.exp(1j * phase_d))
        out = transfer_matrix(p, 2000.0).apply(FieldPair(1.0, 0.0))
        assert abs(out.omega_p) ** 2 == pytest.approx(0.25, abs=1e-9)
        assert abs(out.omega_s) ** 2 == pytest.approx(0.25, abs=1e-9)
        assert cmath.phase(out.omega_s) == pytest.approx(phase_d - phase_c, abs=1e-9)

    def test_semigroup_property(self):
        rng = np.random.default_rng(17)
        for _ in range(60):
            p = random_params(rng)
            z1, z2 = rng.uniform(0.0, 60.0, 2)
            whole = transfer_matrix(p, z1 + z2).matrix
            split = transfer_matrix(p, z2).matrix @ transfer_matrix(p, z1).matrix
            assert np.max(np.abs(whole - split)) < 1e-10

    def test_passive_eigenvalues(self):
        rng = np.random.default_rng(19)
        for _ in range(60):
            p = random_params(rng)
            zeta = rng.uniform(0.0, 100.0)
            mags = transfer_matrix(p, zeta).eigenvalue_magnitudes
            assert max(mags) <= 1.0 + 1e-12
        for _ in range(20):
            p = random_params(rng, ideal=True)  # gamma21 = 0: dark mode is lossless
            mags = transfer_matrix(p, rng.uniform(0.0, 100.0)).eigenvalue_magnitudes
            assert max(mags) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_negative_depth(self):
        p = SystemParams(alpha=10.0, delta=0.0, omega_c=1.0, omega_d=1.0)
        with pytest.raises(ParameterError):
            transfer_matrix(p, -1.0)


class TestPropagateBalanced:
    def test_zero_relative_phase_is_transparent(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            alpha = rng.uniform(0.0, 300.0)
            delta = rng.uniform(-60.0, 60.0)
            probe, signal = propagate_balanced(0.0, alpha, delta)
            assert abs(probe - 1.0) < 1e-12
            assert abs(signal - 1.0) < 1e-12

    def test_opaque_at_pi_on_resonance(self):
        probe, signal = propagate_balanced(math.pi, 100.0, 0.0)
        assert abs(probe) ** 2 == pytest.approx(math.exp(-100.0), rel=1e-6)
        assert abs(signal) ** 2 == pytest.approx(math.exp(-100.0), rel=1e-6)

    def test_probe_signal_mirror_identity(self):
        # the signal at 2*pi - phi_r retraces the probe at phi_r exactly
        rng = np.random.default_rng(29)
        for _ in range(100):
            alpha = rng.uniform(0.0, 150.0)
            delta = rng.uniform(-40.0, 40.0)
            phi = rng.uniform(0.0, TWO_PI)
            probe, _ = propagate_balanced(phi, alpha, delta)
            _, signal_mirror = propagate_balanced(TWO_PI - phi, alpha, delta)
            assert abs(probe - signal_mirror) < 1e-12

    def test_resonant_transmissions_identical_and_phases_opposite(self):
        for phi in np.linspace(0.0, TWO_PI, 41):
            probe, signal = propagate_balanced(float(phi), 100.0, 0.0)
            assert abs(probe) ** 2 == pytest.approx(abs(signal) ** 2, abs=1e-12)
            assert abs(probe - signal.conjugate()) < 1e-12  # opposite phase shifts

    def test_passivity(self):
        rng = np.random.default_rng(31)
        alpha = rng.uniform(0.0, 200.0, 10_000)
        delta = rng.uniform(-50.0, 50.0, 10_000)
        phi = rng.uniform(0.0, TWO_PI, 10_000)
        for a, d, f in zip(alpha, delta, phi):
            probe, signal = propagate_balanced(f, a, d)
            assert abs(probe) ** 2 + abs(signal) ** 2 <= 2.0 + 1e-12


class TestTransmissionPhase:
    def test_unit_ratio(self):
        assert transmission_phase(1.0) == (1.0, 0.0)

    def test_quarter_power_quarter_turn(self):
        t, phi = transmission_phase(0.5j)
        assert t == pytest.approx(0.25)
        assert phi == pytest.approx(math.pi / 2)

    def test_zero_ratio_has_undefined_phase(self):
        t, phi = transmission_phase(0.0)
        assert t == 0.0
        assert math.isnan(phi)


class TestEitSpectrum:
    def eit_params(self, gamma21=0.001):
        return SystemParams(alpha=52.0, delta=0.0, omega_c=0.7, omega_d=0.0,
                            gamma31=1.25, gamma41=1.25, gamma21=gamma21)

    def test_perfect_transparency_without_dephasing(self):
        p = self.eit_params(gamma21=0.0)
        assert abs(eit_exit_ratio(p, 0.0)) ** 2 == 1.0

    def test_line_center_matches_closed_form(self):
        p = self.eit_params()
        g = p.gamma21 * p.gamma31
        expected = math.exp(-p.alpha * g / (g + abs(p.omega_c) ** 2))
        assert abs(eit_exit_ratio(p, 0.0)) ** 2 == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.876, abs=1e-3)

    def test_far_detuned_transparent(self):
        p = self.eit_params()
        spectrum = eit_spectrum(p, [200.0, -200.0, 500.0])
        assert np.all(spectrum[:, 1] > 0.999)

    def test_rejects_double_lambda(self):
        p = SystemParams(alpha=52.0, delta=0.0, omega_c=0.7, omega_d=0.7)
        with pytest.raises(ParameterError, match="single-lambda"):
            eit_exit_ratio(p, 0.0)

    def test_spectrum_shape(self):
        p = self.eit_params()
        detunings = np.linspace(-3.0, 3.0, 201)
        spectrum = eit_spectrum(p, detunings)
        assert spectrum.shape == (201, 2)
        t = spectrum[:, 1]
        assert np.all(np.isfinite(t))
        # transparency window flanked by deep absorption doublet
        center = t[100]
        assert center > 0.8
        assert t.min() < 1e-6
