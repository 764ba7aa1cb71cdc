import cmath
import math

import numpy as np
import pytest

from dleit import (
    GridError,
    ParameterError,
    PlateauWindowError,
    PulseSpec,
    SimGrid,
    SystemParams,
    ZeroExitEnergyError,
    eit_exit_ratio,
    group_delay,
    plateau_extract,
    propagate_balanced,
    simulate,
    transfer_matrix,
    validate_grid,
)
from dleit.model import params_with_relative_phase


def balanced_params(alpha=20.0, delta=5.0):
    return SystemParams(alpha=alpha, delta=delta, omega_c=1.0, omega_d=1.0)


def square_pair(phi_r, t_on=10.0, t_off=1e9, amplitude=1.0):
    probe = PulseSpec(amplitude=amplitude, t_on=t_on, t_off=t_off)
    signal = PulseSpec(amplitude=amplitude * cmath.exp(-1j * phi_r), t_on=t_on, t_off=t_off)
    return probe, signal


class TestPulseSpec:
    def test_square_support_is_compact(self):
        p = PulseSpec(amplitude=2.0, t_on=10.0, t_off=50.0, edge_time=5.0)
        t = np.array([0.0, 9.999, 10.0, 30.0, 50.0, 50.001, 80.0])
        env = p.envelope(t)
        assert np.all(env[:3] == 0.0)
        assert env[3] == pytest.approx(2.0)
        assert np.all(env[5:] == 0.0)

    def test_square_edges_monotone(self):
        p = PulseSpec(amplitude=1.0, t_on=0.0, t_off=100.0, edge_time=5.0)
        rise = p.envelope(np.linspace(0.0, 5.0, 50)).real
        assert np.all(np.diff(rise) >= 0)
        assert rise[-1] == pytest.approx(1.0)

    def test_gaussian_peak_at_center(self):
        p = PulseSpec(amplitude=1.0, t_on=0.0, t_off=600.0, shape="gaussian")
        t = np.linspace(0.0, 600.0, 601)
        env = np.abs(p.envelope(t))
        assert t[np.argmax(env)] == pytest.approx(300.0, abs=1.0)

    def test_invalid_specs(self):
        with pytest.raises(ParameterError):
            PulseSpec(amplitude=1.0, t_on=5.0, t_off=5.0)
        with pytest.raises(ParameterError):
            PulseSpec(amplitude=1.0, t_on=0.0, t_off=1.0, shape="triangle")
        with pytest.raises(ParameterError):
            PulseSpec(amplitude=1.0, t_on=0.0, t_off=1.0, edge_time=0.0)


class TestGrid:
    def test_stability_bound_enforced(self):
        p = SystemParams(alpha=10.0, delta=34.2, omega_c=1.0, omega_d=1.0)
        with pytest.raises(GridError, match="stability"):
            validate_grid(p, SimGrid(t_end=10.0, dt=0.02))
        validate_grid(p, SimGrid(t_end=10.0, dt=0.01))

    def test_basic_invariants(self):
        p = balanced_params()
        with pytest.raises(GridError):
            validate_grid(p, SimGrid(t_end=10.0, dt=0.01, n_z=1))
        with pytest.raises(GridError):
            validate_grid(p, SimGrid(t_end=-1.0, dt=0.01))


class TestSimulate:
    def test_zero_inputs_zero_record(self):
        p = balanced_params()
        zero = PulseSpec(amplitude=0.0, t_on=1.0, t_off=50.0)
        rec = simulate(p, zero, zero, SimGrid(t_end=60.0, dt=0.05, n_z=40))
        assert np.all(rec.probe == 0.0)
        assert np.all(rec.signal == 0.0)

    def test_entrance_boundary_exact(self):
        p = balanced_params()
        probe_in, signal_in = square_pair(1.3, t_on=10.0, t_off=80.0)
        rec = simulate(p, probe_in, signal_in, SimGrid(t_end=100.0, dt=0.05, n_z=40))
        assert np.array_equal(rec.probe[:, 0], probe_in.envelope(rec.times))
        assert np.array_equal(rec.signal[:, 0], signal_in.envelope(rec.times))

    def test_causality(self):
        p = balanced_params()
        probe_in, signal_in = square_pair(2.0, t_on=50.0, t_off=200.0)
        rec = simulate(p, probe_in, signal_in, SimGrid(t_end=100.0, dt=0.05, n_z=60))
        before = rec.times < 50.0
        assert np.all(rec.probe[before] == 0.0)
        assert np.all(rec.signal[before] == 0.0)

    def test_plateau_matches_balanced_steady_state(self):
        p = balanced_params(alpha=20.0, delta=5.0)
        for phi_r in (0.8, 2.0, 4.5):
            probe_in, signal_in = square_pair(phi_r)
            rec = simulate(p, probe_in, signal_in,
                           SimGrid(t_end=160.0, dt=0.02, n_z=100), record_stride=10)
            pl = plateau_extract(rec)
            ref_p, ref_s = propagate_balanced(phi_r, p.alpha, p.delta)
            assert abs(pl.probe_ratio - ref_p) <= 0.01 * max(abs(ref_p), 1.0)
            assert abs(pl.signal_ratio - ref_s) <= 0.01 * max(abs(ref_s), 1.0)

    def test_plateau_matches_general_transfer_matrix(self):
        p = SystemParams(alpha=20.0, delta=5.0, omega_c=0.7, omega_d=0.7,
                         gamma31=1.25, gamma41=1.25, gamma21=0.001)
        phi_r = 4.4
        probe_in, signal_in = square_pair(phi_r)
        rec = simulate(p, probe_in, signal_in,
                       SimGrid(t_end=200.0, dt=0.02, n_z=100), record_stride=10)
        pl = plateau_extract(rec)
        tm = transfer_matrix(params_with_relative_phase(p, phi_r), p.alpha)
        from dleit import FieldPair

        ref = tm.apply(FieldPair(1.0, 1.0))
        assert abs(pl.probe_ratio - ref.omega_p) <= 0.01 * max(abs(ref.omega_p), 1.0)
        assert abs(pl.signal_ratio - ref.omega_s) <= 0.01 * max(abs(ref.omega_s), 1.0)

    def test_grid_convergence(self):
        p = balanced_params(alpha=20.0, delta=5.0)
        probe_in, signal_in = square_pair(2.0)

        def plateau(dt, n_z):
            rec = simulate(p, probe_in, signal_in,
                           SimGrid(t_end=160.0, dt=dt, n_z=n_z), record_stride=5)
            return plateau_extract(rec)

        coarse = plateau(0.02, 100)
        fine = plateau(0.01, 200)
        assert abs(coarse.probe_ratio - fine.probe_ratio) < 1e-3 * abs(fine.probe_ratio)
        assert abs(coarse.signal_ratio - fine.signal_ratio) < 1e-3 * abs(fine.signal_ratio)

    def test_passivity_in_time(self):
        p = balanced_params(alpha=30.0, delta=8.0)
        probe_in, signal_in = square_pair(2.5, t_on=10.0, t_off=120.0)
        rec = simulate(p, probe_in, signal_in, SimGrid(t_end=220.0, dt=0.02, n_z=80))
        fin = np.trapezoid(np.abs(rec.probe[:, 0]) ** 2 + np.abs(rec.signal[:, 0]) ** 2,
                           rec.times)
        fout = np.trapezoid(np.abs(rec.probe[:, -1]) ** 2 + np.abs(rec.signal[:, -1]) ** 2,
                            rec.times)
        assert fout <= fin * (1.0 + 1e-9)

    def test_record_stride_and_coherence_nodes(self):
        p = balanced_params(alpha=5.0, delta=1.0)
        probe_in, signal_in = square_pair(1.0, t_off=40.0)
        rec = simulate(p, probe_in, signal_in, SimGrid(t_end=50.0, dt=0.05, n_z=30),
                       record_stride=10, coherence_nodes=(0, 29))
        assert rec.probe.shape[0] == rec.times.size
        assert set(rec.coherences) == {0, 29}
        assert rec.coherences[29].shape == (rec.times.size, 3)
        assert np.all(np.isfinite(rec.coherences[29].real))

    def test_zero_depth_passthrough(self):
        p = SystemParams(alpha=0.0, delta=5.0, omega_c=1.0, omega_d=1.0)
        probe_in, signal_in = square_pair(2.0, t_off=60.0)
        rec = simulate(p, probe_in, signal_in, SimGrid(t_end=80.0, dt=0.05, n_z=20))
        assert np.allclose(rec.probe[:, -1], rec.probe[:, 0])
        dp, ds = group_delay(rec)
        assert dp == pytest.approx(0.0, abs=1e-9)
        assert ds == pytest.approx(0.0, abs=1e-9)


class TestPlateauExtract:
    def test_record_of_zeros(self):
        p = balanced_params()
        zero = PulseSpec(amplitude=0.0, t_on=1.0, t_off=50.0)
        rec = simulate(p, zero, zero, SimGrid(t_end=60.0, dt=0.05, n_z=30))
        pl = plateau_extract(rec)
        assert pl.probe_ratio == 0.0 and pl.signal_ratio == 0.0

    def test_window_on_pulse_edge_rejected(self):
        # record ends right after turn-on: the trailing window rides the edge
        p = balanced_params(alpha=20.0, delta=5.0)
        probe_in, signal_in = square_pair(2.0, t_on=10.0, t_off=60.0)
        rec = simulate(p, probe_in, signal_in, SimGrid(t_end=60.0, dt=0.02, n_z=60))
        with pytest.raises(PlateauWindowError):
            plateau_extract(rec, window_fraction=0.9)

    def test_record_ending_before_pulse(self):
        p = balanced_params()
        probe_in, signal_in = square_pair(1.0, t_on=100.0, t_off=200.0)
        rec = simulate(p, probe_in, signal_in, SimGrid(t_end=50.0, dt=0.05, n_z=30))
        with pytest.raises(PlateauWindowError):
            plateau_extract(rec)


class TestGroupDelay:
    def test_eit_delay_matches_spectrum_phase_derivative(self):
        p = SystemParams(alpha=52.0, delta=0.0, omega_c=0.7, omega_d=0.0,
                         gamma31=1.25, gamma41=1.25)
        probe_in = PulseSpec(amplitude=1.0, t_on=50.0, t_off=650.0, shape="gaussian")
        signal_in = PulseSpec(amplitude=0.0, t_on=50.0, t_off=650.0)
        rec = simulate(p, probe_in, signal_in,
                       SimGrid(t_end=950.0, dt=0.1, n_z=150), record_stride=5)
        delay, signal_delay = group_delay(rec)
        h = 1e-4
        oracle = (cmath.phase(eit_exit_ratio(p, h)) -
                  cmath.phase(eit_exit_ratio(p, -h))) / (2.0 * h)
        assert delay == pytest.approx(oracle, rel=0.05)
        assert math.isnan(signal_delay)  # no signal pulse was launched

    def test_group_velocity_mismatch_at_finite_detuning(self):
        p = SystemParams(alpha=100.0, delta=34.2, omega_c=1.0, omega_d=1.0)
        probe_in, signal_in = square_pair(1.53, t_on=20.0, t_off=320.0)
        rec = simulate(p, probe_in, signal_in,
                       SimGrid(t_end=420.0, dt=0.01, n_z=120), record_stride=20)
        dp, ds = group_delay(rec)
        assert abs(dp - ds) > 0.5

    def test_fully_absorbed_pulse_raises(self):
        # dephasing kills the dark state: a narrowband gaussian pulse cannot
        # leak spectral wings past the absorber, so the exit is empty
        p = SystemParams(alpha=400.0, delta=0.0, omega_c=0.05, omega_d=0.0,
                         gamma31=1.0, gamma41=1.0, gamma21=0.5)
        probe_in = PulseSpec(amplitude=1.0, t_on=5.0, t_off=100.0, shape="gaussian")
        signal_in = PulseSpec(amplitude=0.0, t_on=5.0, t_off=100.0)
        rec = simulate(p, probe_in, signal_in, SimGrid(t_end=150.0, dt=0.1, n_z=80))
        with pytest.raises(ZeroExitEnergyError):
            group_delay(rec)
