import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dwkinematics import (
    CurrentWaveform,
    DwState,
    ModelConstants,
    Trajectory,
    TrackGeometry,
    WaveformError,
    drift_distance,
    max_velocity,
    simulate,
    simulate_batch,
    terminal_velocity,
)
from helpers import (
    analytic_pulse_state,
    long_track,
    random_constants,
    reference_constants,
    short_track,
)


class TestCurrentWaveform:
    def test_validation(self):
        with pytest.raises(WaveformError):
            CurrentWaveform(((1.0, 1e9),), 10.0)  # must start at 0
        with pytest.raises(WaveformError):
            CurrentWaveform(((0.0, 1e9), (0.0, 0.0)), 10.0)  # non-increasing
        with pytest.raises(WaveformError):
            CurrentWaveform(((0.0, 1e9),), -1.0)
        with pytest.raises(WaveformError):
            CurrentWaveform(((0.0, 1e9), (20.0, 0.0)), 10.0)  # duration < last bp

    def test_pulse_and_lookup(self):
        wf = CurrentWaveform.pulse(3e9, 20.0, settle=30.0)
        assert wf.duration == 50.0
        assert wf.value_at(0.0) == 3e9
        assert wf.value_at(19.999) == 3e9
        assert wf.value_at(20.0) == 0.0  # left-closed segments
        assert wf.value_at(50.0) == 0.0
        with pytest.raises(WaveformError):
            wf.value_at(51.0)

    def test_segments_cover_duration(self):
        wf = CurrentWaveform.from_segments([(1e9, 5.0), (-2e9, 7.5), (0.0, 2.5)])
        segs = list(wf.segments())
        assert segs[0] == (0.0, 5.0, 1e9)
        assert segs[-1][1] == wf.duration
        total = sum(t1 - t0 for t0, t1, _ in segs)
        assert total == pytest.approx(wf.duration)

    def test_csv_round_trip(self):
        wf = CurrentWaveform.from_segments([(4e9, 12.5), (0.0, 20.0), (-1e10, 3.0)])
        buf = io.StringIO()
        wf.to_csv(buf)
        buf.seek(0)
        back = CurrentWaveform.from_csv(buf)
        assert back == wf

    def test_csv_duration_flag_overrides(self):
        text = "t_start_ns,J_Apm2\n0.0,4e9\n"
        wf = CurrentWaveform.from_csv(io.StringIO(text), duration=25.0)
        assert wf.duration == 25.0
        with pytest.raises(WaveformError):
            CurrentWaveform.from_csv(io.StringIO(text))  # no footer, no flag

    def test_csv_bad_cell(self):
        text = "0.0,abc\n"
        with pytest.raises(WaveformError, match=":1"):
            CurrentWaveform.from_csv(io.StringIO(text), duration=10.0)


class TestSimulateBasics:
    mc = reference_constants()
    geom = long_track()

    def test_zero_waveform_keeps_position(self):
        wf = CurrentWaveform(((0.0, 0.0),), 100.0)
        traj = simulate(wf, self.mc, self.geom, sample_dt=0.5)
        assert np.all(traj.positions == traj.positions[0])
        assert np.all(traj.velocities == 0.0)

    def test_pulse_shape(self):
        """Velocity peaks inside the pulse, decays after, position plateaus."""
        wf = CurrentWaveform.pulse(2e10, 60.0, settle=120.0)
        traj = simulate(wf, self.mc, self.geom, sample_dt=0.01)
        i_off = int(np.searchsorted(traj.times, 60.0))
        peak = np.argmax(np.abs(traj.velocities))
        assert peak <= i_off + 1
        assert abs(traj.velocities[-1]) < 1e-2 * np.abs(traj.velocities).max()
        late = traj.positions[-200:]
        assert np.ptp(late) < 1e-3 * (traj.positions[-1] - traj.positions[0])

    def test_final_sample_at_waveform_end(self):
        wf = CurrentWaveform.pulse(1e10, 10.0, settle=5.5)
        traj = simulate(wf, self.mc, self.geom, sample_dt=0.4)
        assert traj.times[-1] == wf.duration

    def test_matches_analytic_two_phase_oracle(self):
        j, t_on, t_off = 3e10, 80.0, 150.0
        wf = CurrentWaveform.pulse(j, t_on, settle=t_off)
        traj = simulate(wf, self.mc, self.geom, sample_dt=0.01)
        x_nm, v = analytic_pulse_state(self.mc, j, t_on, t_off)
        assert traj.positions[-1] - traj.positions[0] == pytest.approx(x_nm * 1e-9, rel=1e-9)
        assert traj.velocities[-1] == pytest.approx(v, rel=1e-9)

    def test_two_opposite_pulses_return_near_start_without_current_damping(self):
        mc = ModelConstants(*[5.0, 2e-9, 1.5e-20, 1e-31], d1=0.08, d2=0.0)
        j, tau = 2e10, 150.0
        wf = CurrentWaveform.from_segments([(j, tau), (-j, tau), (0.0, 200.0)])
        traj = simulate(wf, mc, self.geom, sample_dt=0.05)
        assert abs(traj.positions[-1] - traj.positions[0]) < 1e-9

    def test_rejects_bad_args(self):
        wf = CurrentWaveform.pulse(1e10, 10.0)
        with pytest.raises(ValueError):
            simulate(wf, self.mc, self.geom, sample_dt=0.0)
        with pytest.raises(ValueError):
            simulate(wf, self.mc, self.geom, integrator="rk4")
        with pytest.raises(ValueError):
            simulate(wf, self.mc, self.geom, initial=DwState(-1e-9, 0.0))

    def test_batch_preserves_order(self):
        wfs = [CurrentWaveform.pulse(j, 20.0, settle=10.0) for j in (1e10, 2e10, 3e10)]
        batch = simulate_batch(wfs, self.mc, self.geom, sample_dt=0.1, jobs=2)
        solo = [simulate(w, self.mc, self.geom, sample_dt=0.1) for w in wfs]
        for a, b in zip(batch, solo):
            assert np.array_equal(a.offsets, b.offsets)


class TestSamplingInvariance:
    mc = reference_constants()
    geom = long_track()

    def test_final_state_invariant_to_sample_rate(self):
        wf = CurrentWaveform.from_segments([(2e10, 30.0), (-5e9, 50.0), (0.0, 40.0)])
        trajs = [
            simulate(wf, self.mc, self.geom, sample_dt=dt) for dt in (0.01, 0.1, 0.5, 3.0)
        ]
        x0 = trajs[0].positions[-1] - trajs[0].positions[0]
        v0 = trajs[0].velocities[-1]
        for t in trajs[1:]:
            assert t.positions[-1] - t.positions[0] == pytest.approx(x0, rel=1e-12)
            assert t.velocities[-1] == pytest.approx(v0, rel=1e-12)

    def test_superposition_fails(self):
        """The model is nonlinear in J: response(2J) != 2*response(J)."""
        wf1 = CurrentWaveform.pulse(1e10, 50.0, settle=100.0)
        wf2 = wf1.scaled(2.0)
        d1 = simulate(wf1, self.mc, self.geom, sample_dt=0.1)
        d2 = simulate(wf2, self.mc, self.geom, sample_dt=0.1)
        disp1 = d1.positions[-1] - d1.positions[0]
        disp2 = d2.positions[-1] - d2.positions[0]
        assert abs(disp2 - 2 * disp1) > 1e-3 * abs(disp2)

    def test_position_continuity(self):
        mc = reference_constants(c_r=0.4)
        geom = short_track()
        wf = CurrentWaveform.pulse(8e10, 100.0, settle=50.0)  # bounces off the end
        traj = simulate(wf, mc, geom, sample_dt=0.01)
        vmax = np.abs(traj.velocities).max()
        steps = np.abs(np.diff(traj.positions))
        assert steps.max() <= vmax * 0.01 * 1e-9 * (1 + 1e-9)

    def test_time_translation_invariance(self):
        wf = CurrentWaveform.from_segments([(3e10, 25.0), (0.0, 75.0)])
        delayed = wf.delayed(40.0)
        base = simulate(wf, self.mc, self.geom, sample_dt=0.25)
        moved = simulate(delayed, self.mc, self.geom, sample_dt=0.25)
        shift = int(round(40.0 / 0.25))
        assert np.array_equal(moved.offsets[shift:], base.offsets)
        assert np.array_equal(moved.velocities[shift:], base.velocities)
        assert np.all(moved.offsets[:shift] == base.offsets[0])


class TestOddSymmetry:
    @settings(max_examples=60, deadline=None)
    @given(
        seed=st.integers(0, 2**32 - 1),
        x_hi=st.floats(0.5, 1.0),
        v0=st.floats(-400.0, 400.0),
    )
    def test_mirror_trajectory_bit_exact(self, seed, x_hi, v0):
        rng = np.random.default_rng(seed)
        mc = random_constants(rng, c_r=float(rng.uniform(0, 1)))
        geom = short_track()
        # initial positions form an exact mirror pair (x in the right half
        # makes L - x exact by Sterbenz)
        x0 = x_hi * geom.length
        x0m = geom.length - x0
        assert geom.length - x0m == x0
        segments = [
            (float(rng.uniform(-8e11, 8e11)), float(rng.uniform(2.0, 15.0)))
            for _ in range(4)
        ]
        wf = CurrentWaveform.from_segments(segments)
        fwd = simulate(wf, mc, geom, initial=DwState(x0, v0), sample_dt=0.05)
        rev = simulate(
            wf.negated(), mc, geom, initial=DwState(x0m, -v0), sample_dt=0.05
        )
        mirror = fwd.mirrored()
        assert np.array_equal(rev.offsets, mirror.offsets)
        assert np.array_equal(rev.velocities, mirror.velocities)
        assert np.array_equal(rev.positions, mirror.positions)


class TestPinnedSimulation:
    def test_wall_freezes_when_drive_drops(self):
        mc = reference_constants(p1=1e10, p2=3.0)
        geom = long_track()
        wf = CurrentWaveform.pulse(5e10, 60.0, settle=200.0)
        traj = simulate(wf, mc, geom, sample_dt=0.01)
        # after the pulse the drive is 0 < p1; once |v| < p2 the state freezes
        assert abs(traj.velocities[-1]) > 0.0
        assert abs(traj.velocities[-1]) < 3.0
        assert traj.velocities[-1] == traj.velocities[-2]
        assert traj.offsets[-1] == traj.offsets[-2]

    def test_sub_threshold_drive_never_moves_wall_from_rest(self):
        mc = reference_constants(p1=1e10, p2=3.0)
        geom = long_track()
        wf = CurrentWaveform.pulse(5e9, 50.0, settle=10.0)  # below p1
        traj = simulate(wf, mc, geom, sample_dt=0.1)
        assert np.all(traj.velocities == 0.0)
        assert np.all(traj.offsets == traj.offsets[0])


class TestDriftAndMaxVelocity:
    mc = reference_constants()
    geom = long_track()

    def test_drift_matches_v_over_d1(self):
        wf = CurrentWaveform.pulse(2e10, 100.0, settle=150.0)
        traj = simulate(wf, self.mc, self.geom, sample_dt=0.01)
        i = int(np.searchsorted(traj.times, 100.0))
        v_off = traj.velocities[i]
        drift = drift_distance(traj, 100.0)
        assert drift == pytest.approx(v_off / self.mc.d1 * 1e-9, rel=1e-3)

    def test_drift_constant_tail_is_zero(self):
        wf = CurrentWaveform(((0.0, 0.0),), 50.0)
        traj = simulate(wf, self.mc, self.geom, sample_dt=0.5)
        assert drift_distance(traj, 20.0) == 0.0

    def test_drift_range_check(self):
        wf = CurrentWaveform.pulse(1e10, 10.0)
        traj = simulate(wf, self.mc, self.geom, sample_dt=0.5)
        with pytest.raises(ValueError):
            drift_distance(traj, 11.0)

    def test_drift_sampling_consistency(self):
        wf = CurrentWaveform.pulse(2e10, 40.0, settle=120.0)
        fine = simulate(wf, self.mc, self.geom, sample_dt=0.01)
        coarse = simulate(wf, self.mc, self.geom, sample_dt=0.1)
        d_fine = drift_distance(fine, 40.0)
        d_coarse = drift_distance(coarse, 40.0)
        vmax = max_velocity(fine)
        assert abs(d_fine - d_coarse) <= vmax * 0.1 * 1e-9

    def test_max_velocity_reaches_terminal(self):
        j = 2e10
        r = self.mc.d1 + self.mc.d2 * j
        wf = CurrentWaveform.pulse(j, 12.0 / r, settle=5.0)
        traj = simulate(wf, self.mc, self.geom, sample_dt=0.01)
        v_inf = terminal_velocity(j, self.mc)
        assert max_velocity(traj, (0.0, 12.0 / r)) == pytest.approx(v_inf, rel=1e-4)

    def test_max_velocity_zero_waveform(self):
        wf = CurrentWaveform(((0.0, 0.0),), 10.0)
        traj = simulate(wf, self.mc, self.geom, sample_dt=0.5)
        assert max_velocity(traj) == 0.0

    def test_max_velocity_empty_window(self):
        wf = CurrentWaveform.pulse(1e10, 10.0)
        traj = simulate(wf, self.mc, self.geom, sample_dt=0.5)
        with pytest.raises(ValueError):
            max_velocity(traj, (3.01, 3.49))


class TestEulerIntegrator:
    mc = reference_constants()
    geom = long_track()

    def test_euler_agrees_with_exact(self):
        wf = CurrentWaveform.pulse(2e10, 100.0, settle=100.0)
        ex = simulate(wf, self.mc, self.geom, sample_dt=0.1)
        eu = simulate(wf, self.mc, self.geom, sample_dt=0.1, integrator="euler", euler_dt=1e-3)
        disp = ex.positions[-1] - ex.positions[0]
        assert abs(eu.positions[-1] - ex.positions[-1]) < 1e-3 * abs(disp)

    def test_euler_matches_sequential_scalar_stepper(self):
        from dwkinematics import step_euler

        wf = CurrentWaveform.pulse(3e10, 2.0, settle=1.0)
        traj = simulate(wf, self.mc, self.geom, sample_dt=0.01, integrator="euler", euler_dt=1e-3)
        s = DwState.at_rest(self.geom)
        for k in range(3000):
            j = 3e10 if k * 1e-3 < 2.0 else 0.0
            s = step_euler(s, j, 1e-3, self.mc, self.geom)
        assert traj.velocities[-1] == pytest.approx(s.v, rel=1e-9)
        assert traj.positions[-1] - traj.positions[0] == pytest.approx(
            s.x - 0.5 * self.geom.length, rel=1e-6
        )

    def test_incommensurate_sampling_rejected(self):
        wf = CurrentWaveform.pulse(1e10, 10.0)
        with pytest.raises(ValueError, match="multiples"):
            simulate(wf, self.mc, self.geom, sample_dt=0.0107, integrator="euler", euler_dt=1e-3)


class TestTrajectoryContainer:
    def test_validation(self):
        t = np.array([0.0, 1.0])
        with pytest.raises(ValueError):
            Trajectory(t, np.zeros(3), np.zeros(2), np.zeros(2), 1e-6)
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 0.0]), np.zeros(2), np.zeros(2), np.zeros(2), 1e-6)

    def test_csv_round_trip(self):
        geom = long_track()
        wf = CurrentWaveform.pulse(2e10, 10.0, settle=5.0)
        traj = simulate(wf, reference_constants(), geom, sample_dt=0.5)
        buf = io.StringIO()
        traj.to_csv(buf, header_comments=["test output"])
        buf.seek(0)
        back = Trajectory.from_csv(buf, track_length=geom.length)
        assert np.array_equal(back.times, traj.times)
        assert np.allclose(back.positions, traj.positions, rtol=0, atol=0)
        assert np.array_equal(back.velocities, traj.velocities)
        assert np.array_equal(back.currents, traj.currents)

    def test_resample(self):
        geom = long_track()
        traj = simulate(
            CurrentWaveform.pulse(2e10, 20.0, settle=20.0),
            reference_constants(),
            geom,
            sample_dt=0.01,
        )
        new = traj.resample(np.linspace(0.0, 40.0, 101))
        assert len(new.times) == 101
        dense = np.interp(new.times, traj.times, traj.offsets)
        assert np.allclose(new.offsets, dense)
        with pytest.raises(ValueError):
            traj.resample(np.array([-1.0, 0.0]))
