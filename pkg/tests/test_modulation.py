import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.spatial.distance import cdist

from airhaptics import (AmEnvelope, ConfigError, DeviceSpec, EllipseTrajectory,
                        FocusSequence, Medium, arc_length, build_array,
                        compile_am, compile_lm, ellipse_perimeter,
                        sample_trajectory)
from airhaptics.phasing import TWO_PI

MEDIUM = Medium()
EX = np.array([1.0, 0.0, 0.0])
EY = np.array([0.0, 1.0, 0.0])


def traj(r_x, r_y, step=0.2e-3, freq=5.0, center=(0.0, 0.0, 0.2)):
    return EllipseTrajectory(center=np.asarray(center), u_axis=EX, v_axis=EY,
                             r_x=r_x, r_y=r_y, lm_frequency=freq, step_width=step)


def ramanujan_perimeter(a, b):
    h = ((a - b) / (a + b)) ** 2
    return math.pi * (a + b) * (1 + 3 * h / (10 + math.sqrt(4 - 3 * h)))


class TestSampler:
    def test_line_point_count_and_dwell(self):
        # path length 4 * 3 mm = 12 mm; 12 / 0.2 = 60 points at 5 Hz
        seq = sample_trajectory(traj(0.0, 3e-3))
        assert len(seq) == 60
        assert seq.period == pytest.approx(0.2, abs=1e-12)
        assert seq.dwell == pytest.approx(1.0 / 300.0, abs=1e-12)

    def test_line_sweeps_segment_and_back(self):
        seq = sample_trajectory(traj(0.0, 3e-3))
        v = (seq.points - [0, 0, 0.2]) @ EY
        u = (seq.points - [0, 0, 0.2]) @ EX
        np.testing.assert_allclose(u, 0.0, atol=1e-15)
        assert v.max() == pytest.approx(3e-3, abs=1e-12)   # reaches +r_y
        assert v.min() == pytest.approx(-3e-3, abs=1e-12)  # and -r_y
        assert v[0] == pytest.approx(0.0, abs=1e-12)       # starts at center
        # down-and-back: every interior position is visited twice
        assert len(seq) == 60

    def test_circle_uniform_spacing(self):
        seq = sample_trajectory(traj(2e-3, 2e-3))
        sp = seq.spacings()
        assert sp.max() - sp.min() < 1e-9

    def test_ellipse_count_from_quadrature_perimeter(self):
        t = traj(1e-3, 3e-3)
        L = ellipse_perimeter(1e-3, 3e-3)
        seq = sample_trajectory(t)
        assert len(seq) == math.ceil(L / t.step_width)
        assert seq.spacings().max() <= t.step_width

    def test_perimeter_matches_ramanujan(self):
        L = ellipse_perimeter(1e-3, 3e-3)
        assert L == pytest.approx(ramanujan_perimeter(1e-3, 3e-3), rel=1e-3)

    def test_arc_length_matches_numeric_integration(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            r_x, r_y = rng.uniform(0.0, 0.01, 2)
            if max(r_x, r_y) < 1e-6:
                continue
            t = rng.uniform(0, 2 * math.pi)
            ref, _ = quad(lambda u: math.hypot(r_x * math.sin(u), r_y * math.cos(u)),
                          0.0, t, epsabs=1e-13, epsrel=1e-13, limit=200)
            assert arc_length(r_x, r_y, t) == pytest.approx(ref, abs=1e-11)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.0, 0.01), st.floats(0.0, 0.01), st.floats(0.05e-3, 1e-3))
    def test_closure_spacing_bound(self, r_x, r_y, step):
        if max(r_x, r_y) < 1e-5:
            return
        seq = sample_trajectory(traj(r_x, r_y, step=step))
        assert seq.spacings().max() <= step + 1e-12
        # all points lie on the ellipse
        rel = seq.points - [0, 0, 0.2]
        u, v = rel @ EX, rel @ EY
        if r_x > 0 and r_y > 0:
            resid = (u / r_x) ** 2 + (v / r_y) ** 2
            np.testing.assert_allclose(resid, 1.0, atol=1e-9)

    def test_degenerate_consistency(self):
        line = sample_trajectory(traj(0.0, 3e-3)).points
        thin = sample_trajectory(traj(1e-7, 3e-3)).points
        d = cdist(line, thin)
        hausdorff = max(d.min(axis=0).max(), d.min(axis=1).max())
        assert hausdorff < 0.2e-3

    def test_period_exactness(self):
        seq = sample_trajectory(traj(1e-3, 3e-3, freq=5.0))
        assert len(seq) * seq.dwell == pytest.approx(seq.period, abs=1e-9)

    def test_both_radii_zero_rejected(self):
        with pytest.raises(ConfigError):
            traj(0.0, 0.0)

    def test_validation(self):
        with pytest.raises(ConfigError):
            traj(1e-3, 1e-3, step=0.0)
        with pytest.raises(ConfigError):
            traj(1e-3, 1e-3, freq=0.0)
        with pytest.raises(ConfigError):
            EllipseTrajectory(center=np.zeros(3), u_axis=EX, v_axis=EX,
                              r_x=1e-3, r_y=1e-3)


def small_layout():
    return build_array([DeviceSpec(rows=2, cols=3, pitch=0.0102)], source_pressure=1.0)


class TestCompileLm:
    def test_frame_count_and_hold_distribution(self):
        # 60 points at 5 Hz, 1000 Hz control rate: 200 frames, holds of 3 or 4
        layout = small_layout()
        seq = sample_trajectory(traj(0.0, 3e-3))
        sched = compile_lm(layout, seq, MEDIUM, 1000.0)
        assert len(sched) == 200
        assert sched.timestamps[0] == 0.0
        assert sched.timestamps[-1] == pytest.approx(0.199, abs=1e-12)
        # recover hold runs from frame phases
        change = [0] + [k for k in range(1, 200)
                        if not np.array_equal(sched.phases[k], sched.phases[k - 1])] + [200]
        runs = np.diff(change)
        assert sorted(set(runs.tolist())) == [3, 4]
        assert np.sum(runs == 4) == 20 and np.sum(runs == 3) == 40
        assert np.all(sched.amplitudes == 1.0)

    def test_single_point_sequence_is_static(self):
        layout = small_layout()
        seq = FocusSequence(points=np.array([[0.0, 0.0, 0.15]]), dwell=0.2, period=0.2)
        sched = compile_lm(layout, seq, MEDIUM, 50.0)
        assert len(sched) == 10
        assert np.all(sched.phases == sched.phases[0])

    def test_quantized_phases_on_lattice(self):
        layout = small_layout()
        seq = sample_trajectory(traj(0.0, 3e-3))
        sched = compile_lm(layout, seq, MEDIUM, 1000.0, quantize_bits=8)
        steps = sched.phases / (TWO_PI / 256)
        np.testing.assert_allclose(steps, np.round(steps), atol=1e-9)

    def test_control_rate_too_low_names_minimum(self):
        layout = small_layout()
        seq = sample_trajectory(traj(0.0, 3e-3))  # 60 points at 5 Hz -> 300 Hz min
        with pytest.raises(ConfigError, match="300"):
            compile_lm(layout, seq, MEDIUM, 250.0)

    def test_determinism(self):
        layout = small_layout()
        seq = sample_trajectory(traj(1e-3, 3e-3))
        a = compile_lm(layout, seq, MEDIUM, 1000.0)
        b = compile_lm(layout, seq, MEDIUM, 1000.0)
        assert np.array_equal(a.phases, b.phases)
        assert np.array_equal(a.amplitudes, b.amplitudes)
        assert np.array_equal(a.timestamps, b.timestamps)


class TestCompileAm:
    def test_zero_depth_keeps_full_amplitude(self):
        layout = small_layout()
        env = AmEnvelope(am_frequency=100.0, waveform="sine", depth=0.0)
        sched = compile_am(layout, [0, 0, 0.15], env, MEDIUM, 2000.0)
        assert np.all(sched.amplitudes == 1.0)

    def test_square_duty_pattern(self):
        # 200 Hz at 2000 Hz control rate: 10 frames, 5 at 1 then 5 at 0
        layout = small_layout()
        env = AmEnvelope(am_frequency=200.0, waveform="square", depth=1.0)
        sched = compile_am(layout, [0, 0, 0.15], env, MEDIUM, 2000.0)
        assert len(sched) == 10
        np.testing.assert_array_equal(sched.amplitudes[:, 0],
                                      [1, 1, 1, 1, 1, 0, 0, 0, 0, 0])

    def test_sine_full_depth_range(self):
        layout = small_layout()
        env = AmEnvelope(am_frequency=50.0, waveform="sine", depth=1.0)
        sched = compile_am(layout, [0, 0, 0.15], env, MEDIUM, 5000.0)
        amps = sched.amplitudes[:, 0]
        dt_err = 2 * math.pi * 50.0 / 5000.0  # envelope change per frame
        assert amps.min() <= 0.0 + dt_err
        assert amps.max() >= 1.0 - dt_err
        assert amps.max() <= 1.0 and amps.min() >= 0.0

    def test_phases_constant_across_frames(self):
        layout = small_layout()
        env = AmEnvelope(am_frequency=100.0)
        sched = compile_am(layout, [0, 0, 0.15], env, MEDIUM, 1500.0)
        assert np.all(sched.phases == sched.phases[0])

    def test_control_rate_too_low(self):
        layout = small_layout()
        env = AmEnvelope(am_frequency=300.0)
        with pytest.raises(ConfigError, match="3000"):
            compile_am(layout, [0, 0, 0.15], env, MEDIUM, 2000.0)

    def test_envelope_validation(self):
        with pytest.raises(ConfigError):
            AmEnvelope(am_frequency=0.0)
        with pytest.raises(ConfigError):
            AmEnvelope(am_frequency=10.0, waveform="triangle")
        with pytest.raises(ConfigError):
            AmEnvelope(am_frequency=10.0, depth=1.5)


def test_frame_schedule_timestamp_validation():
    from airhaptics import FrameSchedule
    with pytest.raises(ConfigError):
        FrameSchedule(control_rate=100.0, timestamps=np.array([0.0, 0.02]),
                      phases=np.zeros((2, 3)), amplitudes=np.ones((2, 3)))
