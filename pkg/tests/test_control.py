"""Command generation tests: mapping, quantization, waveforms, replay,
and the mode machine."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maglaser.control import (
    C_DEFAULT,
    I_MAX_A,
    LEVEL_MAX,
    LEVEL_MIN,
    LSB_A,
    CurrentCommand,
    MappingMatrix,
    Mode,
    ModeMachine,
    PoseMailbox,
    ScanAxis,
    ScanWaveform,
    TabletPose,
    commanded_path_speed,
    map_tablet,
    quantize_level,
    replay_trajectory,
    waveform_sample,
)
from maglaser.errors import BusyError, DomainError, ValidationError

GAIN = 2.0 / I_MAX_A


class TestQuantization:
    def test_round_half_away_from_zero(self):
        assert quantize_level(-1023.5) == -1024
        assert quantize_level(511.75) == 512
        assert quantize_level(0.5) == 1
        assert quantize_level(-0.5) == -1

    def test_saturation(self):
        assert quantize_level(99999.0) == LEVEL_MAX
        assert quantize_level(-99999.0) == LEVEL_MIN

    def test_level_2048_amps_clamped(self):
        cmd = CurrentCommand(LEVEL_MAX, 0)
        assert cmd.amps_x == I_MAX_A
        # one LSB above the 2047-level full scale, clamped back
        assert abs(LEVEL_MAX * LSB_A - cmd.amps_x) <= LSB_A * (1 + 1e-12)

    def test_out_of_range_level_rejected(self):
        with pytest.raises(DomainError):
            CurrentCommand(LEVEL_MAX + 1, 0)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(-4000, 4000, allow_nan=False))
    def test_quantization_error_within_one_lsb(self, raw):
        cmd = CurrentCommand.from_levels(raw, 0.0)
        ideal = np.clip(raw, LEVEL_MIN, LEVEL_MAX) * LSB_A
        assert abs(cmd.amps_x - np.clip(ideal, -I_MAX_A, I_MAX_A)) \
            <= LSB_A * (0.5 + 1e-9)
        assert abs(cmd.amps_x) <= I_MAX_A


class TestMapTablet:
    def test_origin(self):
        cmd = map_tablet(TabletPose(0.0, 0.0))
        assert (cmd.level_x, cmd.level_y) == (0, 0)
        assert (cmd.amps_x, cmd.amps_y) == (0.0, 0.0)

    def test_full_scale(self):
        cmd = map_tablet(TabletPose(1.0, 0.0))
        assert cmd.level_x == 2047
        assert cmd.amps_x == pytest.approx(0.165, abs=1e-12)

    def test_half_scale_rounding(self):
        cmd = map_tablet(TabletPose(-0.5, 0.25))
        assert (cmd.level_x, cmd.level_y) == (-1024, 512)

    def test_pose_clamped(self):
        pose = TabletPose(1.7, -2.0)
        assert (pose.p_x, pose.p_y) == (1.0, -1.0)

    def test_cross_coupled_matrix(self):
        m = MappingMatrix(c11=0.0, c12=1000.0, c21=-500.0, c22=0.0)
        cmd = map_tablet(TabletPose(0.5, 1.0), m)
        assert (cmd.level_x, cmd.level_y) == (1000, -250)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(-1, 1, allow_nan=False), st.floats(-1, 1, allow_nan=False))
    def test_odd_symmetry_within_one_level(self, px, py):
        m = MappingMatrix.aligned(C_DEFAULT)
        a = map_tablet(TabletPose(px, py), m)
        b = map_tablet(TabletPose(-px, -py), m)
        assert abs(a.level_x + b.level_x) <= 1
        assert abs(a.level_y + b.level_y) <= 1


class TestWaveform:
    def test_zero_at_t0(self):
        w = ScanWaveform(amplitude_levels=500, frequency_hz=10.0)
        assert waveform_sample(w, 0.0).level_x == 0

    def test_quarter_period_peak(self):
        w = ScanWaveform(amplitude_levels=400, frequency_hz=5.0)
        cmd = waveform_sample(w, 0.05)
        assert cmd.level_x == 400

    def test_periodicity_within_one_level(self):
        w = ScanWaveform(amplitude_levels=369, frequency_hz=8.0)
        for k in (1, 3, 10):
            t = 0.0125  # exact binary fraction times f gives exact period
            a = waveform_sample(w, t)
            b = waveform_sample(w, t + k / 8.0)
            assert abs(a.level_x - b.level_x) <= 1

    def test_axis_selection(self):
        w = ScanWaveform(amplitude_levels=100, frequency_hz=5.0,
                         axis=ScanAxis.Y)
        cmd = waveform_sample(w, 0.05)
        assert cmd.level_x == 0 and cmd.level_y == 100
        w2 = ScanWaveform(amplitude_levels=100, frequency_hz=5.0,
                          axis=ScanAxis.XY)
        cmd2 = waveform_sample(w2, 0.05)
        assert cmd2.level_x == cmd2.level_y == 100

    def test_commanded_speed_on_072_line(self):
        # one period covers the peak-to-peak line twice
        w = ScanWaveform.for_line(0.72, 48.0, GAIN)
        speed = commanded_path_speed(w, GAIN)
        assert speed == pytest.approx(0.72 * 2 * 48, rel=1e-3)
        assert w.amplitude_levels == pytest.approx(369.0, abs=1.0)

    def test_negative_time_rejected(self):
        w = ScanWaveform(amplitude_levels=100, frequency_hz=5.0)
        with pytest.raises(DomainError):
            waveform_sample(w, -1e-3)


class TestReplay:
    def test_single_point_constant_stream(self):
        cmds = list(replay_trajectory([0.0], [1.0], [-0.5], passes=1,
                                      rate_hz=1.0, gain_mm_per_a=GAIN))
        assert len(cmds) == 1
        lx = cmds[0].level_x
        assert lx == quantize_level(1.0 / GAIN / LSB_A)

    def test_pass_duration_and_identical_passes(self):
        t = np.linspace(0.0, 1.0, 50)
        x = 0.5 * np.sin(2 * np.pi * t)
        y = 0.25 * np.cos(2 * np.pi * t) - 0.25
        cmds = list(replay_trajectory(t, x, y, passes=10, rate_hz=1.0,
                                      gain_mm_per_a=GAIN))
        per_pass = len(cmds) // 10
        # stream duration 10 s within one control tick per pass
        assert abs(len(cmds) * 0.00025 - 10.0) < 10 * 0.00025 + 1e-9
        first = [(c.level_x, c.level_y) for c in cmds[:per_pass]]
        for k in range(1, 10):
            seg = [(c.level_x, c.level_y)
                   for c in cmds[k * per_pass:(k + 1) * per_pass]]
            assert seg == first

    def test_determinism(self):
        t = np.linspace(0.0, 1.0, 20)
        x = 0.3 * t
        y = -0.2 * t
        a = [(c.level_x, c.level_y) for c in
             replay_trajectory(t, x, y, 2, 2.0, GAIN)]
        b = [(c.level_x, c.level_y) for c in
             replay_trajectory(t, x, y, 2, 2.0, GAIN)]
        assert a == b

    def test_out_of_workspace_rejected_before_emission(self):
        gen = replay_trajectory([0.0, 1.0], [0.0, 5.0], [0.0, 0.0],
                                passes=1, rate_hz=1.0, gain_mm_per_a=GAIN)
        with pytest.raises(ValidationError):
            next(gen)

    def test_saturation_never_exceeded(self):
        t = np.linspace(0.0, 1.0, 30)
        x = np.linspace(-2.0, 2.0, 30)
        for cmd in replay_trajectory(t, x, np.zeros(30), 1, 1.0, GAIN):
            assert LEVEL_MIN <= cmd.level_x <= LEVEL_MAX
            assert abs(cmd.amps_x) <= I_MAX_A


class TestModeMachine:
    def test_idle_to_teleop_accepted(self):
        mm = ModeMachine()
        plan = mm.request(Mode.TELEOPERATION)
        assert mm.mode is Mode.TELEOPERATION
        assert plan == []  # nothing to ramp from rest

    def test_busy_transition_rejected_until_stopped(self):
        mm = ModeMachine()
        mm.request(Mode.HIGH_SPEED_SCAN)
        mm.note_command(CurrentCommand(500, 0))
        with pytest.raises(BusyError):
            mm.request(Mode.TRAJECTORY_REPLAY)
        plan = mm.stop_active()
        assert mm.mode is Mode.IDLE
        # 50 ms ramp at 4 kHz
        assert len(plan) == 200
        assert plan[-1].level_x == 0
        mm.request(Mode.TRAJECTORY_REPLAY, plant_velocity_mm_s=(0.0, 0.0))
        assert mm.mode is Mode.TRAJECTORY_REPLAY

    def test_replay_requires_rest(self):
        mm = ModeMachine()
        with pytest.raises(BusyError):
            mm.request(Mode.TRAJECTORY_REPLAY, plant_velocity_mm_s=(5.0, 0.0))

    def test_ramp_is_monotone_to_zero(self):
        mm = ModeMachine()
        mm.request(Mode.HIGH_SPEED_SCAN)
        mm.note_command(CurrentCommand(-800, 600))
        plan = mm.stop_active()
        levels = [abs(c.level_x) for c in plan]
        assert all(b <= a for a, b in zip(levels, levels[1:]))
        assert plan[-1].level_x == 0 and plan[-1].level_y == 0

    def test_stylus_lift_holds_last_value(self):
        box = PoseMailbox()
        box.post(TabletPose(0.3, -0.4, 1.0))
        # no new pose arrives: the mailbox keeps serving the last one
        assert box.latest().p_x == 0.3
        assert box.latest().p_x == 0.3

    def test_mailbox_most_recent_wins(self):
        box = PoseMailbox()
        box.post(TabletPose(0.1, 0.0, 1.0))
        box.post(TabletPose(0.2, 0.0, 2.0))
        assert box.latest().p_x == 0.2
