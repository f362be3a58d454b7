"""Experiment orchestration tests (fast configurations; the full-scale
runs live in the acceptance suite)."""

import json

import numpy as np
import pytest

from maglaser.control import TabletPose
from maglaser.errors import ValidationError
from maglaser.harness import (
    default_workspace_grid,
    fit_damping_from_speeds,
    run_linearity_sweep,
    run_repeatability,
    run_single_scan,
    run_teleop_session,
    run_workspace_map,
    trace_shape_poses,
    trim_to_band,
    waveform_levels,
)
from maglaser.metrics import Trajectory
from maglaser.plant import with_calibration
from maglaser.shapes import make_shape
from maglaser.control import ScanWaveform


class TestDampingFit:
    def test_value_from_speed_anchors(self):
        zeta = fit_damping_from_speeds()
        assert zeta == pytest.approx(0.1522, abs=0.001)

    def test_inconsistent_anchor_rejected(self):
        with pytest.raises(ValidationError):
            fit_damping_from_speeds(anchor_low=(1.0, 3.0))


class TestWorkspace:
    def test_grid_has_reference_plus_24(self):
        grid = default_workspace_grid()
        assert len(grid) == 25
        assert (0, 0) in grid

    def test_span_and_fits(self, calibrated_noiseless):
        report = run_workspace_map(calibrated_noiseless)
        assert report["n_failed"] == 0
        assert report["span_x_mm"] == pytest.approx(4.0, rel=0.05)
        assert report["span_y_mm"] == pytest.approx(4.0, rel=0.05)
        assert report["fit_x"]["r2"] >= 0.999
        assert report["fit_y"]["r2"] >= 0.999

    def test_slope_symmetry_without_asymmetry(self, calibrated_noiseless):
        report = run_workspace_map(calibrated_noiseless)
        for axis in ("x", "y"):
            fit = report[f"fit_{axis}"]
            rel = abs(fit["slope_pos_mm_per_a"] - fit["slope_neg_mm_per_a"]) \
                / fit["slope_mm_per_a"]
            assert rel <= 1e-6

    def test_asymmetry_breaks_slope_symmetry(self, calibrated_noiseless):
        params = with_calibration(calibrated_noiseless, gain_asym_x_pos=1.04)
        report = run_workspace_map(params)
        fit = report["fit_x"]
        rel = abs(fit["slope_pos_mm_per_a"] - fit["slope_neg_mm_per_a"]) \
            / fit["slope_mm_per_a"]
        assert rel > 0.01

    def test_reference_point_at_origin(self, calibrated_noiseless):
        report = run_workspace_map(calibrated_noiseless,
                                   grid=[(0, 0)])
        pt = report["points"][0]
        assert abs(pt["x_mm"]) <= 0.013 and abs(pt["y_mm"]) <= 0.013

    def test_per_point_errors_do_not_stop_the_grid(self, calibrated_noiseless):
        # a tightened workspace makes the outer grid commands exceed the
        # soft clamp; those points report errors, the rest still run
        params = with_calibration(calibrated_noiseless,
                                  workspace_halfwidth_mm=1.5)
        report = run_workspace_map(params)
        assert report["n_failed"] > 0
        inner = [r for r in report["points"]
                 if abs(r["level_x"]) <= 1024 and abs(r["level_y"]) <= 1024]
        assert all(r["ok"] for r in inner)
        failed = [r for r in report["points"] if not r["ok"]]
        assert all("workspace" in r["error"] for r in failed)


class TestLinearity:
    def test_5hz_scan_quality(self, calibrated_noiseless):
        row = run_single_scan(calibrated_noiseless, 5.0)
        assert row["rmse_um"] <= 10.0

    def test_1hz_speed_matches_reported(self, calibrated_noiseless):
        row = run_single_scan(calibrated_noiseless, 1.0)
        assert row["speed_mm_s"] == pytest.approx(1.44, rel=0.02)

    def test_sweep_report_shape(self, calibrated_noiseless):
        report = run_linearity_sweep(calibrated_noiseless,
                                     frequencies_hz=(5.0, 48.0, 52.0))
        assert [r["f_hz"] for r in report["rows"]] == [5.0, 48.0, 52.0]
        assert report["stable_limit_hz"] == 48.0

    def test_waveform_levels_quantized(self):
        w = ScanWaveform(amplitude_levels=369.2, frequency_hz=10.0)
        lv = waveform_levels(w, 4000, 0.00025)
        assert lv.dtype == np.int64
        assert lv[:, 1].max() == 0
        assert lv[:, 0].max() <= 370


class TestRepeatability:
    def test_command_streams_identical_across_passes(self, calibrated_noiseless):
        rep1 = run_repeatability(calibrated_noiseless, passes=2, seed=3,
                                 fps=250.0, use_vision=False)
        rep2 = run_repeatability(calibrated_noiseless, passes=2, seed=3,
                                 fps=250.0, use_vision=False)
        assert json.dumps(rep1, sort_keys=True) == json.dumps(rep2,
                                                              sort_keys=True)

    def test_noiseless_passes_overlap(self, calibrated_noiseless):
        rep = run_repeatability(calibrated_noiseless, passes=3, seed=3,
                                fps=250.0, use_vision=False)
        assert rep["mean_rmse_um"] <= 12.2

    def test_noise_separates_passes(self, calibrated_params):
        rep = run_repeatability(calibrated_params, passes=3, seed=3,
                                fps=250.0, use_vision=False)
        assert rep["mean_rmse_um"] > 5.0

    def test_too_few_passes_rejected(self, calibrated_noiseless):
        with pytest.raises(ValidationError):
            run_repeatability(calibrated_noiseless, passes=1)


class TestTeleop:
    def test_perfect_replay_within_detection_tolerance(self,
                                                       calibrated_noiseless):
        shape = make_shape("T3")
        poses = trace_shape_poses(shape, calibrated_noiseless, duration_s=2.0,
                                  lead_hold_s=0.2, tail_hold_s=0.2)
        report = run_teleop_session(calibrated_noiseless, shape, poses)
        assert report["rmse_um"] <= 12.2
        assert not report["partial"]

    def test_offset_shifts_rmse(self, calibrated_noiseless):
        shape = make_shape("T3")
        poses = trace_shape_poses(shape, calibrated_noiseless, duration_s=2.0,
                                  offset_mm=0.1, lead_hold_s=0.2,
                                  tail_hold_s=0.2)
        report = run_teleop_session(calibrated_noiseless, shape, poses)
        assert report["rmse_um"] == pytest.approx(100.0, abs=13.0)

    def test_timeout_flags_partial(self, calibrated_noiseless):
        shape = make_shape("T3")
        poses = [TabletPose(-0.7, 0.0, 0.0), TabletPose(-0.5, 0.0, 0.5),
                 TabletPose(-0.3, 0.0, 6.5)]
        report = run_teleop_session(calibrated_noiseless, shape, poses)
        assert report["partial"]

    def test_empty_stream_rejected(self, calibrated_noiseless):
        with pytest.raises(ValidationError):
            run_teleop_session(calibrated_noiseless, make_shape("T1"), [])

    def test_pose_values_stay_normalized(self, calibrated_noiseless):
        poses = trace_shape_poses(make_shape("T1"), calibrated_noiseless)
        assert all(-1.0 <= p.p_x <= 1.0 and -1.0 <= p.p_y <= 1.0
                   for p in poses)

    def test_trim_to_band(self):
        shape = make_shape("T3")
        t = np.arange(6) * 0.1
        x = np.array([-1.5, -1.5, -1.4, 0.0, 1.4, 1.5])
        y = np.array([1.5, 0.8, 0.0, 0.0, 0.0, 1.5])   # enters and leaves
        trimmed = trim_to_band(Trajectory(t_s=t, x_mm=x, y_mm=y), shape)
        assert len(trimmed) == 3
        assert trimmed.x_mm[0] == -1.4 and trimmed.x_mm[-1] == 1.4


class TestReproducibility:
    def test_workspace_report_bytes(self, calibrated_noiseless):
        a = run_workspace_map(calibrated_noiseless, grid=[(0, 0), (1024, 0)])
        b = run_workspace_map(calibrated_noiseless, grid=[(0, 0), (1024, 0)])
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_noisy_repeatability_depends_only_on_seed(self, calibrated_params):
        a = run_repeatability(calibrated_params, passes=2, seed=11, fps=250.0,
                              use_vision=False)
        b = run_repeatability(calibrated_params, passes=2, seed=11, fps=250.0,
                              use_vision=False)
        c = run_repeatability(calibrated_params, passes=2, seed=12, fps=250.0,
                              use_vision=False)
        assert a["mean_rmse_um"] == b["mean_rmse_um"]
        assert a["mean_rmse_um"] != c["mean_rmse_um"]
