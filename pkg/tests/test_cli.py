"""CLI surface tests: each subcommand produces its session artifacts."""

import json
import os

import pytest

from maglaser.cli import main
from maglaser.harness import CALIBRATION_HEADER
from maglaser.plant import save_params


@pytest.fixture(scope="module")
def calib_file(tmp_path_factory, calibrated_params):
    path = tmp_path_factory.mktemp("cfg") / "calibration.cfg"
    save_params(calibrated_params, str(path), header=CALIBRATION_HEADER)
    return str(path)


@pytest.fixture(scope="module")
def noiseless_file(tmp_path_factory, calibrated_noiseless):
    path = tmp_path_factory.mktemp("cfg2") / "noiseless.cfg"
    save_params(calibrated_noiseless, str(path))
    return str(path)


def test_workspace_command(tmp_path, noiseless_file):
    out = str(tmp_path / "ws")
    rc = main(["workspace", "--out", out, "--calibration", noiseless_file])
    assert rc == 0
    report = json.load(open(f"{out}/report.json"))
    assert abs(report["span_x_mm"] - 4.0) < 0.2
    for name in ("meta.json", "plant.cfg", "workspace.csv",
                 "workspace_map.png", "current_displacement.png"):
        assert os.path.exists(f"{out}/{name}"), name


def test_linearity_command(tmp_path, noiseless_file):
    out = str(tmp_path / "lin")
    rc = main(["linearity", "--out", out, "--calibration", noiseless_file,
               "--freqs", "5,48,52", "--line-mm", "0.72"])
    assert rc == 0
    report = json.load(open(f"{out}/report.json"))
    assert report["stable_limit_hz"] == 48.0
    assert os.path.exists(f"{out}/rmse_vs_frequency.png")
    assert os.path.exists(f"{out}/linearity.csv")


def test_repeat_command(tmp_path, calib_file):
    out = str(tmp_path / "rep")
    rc = main(["repeat", "--out", out, "--calibration", calib_file,
               "--passes", "3", "--rate-hz", "1", "--seed", "5"])
    assert rc == 0
    report = json.load(open(f"{out}/report.json"))
    assert len(report["per_pass"]) == 2
    assert os.path.exists(f"{out}/passes_overlay.png")


def test_repeat_noise_off(tmp_path, calib_file):
    out = str(tmp_path / "rep0")
    rc = main(["repeat", "--out", out, "--calibration", calib_file,
               "--passes", "2", "--noise", "off"])
    assert rc == 0
    report = json.load(open(f"{out}/report.json"))
    assert report["noise_a"] == 0.0
    assert report["mean_rmse_um"] <= 12.2


def test_teleop_scripted_command(tmp_path, noiseless_file):
    out = str(tmp_path / "tel")
    rc = main(["teleop", "--out", out, "--calibration", noiseless_file,
               "--shape", "T1", "--offset-um", "39", "--duration-s", "4.0"])
    assert rc == 0
    report = json.load(open(f"{out}/report.json"))
    assert abs(report["rmse_um"] - 39.0) <= 13.0
    for name in ("spots.csv", "poses.csv", "session_trace.png"):
        assert os.path.exists(f"{out}/{name}"), name


def test_teleop_save_frames(tmp_path, noiseless_file):
    out = str(tmp_path / "telf")
    rc = main(["teleop", "--out", out, "--calibration", noiseless_file,
               "--shape", "T3", "--duration-s", "1.0", "--save-frames"])
    assert rc == 0
    import glob
    frames = sorted(glob.glob(f"{out}/frames/*.ppm"))
    meta = json.load(open(f"{out}/meta.json"))
    assert len(frames) == meta["frame_count"] > 0
    assert os.path.exists(frames[0] + ".json")


def test_eval_command(tmp_path, noiseless_file, capsys):
    out = str(tmp_path / "tel2")
    assert main(["teleop", "--out", out, "--calibration", noiseless_file,
                 "--shape", "T3", "--duration-s", "2.0"]) == 0
    rc = main(["eval", "--session", out])
    assert rc == 0
    stored = json.load(open(f"{out}/report.json"))
    evaluated = json.load(open(f"{out}/report.eval.json"))
    assert evaluated["rmse_um"] == pytest.approx(stored["rmse_um"], abs=1e-9)


def test_teleop_script_round_trip(tmp_path, noiseless_file):
    out1 = str(tmp_path / "a")
    assert main(["teleop", "--out", out1, "--calibration", noiseless_file,
                 "--shape", "T3", "--duration-s", "2.0"]) == 0
    out2 = str(tmp_path / "b")
    rc = main(["teleop", "--out", out2, "--calibration", noiseless_file,
               "--shape", "T3", "--script", f"{out1}/poses.csv"])
    assert rc == 0
    a = json.load(open(f"{out1}/report.json"))
    b = json.load(open(f"{out2}/report.json"))
    assert a["rmse_um"] == pytest.approx(b["rmse_um"], abs=1e-9)


def test_repeat_from_trajectory_csv(tmp_path, calib_file):
    import csv

    import numpy as np

    # closed out-and-back path: open paths ring at the pass seam
    path = str(tmp_path / "line.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_s", "x_mm", "y_mm"])
        for t in np.linspace(0.0, 1.0, 81):
            x = -0.5 + (2 * t if t <= 0.5 else 2 * (1 - t))
            w.writerow([t, x, 0.0])
    out = str(tmp_path / "rep")
    rc = main(["repeat", "--out", out, "--calibration", calib_file,
               "--traj-csv", path, "--passes", "2", "--noise", "off"])
    assert rc == 0
    report = json.load(open(f"{out}/report.json"))
    assert report["mean_rmse_um"] <= 12.2
    assert os.path.exists(f"{out}/commands.csv")


def test_calibrate_command(tmp_path):
    out = str(tmp_path / "calibration.cfg")
    rc = main(["calibrate", "--out", out])
    assert rc == 0
    from maglaser.plant import load_params
    p = load_params(out)
    assert p.damping_ratio == pytest.approx(0.1522, abs=0.001)
    assert p.cross_coupling_mm2 > 0
    assert p.current_noise_a > 0
    text = open(out).read()
    assert text.startswith("#")


def test_error_exit_code(tmp_path, capsys):
    rc = main(["repeat", "--out", str(tmp_path / "x"), "--shape", "square"])
    assert rc == 2
    assert "validation" in capsys.readouterr().err
