"""Command-line interface: one subcommand per experiment.

All experiment subcommands write a session directory (meta.json,
report.json, delimited data, PNG figures) and print a short table.
Exit status is 0 on success, otherwise nonzero with the error category
on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import figures
from .control import I_MAX_A, LSB_A, TabletPose, map_tablet, replay_levels
from .errors import MaglaserError, ValidationError
from .harness import (
    CALIBRATION_HEADER,
    DEFAULT_SWEEP_HZ,
    calibrate,
    run_linearity_sweep,
    run_repeatability,
    run_teleop_session,
    run_workspace_map,
    trace_shape_poses,
)
from .metrics import Trajectory, compare_to_target, execution_time
from .plant import PlantParams, load_params, save_params
from .session import SessionWriter, load_trajectory_csv, read_meta, read_spots
from .shapes import SHAPE_IDS, figure_eight, make_shape

DEFAULT_CALIBRATION = "calibration.cfg"


def _load_plant(args) -> PlantParams:
    if getattr(args, "config", None):
        return load_params(args.config)
    if getattr(args, "calibration", None):
        return load_params(args.calibration)
    if os.path.exists(DEFAULT_CALIBRATION):
        return load_params(DEFAULT_CALIBRATION)
    return PlantParams()


def _writer(args, report: dict, params: PlantParams) -> SessionWriter:
    meta = {
        "mode": report.get("experiment"),
        "seed": getattr(args, "seed", 0),
        "config_hash": params.config_hash(),
    }
    w = SessionWriter(args.out, meta)
    w.write_meta()
    w.write_params(params)
    w.write_report(report)
    return w


def _cmd_calibrate(args) -> int:
    base = load_params(args.config) if args.config else PlantParams()
    params = calibrate(base, seed=args.seed)
    save_params(params, args.out, header=CALIBRATION_HEADER)
    print(f"damping_ratio     = {params.damping_ratio:.6f}")
    print(f"cross_coupling    = {params.cross_coupling_mm2:.5f} /mm^2")
    print(f"current_noise     = {params.current_noise_a * 1000:.4f} mA")
    print(f"written to {args.out}")
    return 0


def _cmd_workspace(args) -> int:
    params = _load_plant(args)
    report = run_workspace_map(params, seed=args.seed)
    w = _writer(args, report, params)
    w.write_csv(
        "workspace.csv",
        ["level_x", "level_y", "amps_x", "amps_y", "x_mm", "y_mm", "ok"],
        [[r["level_x"], r["level_y"], r["amps_x"], r["amps_y"],
          r.get("x_mm", ""), r.get("y_mm", ""), r["ok"]]
         for r in report["points"]],
    )
    w.write_csv(
        "commands.csv",
        ["t_s", "level_x", "level_y", "amps_x", "amps_y"],
        [[i, r["level_x"], r["level_y"], r["amps_x"], r["amps_y"]]
         for i, r in enumerate(report["points"])],
    )
    figures.workspace_map_figure(report, w.path("workspace_map.png"))
    figures.current_displacement_figure(report, w.path("current_displacement.png"))
    print(f"span: {report['span_x_mm']:.3f} x {report['span_y_mm']:.3f} mm")
    for axis in ("x", "y"):
        fit = report[f"fit_{axis}"]
        print(f"{axis}: slope {fit['slope_mm_per_a']:.3f} mm/A  R^2 {fit['r2']:.6f}")
    print(f"session: {args.out}")
    return 0


def _cmd_linearity(args) -> int:
    params = _load_plant(args)
    freqs = [float(f) for f in args.freqs.split(",") if f.strip()]
    report = run_linearity_sweep(params, freqs, line_mm=args.line_mm)
    w = _writer(args, report, params)
    w.write_csv(
        "linearity.csv",
        ["f_hz", "amplitude_levels", "rmse_um", "max_um", "speed_mm_s",
         "n_samples"],
        [[r["f_hz"], r["amplitude_levels"], r["rmse_um"], r["max_um"],
          r["speed_mm_s"], r["n_samples"]] for r in report["rows"]],
    )
    figures.linearity_sweep_figure(report, w.path("rmse_vs_frequency.png"))
    for r in report["rows"]:
        print(f"  {r['f_hz']:6.1f} Hz  RMSE {r['rmse_um']:9.2f} um  "
              f"speed {r['speed_mm_s']:8.2f} mm/s")
    print(f"largest stable frequency (<{report['stability_budget_um']:.0f} um): "
          f"{report['stable_limit_hz']}")
    print(f"session: {args.out}")
    return 0


def _cmd_repeat(args) -> int:
    params = _load_plant(args)
    if args.noise == "off":
        from .plant import with_calibration
        params = with_calibration(params, current_noise_a=0.0)
    if args.traj_csv:
        traj = load_trajectory_csv(args.traj_csv)
    elif args.shape == "eight":
        traj = figure_eight()
    else:
        raise ValidationError(
            "replay shapes: 'eight' or --traj-csv <file with t_s,x_mm,y_mm>")
    report = run_repeatability(params, traj=traj, passes=args.passes,
                               rate_hz=args.rate_hz, seed=args.seed)
    w = _writer(args, report, params)
    w.write_csv(
        "passes.csv",
        ["pass", "rmse_um", "max_um", "n_samples"],
        [[r["pass"], r["rmse_um"], r["max_um"], r["n_samples"]]
         for r in report["per_pass"]],
    )
    span = traj.t_s[-1] - traj.t_s[0]
    one_pass = replay_levels(
        (traj.t_s - traj.t_s[0]) / span / args.rate_hz, traj.x_mm, traj.y_mm,
        params.gain_mm_per_a, params.optics_scale,
        params.workspace_halfwidth_mm)
    amps = np.clip(one_pass * LSB_A, -I_MAX_A, I_MAX_A)
    w.write_commands(np.arange(len(one_pass)) * params.dt_s, one_pass, amps)
    figures.repeatability_figure(report, w.path("passes_overlay.png"))
    print(f"mean RMSE over passes 2..{args.passes}: "
          f"{report['mean_rmse_um']:.2f} +/- {report['std_rmse_um']:.2f} um")
    print(f"session: {args.out}")
    return 0


def _read_pose_script(path: str) -> list[TabletPose]:
    poses = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            poses.append(TabletPose(float(row["px"]), float(row["py"]),
                                    float(row["t_s"])))
    return poses


def _cmd_teleop(args) -> int:
    params = _load_plant(args)
    shape = make_shape(args.shape)
    if args.port is not None:
        from .teleop_service import serve
        serve(port=args.port, params=params, shape=shape,
              session_dir=args.out, seed=args.seed)
        return 0
    if args.script:
        poses = _read_pose_script(args.script)
    else:
        poses = trace_shape_poses(shape, params,
                                  duration_s=args.duration_s,
                                  offset_mm=args.offset_um / 1000.0)
    report = run_teleop_session(params, shape, poses, seed=args.seed)
    w = _writer(args, report, params)
    tr = report["trace"]
    w.write_spots(Trajectory(t_s=np.array(tr["t_s"]), x_mm=np.array(tr["x_mm"]),
                             y_mm=np.array(tr["y_mm"])))
    w.write_csv("poses.csv", ["t_s", "px", "py"],
                [[p.timestamp, p.p_x, p.p_y] for p in poses])
    cmds = [map_tablet(p) for p in poses]
    w.write_csv(
        "commands.csv",
        ["t_s", "level_x", "level_y", "amps_x", "amps_y"],
        [[p.timestamp, c.level_x, c.level_y, c.amps_x, c.amps_y]
         for p, c in zip(poses, cmds)],
    )
    w.meta["shape"] = shape.shape_id
    if args.save_frames:
        from .plant import SpotSample
        from .vision import FrameGeometry, render_frame, write_ppm
        geom = FrameGeometry()
        frame_dir = w.frame_dir()
        for i, (t, x, y) in enumerate(zip(tr["t_s"], tr["x_mm"], tr["y_mm"])):
            frame = render_frame(SpotSample(x_mm=x, y_mm=y,
                                            diameter_mm=params.spot_diameter_mm,
                                            t_s=t), geom)
            write_ppm(frame, os.path.join(frame_dir, f"frame{i:05d}.ppm"))
        w.meta["frame_count"] = len(tr["t_s"])
    w.write_meta()
    figures.teleop_session_figure(report, shape, w.path("session_trace.png"))
    if report["rmse_um"] is not None:
        print(f"RMSE {report['rmse_um']:.2f} um  max {report['max_um']:.2f} um  "
              f"time {report['execution_time_s']:.2f} s")
    if report["partial"]:
        print("session ended partial")
    print(f"session: {args.out}")
    return 0


def _cmd_eval(args) -> int:
    meta = read_meta(args.session)
    mode = meta.get("mode")
    spots = read_spots(args.session)
    if mode == "teleop":
        shape = make_shape(meta["shape"])
        from .harness import trim_to_band
        trimmed = trim_to_band(spots, shape)
        rep = compare_to_target(trimmed, shape.centerline())
        elapsed, moved = execution_time(spots)
        out = {
            "experiment": "eval",
            "source": mode,
            "rmse_um": rep.rmse_mm * 1000.0,
            "max_um": rep.max_error_mm * 1000.0,
            "execution_time_s": elapsed,
            "moved": moved,
        }
    else:
        raise ValidationError(f"eval supports teleop sessions, got {mode!r}")
    path = os.path.join(args.session, "report.eval.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(out, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maglaser",
                                 description="magnetic laser scanner twin")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, default_out):
        p.add_argument("--out", default=default_out, help="session directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", help="plant key=value config file")
        p.add_argument("--calibration", help="calibrated config file")

    p = sub.add_parser("calibrate", help="fit the calibrated twin parameters")
    p.add_argument("--out", default=DEFAULT_CALIBRATION)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--config", help="base plant config")
    p.set_defaults(fn=_cmd_calibrate)

    p = sub.add_parser("workspace", help="current-grid workspace mapping")
    common(p, "sessions/workspace")
    p.set_defaults(fn=_cmd_workspace)

    p = sub.add_parser("linearity", help="deviation-from-linearity sweep")
    common(p, "sessions/linearity")
    p.add_argument("--freqs",
                   default=",".join(str(f) for f in DEFAULT_SWEEP_HZ))
    p.add_argument("--line-mm", type=float, default=0.72)
    p.set_defaults(fn=_cmd_linearity)

    p = sub.add_parser("repeat", help="repeated trajectory replay")
    common(p, "sessions/repeat")
    p.add_argument("--shape", default="eight")
    p.add_argument("--traj-csv", help="replay a trajectory file (t_s,x_mm,y_mm)")
    p.add_argument("--passes", type=int, default=10)
    p.add_argument("--rate-hz", type=float, default=1.0)
    p.add_argument("--noise", choices=["calibrated", "off"], default="calibrated")
    p.set_defaults(fn=_cmd_repeat)

    p = sub.add_parser("teleop", help="teleoperation session (scripted or live)")
    common(p, "sessions/teleop")
    p.add_argument("--shape", choices=list(SHAPE_IDS), default="T1")
    p.add_argument("--port", type=int, help="serve the live WebSocket bridge")
    p.add_argument("--script", help="pose CSV (t_s,px,py) to replay")
    p.add_argument("--offset-um", type=float, default=0.0,
                   help="lateral offset for the generated centerline script")
    p.add_argument("--duration-s", type=float, default=8.78)
    p.add_argument("--save-frames", action="store_true",
                   help="persist rendered frames as PPM under frames/")
    p.set_defaults(fn=_cmd_teleop)

    p = sub.add_parser("eval", help="re-evaluate a stored session")
    p.add_argument("--session", required=True)
    p.set_defaults(fn=_cmd_eval)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except MaglaserError as exc:
        print(f"error [{exc.category}]: {exc}", file=sys.stderr)
        return 2 if exc.category in ("validation", "config") else 3


if __name__ == "__main__":
    sys.exit(main())
