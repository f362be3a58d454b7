"""Session persistence: one directory per experiment run.

Layout:
    <dir>/meta.json       mode, seed, config hash, parameters
    <dir>/commands.csv    t_s,level_x,level_y,amps_x,amps_y
    <dir>/spots.csv       t_s,x_mm,y_mm (measured spot trajectory)
    <dir>/report.json     metric report
    <dir>/frames/*.ppm    optional raw frames (+ JSON sidecars)
    <dir>/*.png           report figures

Nothing in a session carries wall-clock time; runs with the same seed and
config serialize byte-identically.
"""

from __future__ import annotations

import csv
import json
import os
from typing import Optional

import numpy as np

from .errors import ValidationError
from .metrics import Trajectory
from .plant import PlantParams, save_params


def _fmt(x: float) -> str:
    return repr(float(x))


class SessionWriter:
    """Accumulates one session on disk. Single-owner, not thread-safe."""

    def __init__(self, directory: str, meta: dict):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)
        self.meta = dict(meta)
        self._frame_count = 0

    def path(self, name: str) -> str:
        return os.path.join(self.directory, name)

    def write_meta(self) -> None:
        with open(self.path("meta.json"), "w", encoding="utf-8") as fh:
            json.dump(self.meta, fh, sort_keys=True, indent=2)
            fh.write("\n")

    def write_params(self, params: PlantParams, header: str = "") -> None:
        save_params(params, self.path("plant.cfg"), header=header)

    def write_commands(self, t_s, levels, amps) -> None:
        t_s = np.asarray(t_s)
        levels = np.asarray(levels)
        amps = np.asarray(amps)
        with open(self.path("commands.csv"), "w", newline="",
                  encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t_s", "level_x", "level_y", "amps_x", "amps_y"])
            for i in range(len(t_s)):
                w.writerow([_fmt(t_s[i]), int(levels[i, 0]), int(levels[i, 1]),
                            _fmt(amps[i, 0]), _fmt(amps[i, 1])])

    def write_spots(self, traj: Trajectory, name: str = "spots.csv") -> None:
        with open(self.path(name), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t_s", "x_mm", "y_mm"])
            for i in range(len(traj)):
                w.writerow([_fmt(traj.t_s[i]), _fmt(traj.x_mm[i]),
                            _fmt(traj.y_mm[i])])

    def write_report(self, report: dict) -> None:
        with open(self.path("report.json"), "w", encoding="utf-8") as fh:
            json.dump(report, fh, sort_keys=True, indent=2)
            fh.write("\n")

    def write_csv(self, name: str, header: list[str], rows: list[list]) -> None:
        with open(self.path(name), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow(row)

    def frame_dir(self) -> str:
        d = self.path("frames")
        os.makedirs(d, exist_ok=True)
        return d


def read_report(directory: str) -> dict:
    with open(os.path.join(directory, "report.json"), "r", encoding="utf-8") as fh:
        return json.load(fh)


def read_meta(directory: str) -> dict:
    with open(os.path.join(directory, "meta.json"), "r", encoding="utf-8") as fh:
        return json.load(fh)


def load_trajectory_csv(path: str) -> Trajectory:
    """Read a trajectory file (header t_s,x_mm,y_mm, monotone t)."""
    if not os.path.exists(path):
        raise ValidationError(f"{path} not found")
    ts, xs, ys = [], [], []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or \
                not {"t_s", "x_mm", "y_mm"} <= set(reader.fieldnames):
            raise ValidationError(f"{path}: expected header t_s,x_mm,y_mm")
        for row in reader:
            ts.append(float(row["t_s"]))
            xs.append(float(row["x_mm"]))
            ys.append(float(row["y_mm"]))
    return Trajectory(t_s=np.array(ts), x_mm=np.array(xs), y_mm=np.array(ys))


def read_spots(directory: str, name: str = "spots.csv") -> Trajectory:
    return load_trajectory_csv(os.path.join(directory, name))


def append_batch_row(path: str, trial: int, subject: str, rmse_um: float,
                     max_um: float, time_s: float) -> None:
    """Append one aggregate row (trial,subject,rmse_um,max_um,time_s)."""
    new = not os.path.exists(path)
    with open(path, "a", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(["trial", "subject", "rmse_um", "max_um", "time_s"])
        w.writerow([trial, subject, _fmt(rmse_um), _fmt(max_um), _fmt(time_s)])


def session_fingerprint(directory: str,
                        names: Optional[list[str]] = None) -> dict[str, bytes]:
    """Raw bytes of the session's report artifacts, for determinism checks."""
    if names is None:
        names = sorted(
            n for n in os.listdir(directory)
            if n.endswith((".json", ".csv", ".cfg"))
        )
    out = {}
    for n in names:
        with open(os.path.join(directory, n), "rb") as fh:
            out[n] = fh.read()
    return out
