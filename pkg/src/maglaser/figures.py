"""Report figures rendered to files next to the delimited output.

One function per experiment; each takes the experiment's report dict and
writes a PNG. Uses the Agg backend so sessions render headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .shapes import TargetShape

_DPI = 130


def _new_axes(title: str, xlabel: str, ylabel: str, square: bool = False):
    fig, ax = plt.subplots(figsize=(5.2, 4.2) if not square else (4.6, 4.6))
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def workspace_map_figure(report: dict, path: str) -> str:
    """Spot positions for the current grid; reference point circled."""
    good = [r for r in report["points"] if r.get("ok")]
    xs = [r["x_mm"] for r in good]
    ys = [r["y_mm"] for r in good]
    fig, ax = _new_axes("Workspace map", "x (mm)", "y (mm)", square=True)
    ax.scatter(xs, ys, s=24, color="tab:red", zorder=3)
    ref = [r for r in good if r["level_x"] == 0 and r["level_y"] == 0]
    if ref:
        ax.scatter([ref[0]["x_mm"]], [ref[0]["y_mm"]], s=120, facecolors="none",
                   edgecolors="black", linewidths=1.5, zorder=4,
                   label="reference (I=0)")
        ax.legend(loc="upper right", fontsize=8)
    ax.set_aspect("equal")
    return _save(fig, path)


def current_displacement_figure(report: dict, path: str) -> str:
    """Per-axis current-displacement plots with their linear fits."""
    fig, axes = plt.subplots(1, 2, figsize=(8.4, 3.8))
    for ax, axis in zip(axes, ("x", "y")):
        other = "level_y" if axis == "x" else "level_x"
        pts = [r for r in report["points"] if r.get("ok") and r[other] == 0]
        amps = np.array([r[f"amps_{axis}"] for r in pts])
        disp = np.array([r[f"{axis}_mm"] for r in pts])
        ax.plot(amps, disp, "o", color="tab:blue")
        fit = report.get(f"fit_{axis}")
        if fit:
            xx = np.linspace(amps.min(), amps.max(), 50)
            ax.plot(xx, fit["slope_mm_per_a"] * xx + fit["intercept_mm"], "-",
                    color="tab:orange",
                    label=f"{fit['slope_mm_per_a']:.2f} mm/A, R²={fit['r2']:.5f}")
            ax.legend(fontsize=8)
        ax.set_xlabel(f"I_{axis} (A)")
        ax.set_ylabel(f"d_{axis} (mm)")
        ax.grid(True, alpha=0.3)
    return _save(fig, path)


def linearity_sweep_figure(report: dict, path: str) -> str:
    """Deviation RMSE versus excitation frequency."""
    rows = report["rows"]
    f = [r["f_hz"] for r in rows]
    rmse = [r["rmse_um"] for r in rows]
    fig, ax = _new_axes("Deviation from linearity", "frequency (Hz)",
                        "RMSE (um)")
    ax.plot(f, rmse, "o-", color="tab:red")
    ax.axhline(report["stability_budget_um"], color="gray", linestyle="--",
               linewidth=1, label=f"{report['stability_budget_um']:.0f} um budget")
    if report.get("stable_limit_hz"):
        ax.axvline(report["stable_limit_hz"], color="tab:green", linestyle=":",
                   linewidth=1,
                   label=f"stable to {report['stable_limit_hz']:.0f} Hz")
    ax.legend(fontsize=8)
    return _save(fig, path)


def repeatability_figure(report: dict, path: str) -> str:
    """Overlay of all captured passes."""
    fig, ax = _new_axes(
        f"Repeatability: {report['passes']} passes", "x (mm)", "y (mm)",
        square=True)
    for k, p in enumerate(report["pass_points"]):
        ax.plot(p["x_mm"], p["y_mm"], linewidth=0.7, alpha=0.8,
                label=f"pass {k + 1}" if k < 2 else None)
    ax.legend(fontsize=8)
    ax.set_aspect("equal")
    return _save(fig, path)


def teleop_session_figure(report: dict, shape: TargetShape, path: str) -> str:
    """Executed trace over the target shape band."""
    fig, ax = _new_axes(f"Teleop session: {report['shape']}", "x (mm)",
                        "y (mm)", square=True)
    band = shape.band_halfwidth_mm
    for off in (-band, band):
        edge = shape.offset_polyline(off)
        ax.plot(edge[:, 0], edge[:, 1], color="gray", linewidth=0.8)
    ax.plot(shape.points_mm[:, 0], shape.points_mm[:, 1], color="black",
            linewidth=1.0, label="target centerline")
    tr = report["trace"]
    ax.plot(tr["x_mm"], tr["y_mm"], ".", color="tab:red", markersize=2,
            label="executed")
    if report.get("rmse_um") is not None:
        ax.set_title(f"{report['shape']}: RMSE {report['rmse_um']:.1f} um, "
                     f"max {report['max_um']:.1f} um, "
                     f"{report['execution_time_s']:.2f} s")
    ax.legend(fontsize=8)
    ax.set_aspect("equal")
    return _save(fig, path)
