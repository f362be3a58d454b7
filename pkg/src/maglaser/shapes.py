"""Procedural target shapes for trajectory tasks.

T1/T4 are s-curves (cubic Bezier arcs), T2/T5 are c-curves (circular
arcs) and T3 is a straight line, all scaled to the 4x4 mm workspace with
a 0.25 mm tracing band. The figure-eight used for repeatability is a 2:1
Lissajous. Every generator emits a constant-speed arc-length
parameterization, since the source hardware's replay pacing is otherwise
unspecified.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .metrics import Trajectory, densify_polyline

BAND_HALFWIDTH_MM: float = 0.25
SHAPE_IDS = ("T1", "T2", "T3", "T4", "T5")


@dataclass(frozen=True)
class TargetShape:
    """A named target polyline (mm) with its tracing band halfwidth."""

    shape_id: str
    points_mm: np.ndarray
    band_halfwidth_mm: float = BAND_HALFWIDTH_MM

    def __post_init__(self):
        pts = np.asarray(self.points_mm, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise ValidationError("shape needs an (N, 2) polyline")
        object.__setattr__(self, "points_mm", pts)

    def centerline(self) -> Trajectory:
        return Trajectory.from_points(self.points_mm)

    def path_length_mm(self) -> float:
        return float(np.sum(np.hypot(*np.diff(self.points_mm, axis=0).T)))

    def offset_polyline(self, offset_mm: float) -> np.ndarray:
        """Centerline shifted by a constant lateral offset along the
        local normal (positive = left of travel)."""
        pts = self.points_mm
        tangents = np.gradient(pts, axis=0)
        norms = np.hypot(tangents[:, 0], tangents[:, 1])
        tangents = tangents / norms[:, None]
        normals = np.column_stack([-tangents[:, 1], tangents[:, 0]])
        return pts + offset_mm * normals

    def to_dict(self) -> dict:
        return {
            "id": self.shape_id,
            "points_mm": [[float(x), float(y)] for x, y in self.points_mm],
            "band_mm": self.band_halfwidth_mm,
        }


def _arclength_resample(points: np.ndarray, n: int) -> np.ndarray:
    """Resample a polyline to n points at uniform arc-length spacing."""
    dense = densify_polyline(points, spacing_mm=0.002)
    seg = np.hypot(*np.diff(dense, axis=0).T)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    si = np.linspace(0.0, s[-1], n)
    return np.column_stack([np.interp(si, s, dense[:, 0]),
                            np.interp(si, s, dense[:, 1])])


def _bezier(p0, p1, p2, p3, n: int = 400) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)[:, None]
    p0, p1, p2, p3 = (np.asarray(p, dtype=float) for p in (p0, p1, p2, p3))
    return ((1 - t) ** 3 * p0 + 3 * (1 - t) ** 2 * t * p1
            + 3 * (1 - t) * t ** 2 * p2 + t ** 3 * p3)


def _arc(center, radius: float, start_deg: float, end_deg: float,
         n: int = 400) -> np.ndarray:
    ang = np.radians(np.linspace(start_deg, end_deg, n))
    cx, cy = center
    return np.column_stack([cx + radius * np.cos(ang), cy + radius * np.sin(ang)])


def make_shape(shape_id: str, n_points: int = 200,
               band_halfwidth_mm: float = BAND_HALFWIDTH_MM) -> TargetShape:
    """Build one of the five target shapes, fitted to the workspace."""
    sid = shape_id.upper()
    if sid == "T1":      # s-curve, rising left to right
        raw = _bezier((-1.4, -1.1), (0.6, -1.1), (-0.6, 1.1), (1.4, 1.1))
    elif sid == "T4":    # s-curve, mirrored
        raw = _bezier((-1.4, 1.1), (0.6, 1.1), (-0.6, -1.1), (1.4, -1.1))
    elif sid == "T2":    # c-curve opening right
        raw = _arc((0.4, 0.0), 1.25, 110.0, 250.0)
    elif sid == "T5":    # c-curve opening left
        raw = _arc((-0.4, 0.0), 1.25, -70.0, 70.0)
    elif sid == "T3":    # straight line
        raw = np.array([[-1.5, 0.0], [1.5, 0.0]])
    else:
        raise ValidationError(f"unknown shape id {shape_id!r}; expected T1..T5")
    return TargetShape(shape_id=sid, points_mm=_arclength_resample(raw, n_points),
                       band_halfwidth_mm=band_halfwidth_mm)


def figure_eight(width_mm: float = 1.2, height_mm: float = 2.4,
                 n_points: int = 400) -> Trajectory:
    """Closed figure-eight through the origin, constant-speed timestamps.

    A 2:1 Lissajous: x = (w/2) sin(4 pi s), y = (h/2) sin(2 pi s). The
    returned timestamps span [0, 1] s, i.e. one pass at 1 Hz; replay
    rescales them to the requested rate.
    """
    s = np.linspace(0.0, 1.0, 4 * n_points)
    pts = np.column_stack([0.5 * width_mm * np.sin(4.0 * np.pi * s),
                           0.5 * height_mm * np.sin(2.0 * np.pi * s)])
    resampled = _arclength_resample(pts, n_points)
    t = np.linspace(0.0, 1.0, n_points)
    return Trajectory(t_s=t, x_mm=resampled[:, 0], y_mm=resampled[:, 1])
