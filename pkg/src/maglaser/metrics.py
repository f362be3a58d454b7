"""Trajectory evaluation: nearest-point errors, RMSE, line-fit deviation,
repeatability scoring, and execution time.

The error of executed sample i against a target trajectory is the closest
distance to any target point,

    err(i) = min_k | d_m(i) - d_t(k) |,

and RMSE = sqrt(1/N * sum err(i)^2). Target polylines are densified at
5 um arc-length spacing before the minimum so the point-set distance
approximates nearest-segment distance; sparse targets would otherwise
inflate the errors. Frames with no detection are gaps: excluded from N,
never interpolated.

All distances are millimeters internally; reports render micrometers for
values under 1 mm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import ValidationError

DENSIFY_SPACING_MM: float = 0.005    # 5 um
MOTION_THRESHOLD_MM: float = 0.050   # ~2 px at 24.39 um/px


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped 2D samples (s, mm) with optional gap timestamps."""

    t_s: np.ndarray
    x_mm: np.ndarray
    y_mm: np.ndarray
    gap_t_s: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        t = np.asarray(self.t_s, dtype=float)
        x = np.asarray(self.x_mm, dtype=float)
        y = np.asarray(self.y_mm, dtype=float)
        g = np.asarray(self.gap_t_s, dtype=float)
        if not (t.shape == x.shape == y.shape) or t.ndim != 1:
            raise ValidationError("trajectory arrays must be equal-length 1D")
        if t.size and not (np.all(np.isfinite(t)) and np.all(np.isfinite(x))
                           and np.all(np.isfinite(y))):
            raise ValidationError("trajectory samples must be finite")
        if t.size > 1 and np.any(np.diff(t) <= 0.0):
            raise ValidationError("timestamps must be strictly increasing")
        object.__setattr__(self, "t_s", t)
        object.__setattr__(self, "x_mm", x)
        object.__setattr__(self, "y_mm", y)
        object.__setattr__(self, "gap_t_s", g)

    def __len__(self) -> int:
        return self.t_s.size

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x_mm, self.y_mm])

    def path_length_mm(self) -> float:
        if len(self) < 2:
            return 0.0
        return float(np.sum(np.hypot(np.diff(self.x_mm), np.diff(self.y_mm))))

    @staticmethod
    def from_points(points, t_s=None) -> "Trajectory":
        pts = np.asarray(points, dtype=float)
        if t_s is None:
            t_s = np.arange(len(pts), dtype=float)
        return Trajectory(t_s=np.asarray(t_s, dtype=float),
                          x_mm=pts[:, 0], y_mm=pts[:, 1])


@dataclass(frozen=True)
class ErrorReport:
    """Per-sample errors plus the summary statistics (all mm)."""

    errors_mm: np.ndarray
    rmse_mm: float
    max_error_mm: float
    n_samples: int

    @staticmethod
    def from_errors(errors_mm: np.ndarray) -> "ErrorReport":
        errors_mm = np.asarray(errors_mm, dtype=float)
        if errors_mm.size == 0:
            raise ValidationError("cannot build a report from zero samples")
        return ErrorReport(
            errors_mm=errors_mm,
            rmse_mm=rmse(errors_mm),
            max_error_mm=float(np.max(errors_mm)),
            n_samples=int(errors_mm.size),
        )

    def to_dict(self) -> dict:
        return {
            "rmse_mm": self.rmse_mm,
            "rmse_um": self.rmse_mm * 1000.0,
            "max_error_mm": self.max_error_mm,
            "max_error_um": self.max_error_mm * 1000.0,
            "n_samples": self.n_samples,
        }


def densify_polyline(points: np.ndarray,
                     spacing_mm: float = DENSIFY_SPACING_MM) -> np.ndarray:
    """Subdivide each polyline segment to at most the given spacing.

    Original vertices are preserved exactly, so points lying on the input
    polyline keep a zero nearest-point distance.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return pts.copy()
    pieces = [pts[:1]]
    for i in range(len(pts) - 1):
        a, b = pts[i], pts[i + 1]
        seg = float(np.hypot(b[0] - a[0], b[1] - a[1]))
        n = max(1, int(np.ceil(seg / spacing_mm)))
        frac = (np.arange(1, n + 1) / n)[:, None]
        pieces.append(a[None, :] + frac * (b - a)[None, :])
    return np.vstack(pieces)


def pointwise_error(
    executed: Trajectory,
    target: Trajectory,
    densify_mm: Optional[float] = DENSIFY_SPACING_MM,
) -> np.ndarray:
    """Closest distance (mm) from each executed sample to the target set.

    ``densify_mm=None`` compares against the raw target points.
    """
    if len(executed) == 0 or len(target) == 0:
        raise ValidationError("executed and target must be non-empty")
    tgt = target.points
    if densify_mm is not None:
        tgt = densify_polyline(tgt, densify_mm)
    tree = cKDTree(tgt)
    _, idx = tree.query(executed.points, k=1)
    diff = executed.points - tgt[idx]
    return np.hypot(diff[:, 0], diff[:, 1])


def rmse(errors_mm) -> float:
    """Root-mean-square of the per-sample errors: sqrt(1/N sum err^2)."""
    errors_mm = np.asarray(errors_mm, dtype=float)
    if errors_mm.size == 0:
        raise ValidationError("rmse of zero samples is undefined")
    return float(np.sqrt(np.mean(np.square(errors_mm))))


def compare_to_target(executed: Trajectory, target: Trajectory,
                      densify_mm: Optional[float] = DENSIFY_SPACING_MM
                      ) -> ErrorReport:
    """Full closest-distance report of executed against target."""
    return ErrorReport.from_errors(pointwise_error(executed, target, densify_mm))


def fit_line_tls(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Total-least-squares line fit: (centroid, unit direction).

    Perpendicular residuals are minimized, so the fit is equivariant under
    rigid rotations; the direction is the principal axis of the covariance.
    """
    pts = np.asarray(points, dtype=float)
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    # principal eigenvector of the 2x2 scatter matrix
    sxx = float(np.dot(centered[:, 0], centered[:, 0]))
    syy = float(np.dot(centered[:, 1], centered[:, 1]))
    sxy = float(np.dot(centered[:, 0], centered[:, 1]))
    # largest-eigenvalue direction of [[sxx, sxy], [sxy, syy]]
    theta = 0.5 * np.arctan2(2.0 * sxy, sxx - syy)
    direction = np.array([np.cos(theta), np.sin(theta)])
    return centroid, direction


def perpendicular_errors(points: np.ndarray, line_point, line_direction
                         ) -> np.ndarray:
    """Unsigned perpendicular distances of points to a given line."""
    pts = np.asarray(points, dtype=float)
    p0 = np.asarray(line_point, dtype=float)
    d = np.asarray(line_direction, dtype=float)
    d = d / np.linalg.norm(d)
    rel = pts - p0
    return np.abs(rel[:, 0] * (-d[1]) + rel[:, 1] * d[0])


def deviation_from_linearity(traj: Trajectory) -> ErrorReport:
    """RMSE of the samples about their own total-least-squares line fit.

    This is the scan-quality metric: errors are perpendicular distances to
    the fitted reference line.
    """
    if len(traj) < 3:
        raise ValidationError("need at least 3 samples for a line fit")
    pts = traj.points
    span = np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))
    if span <= 0.010:
        raise ValidationError(f"points span {span * 1000:.1f} um <= 10 um; "
                              "degenerate line fit")
    centroid, direction = fit_line_tls(pts)
    return ErrorReport.from_errors(perpendicular_errors(pts, centroid, direction))


def repeatability(passes: Sequence[Trajectory],
                  densify_mm: Optional[float] = DENSIFY_SPACING_MM
                  ) -> tuple[list[ErrorReport], dict]:
    """Score passes 2..n against pass 1 as the reference trajectory.

    Returns the per-pass reports plus a summary with the mean and standard
    deviation of the per-pass RMSE values.
    """
    if len(passes) < 2:
        raise ValidationError("repeatability needs at least 2 passes")
    reference = passes[0]
    reports = [compare_to_target(p, reference, densify_mm) for p in passes[1:]]
    vals = np.array([r.rmse_mm for r in reports])
    summary = {
        "mean_rmse_mm": float(vals.mean()),
        "std_rmse_mm": float(vals.std()),
        "n_passes": len(passes),
    }
    return reports, summary


def execution_time(traj: Trajectory,
                   motion_threshold_mm: float = MOTION_THRESHOLD_MM
                   ) -> tuple[float, bool]:
    """Elapsed time between motion onset and the last motion.

    Motion onset is the first sample displaced more than the threshold
    from the initial position; the end is the last sample displaced more
    than the threshold from the final rest position. Returns (seconds,
    moved); a trajectory with no motion above threshold reports 0 with
    moved=False.
    """
    if len(traj) == 0:
        raise ValidationError("trajectory is empty")
    pts = traj.points
    from_start = np.hypot(pts[:, 0] - pts[0, 0], pts[:, 1] - pts[0, 1])
    from_end = np.hypot(pts[:, 0] - pts[-1, 0], pts[:, 1] - pts[-1, 1])
    moving_start = np.nonzero(from_start > motion_threshold_mm)[0]
    moving_end = np.nonzero(from_end > motion_threshold_mm)[0]
    if moving_start.size == 0 or moving_end.size == 0:
        return 0.0, False
    t_first = float(traj.t_s[moving_start[0]])
    t_last = float(traj.t_s[moving_end[-1]])
    if t_last <= t_first:
        return 0.0, False
    return t_last - t_first, True
