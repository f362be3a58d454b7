"""Synthetic target-plane camera and the red-channel spot detector.

Frames are 8-bit RGB; the laser spot renders as an isotropic Gaussian in
the red channel (sigma = spot_diameter / 4, peak 255) over a uniform
background, with optional seeded per-pixel noise. The detector thresholds
the red channel, labels connected components, takes the largest group and
returns its intensity-weighted centroid converted to millimeters through
the pixel scale (41 px = 1 mm by default, i.e. 24.39 um/pixel).

Coordinates: frame center pixel is (0, 0) mm, x to the right, y up
(image rows grow downward).

Fixture format: binary PPM (P6) plus a JSON sidecar {"t_s": ..,
"um_per_px": ..} for bit-exact, dependency-free I/O.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy import ndimage

from .errors import (
    DomainError,
    NoSpotError,
    OutOfFrameError,
    SequencingError,
    ValidationError,
)
from .metrics import Trajectory
from .plant import SpotSample

PX_PER_MM_DEFAULT: float = 41.0
UM_PER_PX_DEFAULT: float = 1000.0 / PX_PER_MM_DEFAULT   # 24.39 um/px
FRAME_SIZE_DEFAULT: int = 181                            # covers +-2.19 mm


@dataclass(frozen=True)
class FrameGeometry:
    """Camera geometry: size in pixels and the pixel scale."""

    width: int = FRAME_SIZE_DEFAULT
    height: int = FRAME_SIZE_DEFAULT
    um_per_px: float = UM_PER_PX_DEFAULT
    background: int = 8

    def __post_init__(self):
        if self.width < 3 or self.height < 3:
            raise DomainError("frame must be at least 3x3 px")
        if not self.um_per_px > 0:
            raise DomainError("pixel scale must be > 0")
        if not 0 <= self.background <= 255:
            raise DomainError("background must be an 8-bit value")

    @property
    def mm_per_px(self) -> float:
        return self.um_per_px / 1000.0

    @property
    def center_px(self) -> tuple[float, float]:
        return (self.width - 1) / 2.0, (self.height - 1) / 2.0

    def mm_to_px(self, x_mm: float, y_mm: float) -> tuple[float, float]:
        cx, cy = self.center_px
        return cx + x_mm / self.mm_per_px, cy - y_mm / self.mm_per_px

    def px_to_mm(self, col: float, row: float) -> tuple[float, float]:
        cx, cy = self.center_px
        return (col - cx) * self.mm_per_px, (cy - row) * self.mm_per_px


@dataclass(frozen=True)
class Frame:
    """One RGB frame with its timestamp and calibration."""

    pixels: np.ndarray           # (height, width, 3) uint8
    t_s: float
    um_per_px: float

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3 or px.dtype != np.uint8:
            raise DomainError("pixels must be (H, W, 3) uint8")
        if not self.um_per_px > 0:
            raise DomainError("pixel scale must be > 0")
        object.__setattr__(self, "pixels", px)

    @property
    def geometry(self) -> FrameGeometry:
        return FrameGeometry(width=self.pixels.shape[1],
                             height=self.pixels.shape[0],
                             um_per_px=self.um_per_px)


@dataclass(frozen=True)
class DetectionConfig:
    """Red-channel threshold (fraction of 255) and component connectivity."""

    threshold: float = 0.5
    connectivity: int = 8

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise DomainError("threshold must be in (0, 1)")
        if self.connectivity not in (4, 8):
            raise DomainError("connectivity must be 4 or 8")


@dataclass(frozen=True)
class SpotDetection:
    """Detected spot: centroid (mm), component size, confidence fraction."""

    x_mm: float
    y_mm: float
    pixel_count: int
    confidence: float


def gaussian_sigma_mm(spot_diameter_mm: float) -> float:
    return spot_diameter_mm / 4.0


def render_frame(
    spot: SpotSample,
    geometry: FrameGeometry = FrameGeometry(),
    noise_seed: Optional[int] = None,
    noise_sigma: float = 0.0,
) -> Frame:
    """Draw the spot's Gaussian profile into a fresh frame.

    Deterministic per seed. Raises OutOfFrameError if the spot center is
    outside the field of view.
    """
    col0, row0 = geometry.mm_to_px(spot.x_mm, spot.y_mm)
    if not (0 <= col0 <= geometry.width - 1 and 0 <= row0 <= geometry.height - 1):
        raise OutOfFrameError(
            f"spot ({spot.x_mm:.3f}, {spot.y_mm:.3f}) mm outside the "
            f"{geometry.width}x{geometry.height} px field of view"
        )
    sigma_px = gaussian_sigma_mm(spot.diameter_mm) / geometry.mm_per_px
    red = np.full((geometry.height, geometry.width), float(geometry.background))
    # only the +-5 sigma patch carries non-negligible intensity
    reach = int(np.ceil(5.0 * sigma_px))
    r_lo = max(0, int(np.floor(row0)) - reach)
    r_hi = min(geometry.height, int(np.ceil(row0)) + reach + 1)
    c_lo = max(0, int(np.floor(col0)) - reach)
    c_hi = min(geometry.width, int(np.ceil(col0)) + reach + 1)
    rows = np.arange(r_lo, r_hi, dtype=float)
    cols = np.arange(c_lo, c_hi, dtype=float)
    rr = (rows - row0) ** 2
    cc = (cols - col0) ** 2
    patch = 255.0 * np.exp(-(rr[:, None] + cc[None, :]) / (2.0 * sigma_px ** 2))
    red[r_lo:r_hi, c_lo:c_hi] = np.maximum(red[r_lo:r_hi, c_lo:c_hi], patch)
    if noise_sigma > 0.0:
        rng = np.random.default_rng(noise_seed)
        red = red + rng.normal(0.0, noise_sigma, size=red.shape)
    pixels = np.zeros((geometry.height, geometry.width, 3), dtype=np.uint8)
    pixels[:, :, 0] = np.clip(np.rint(red), 0, 255).astype(np.uint8)
    return Frame(pixels=pixels, t_s=spot.t_s, um_per_px=geometry.um_per_px)


_STRUCTURE_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCTURE_8 = np.ones((3, 3), dtype=bool)


def detect_spot(frame: Frame, cfg: DetectionConfig = DetectionConfig()
                ) -> SpotDetection:
    """Threshold the red channel and return the largest group's centroid.

    The centroid is intensity-weighted for sub-pixel resolution; ties on
    component size break toward the smallest label (first in row-major
    scan order). Raises NoSpotError if nothing crosses the threshold.
    """
    red = frame.pixels[:, :, 0].astype(float)
    mask = red > cfg.threshold * 255.0
    if not mask.any():
        raise NoSpotError("no pixel above threshold")
    structure = _STRUCTURE_8 if cfg.connectivity == 8 else _STRUCTURE_4
    labels, n = ndimage.label(mask, structure=structure)
    counts = np.bincount(labels.ravel())
    counts[0] = 0
    best = int(np.argmax(counts))   # argmax returns the first (smallest) label
    comp = labels == best
    weights = red[comp]
    rows, cols = np.nonzero(comp)
    wsum = float(weights.sum())
    row_c = float((rows * weights).sum()) / wsum
    col_c = float((cols * weights).sum()) / wsum
    x_mm, y_mm = frame.geometry.px_to_mm(col_c, row_c)
    total_above = int(mask.sum())
    return SpotDetection(
        x_mm=x_mm,
        y_mm=y_mm,
        pixel_count=int(counts[best]),
        confidence=float(counts[best]) / total_above,
    )


def track_sequence(frames: Iterable[Frame],
                   cfg: DetectionConfig = DetectionConfig()) -> Trajectory:
    """Detect the spot in every frame and assemble a trajectory.

    Frames with no detectable spot become gaps, recorded by timestamp and
    excluded from the sample list. Timestamps must strictly increase.
    """
    ts, xs, ys, gaps = [], [], [], []
    last_t = None
    for frame in frames:
        if last_t is not None and frame.t_s <= last_t:
            raise SequencingError(
                f"frame timestamps must strictly increase ({frame.t_s} after {last_t})"
            )
        last_t = frame.t_s
        try:
            det = detect_spot(frame, cfg)
        except NoSpotError:
            gaps.append(frame.t_s)
            continue
        ts.append(frame.t_s)
        xs.append(det.x_mm)
        ys.append(det.y_mm)
    return Trajectory(t_s=np.array(ts), x_mm=np.array(xs), y_mm=np.array(ys),
                      gap_t_s=np.array(gaps))


def detect_stream(spots: Iterable[SpotSample],
                  geometry: FrameGeometry = FrameGeometry(),
                  cfg: DetectionConfig = DetectionConfig(),
                  noise_seed: Optional[int] = None,
                  noise_sigma: float = 0.0) -> Trajectory:
    """Render-and-detect each spot sample: the full camera pipeline."""
    ts, xs, ys, gaps = [], [], [], []
    seed = noise_seed
    for i, spot in enumerate(spots):
        frame = render_frame(
            spot, geometry,
            noise_seed=None if seed is None else seed + i,
            noise_sigma=noise_sigma,
        )
        try:
            det = detect_spot(frame, cfg)
        except NoSpotError:
            gaps.append(frame.t_s)
            continue
        ts.append(spot.t_s)
        xs.append(det.x_mm)
        ys.append(det.y_mm)
    return Trajectory(t_s=np.array(ts), x_mm=np.array(xs), y_mm=np.array(ys),
                      gap_t_s=np.array(gaps))


# --- PPM (P6) fixtures with JSON sidecar ------------------------------------

def write_ppm(frame: Frame, path: str) -> None:
    """Write the frame as binary PPM plus a <path>.json sidecar."""
    h, w, _ = frame.pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(frame.pixels.tobytes())
    with open(path + ".json", "w", encoding="utf-8") as fh:
        json.dump({"t_s": frame.t_s, "um_per_px": frame.um_per_px}, fh,
                  sort_keys=True)
        fh.write("\n")


def read_ppm(path: str) -> Frame:
    """Read a binary PPM written by write_ppm (sidecar required)."""
    with open(path, "rb") as fh:
        magic = fh.readline().strip()
        if magic != b"P6":
            raise ValidationError(f"{path}: not a binary PPM")
        dims = fh.readline().split()
        maxval = fh.readline().strip()
        if len(dims) != 2 or maxval != b"255":
            raise ValidationError(f"{path}: unsupported PPM header")
        w, h = int(dims[0]), int(dims[1])
        data = fh.read(w * h * 3)
    if len(data) != w * h * 3:
        raise ValidationError(f"{path}: truncated pixel data")
    sidecar = path + ".json"
    if not os.path.exists(sidecar):
        raise ValidationError(f"{path}: missing JSON sidecar")
    with open(sidecar, "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    pixels = np.frombuffer(data, dtype=np.uint8).reshape(h, w, 3)
    return Frame(pixels=pixels.copy(), t_s=float(meta["t_s"]),
                 um_per_px=float(meta["um_per_px"]))
