"""Command generation: tablet mapping, DAC quantization, scan waveforms,
trajectory replay, and the operating-mode machine.

The current driver exposes 4096 levels per axis over [-2047, +2048],
mapped linearly to amperes with one LSB = I_MAX / 2047. Level +2048 is
reachable only through saturation; its amperes value is clamped to the
hardware limit. Tablet poses live in [-1, 1]^2 and are scaled to levels
by a 2x2 mapping matrix (diagonal c = 2047 in the aligned setup).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import BusyError, DomainError, ValidationError

I_MAX_A: float = 0.165          # copper-wire current limit, amperes
LEVEL_MIN: int = -2047
LEVEL_MAX: int = 2048
LSB_A: float = I_MAX_A / 2047.0  # amperes per DAC level
C_DEFAULT: float = 2047.0        # aligned-setup mapping scalar
TICK_RATE_HZ: float = 4000.0     # command rate of the control board
TICK_DT_S: float = 1.0 / TICK_RATE_HZ
MODE_RAMP_S: float = 0.050       # current ramp-to-zero on mode transitions


def _round_half_away(x: float) -> int:
    """Round half away from zero (preserves odd symmetry about 0)."""
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def quantize_level(x: float) -> int:
    """Quantize a real-valued level to the DAC range, saturating."""
    if not np.isfinite(x):
        raise DomainError(f"level must be finite, got {x!r}")
    return max(LEVEL_MIN, min(LEVEL_MAX, _round_half_away(x)))


def level_to_amps(level: int) -> float:
    """Amperes for a DAC level; |amps| clamps to the hardware limit."""
    return max(-I_MAX_A, min(I_MAX_A, level * LSB_A))


@dataclass(frozen=True)
class CurrentCommand:
    """Quantized two-axis coil command, in DAC levels and amperes."""

    level_x: int
    level_y: int
    amps_x: float = field(init=False)
    amps_y: float = field(init=False)

    def __post_init__(self):
        for lv in (self.level_x, self.level_y):
            if not (LEVEL_MIN <= lv <= LEVEL_MAX):
                raise DomainError(f"DAC level {lv} outside [{LEVEL_MIN}, {LEVEL_MAX}]")
        object.__setattr__(self, "amps_x", level_to_amps(self.level_x))
        object.__setattr__(self, "amps_y", level_to_amps(self.level_y))

    @staticmethod
    def from_levels(lx: float, ly: float) -> "CurrentCommand":
        return CurrentCommand(quantize_level(lx), quantize_level(ly))

    @staticmethod
    def from_amps(ix: float, iy: float) -> "CurrentCommand":
        return CurrentCommand.from_levels(ix / LSB_A, iy / LSB_A)


ZERO_COMMAND = CurrentCommand(0, 0)


@dataclass(frozen=True)
class TabletPose:
    """Absolute tablet position in [-1, 1]^2 with a timestamp (s)."""

    p_x: float
    p_y: float
    timestamp: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.p_x) and np.isfinite(self.p_y)):
            raise DomainError("tablet pose must be finite")
        object.__setattr__(self, "p_x", max(-1.0, min(1.0, self.p_x)))
        object.__setattr__(self, "p_y", max(-1.0, min(1.0, self.p_y)))


@dataclass(frozen=True)
class MappingMatrix:
    """Tablet-to-level mapping [[c11, c12], [c21, c22]].

    The aligned experimental setup uses c12 = c21 = 0 and c11 = c22 = c.
    """

    c11: float = C_DEFAULT
    c12: float = 0.0
    c21: float = 0.0
    c22: float = C_DEFAULT

    def __post_init__(self):
        for v in (self.c11, self.c12, self.c21, self.c22):
            if not np.isfinite(v):
                raise DomainError("mapping matrix entries must be finite")

    @staticmethod
    def aligned(c: float = C_DEFAULT) -> "MappingMatrix":
        return MappingMatrix(c11=c, c22=c)


def map_tablet(pose: TabletPose, matrix: MappingMatrix = MappingMatrix()) -> CurrentCommand:
    """Map a tablet pose to a quantized current command (saturating)."""
    lx = matrix.c11 * pose.p_x + matrix.c12 * pose.p_y
    ly = matrix.c21 * pose.p_x + matrix.c22 * pose.p_y
    return CurrentCommand.from_levels(lx, ly)


class ScanAxis(Enum):
    X = "x"
    Y = "y"
    XY = "xy"   # both axes driven with the same waveform (diagonal line)


@dataclass(frozen=True)
class ScanWaveform:
    """Sinusoidal scan current i(t) = A sin(2 pi f t + phase), in DAC levels."""

    amplitude_levels: float
    frequency_hz: float
    axis: ScanAxis = ScanAxis.X
    phase_rad: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.frequency_hz) and self.frequency_hz > 0.0):
            raise DomainError("scan frequency must be > 0")
        if not (0.0 <= abs(self.amplitude_levels) <= LEVEL_MAX):
            raise DomainError("scan amplitude outside the DAC range")

    @staticmethod
    def for_line(line_mm: float, frequency_hz: float, gain_mm_per_a: float,
                 axis: ScanAxis = ScanAxis.X) -> "ScanWaveform":
        """Waveform whose quasi-static spot path is a line of the given
        peak-to-peak length (mm)."""
        amp_mm = 0.5 * line_mm
        amp_levels = amp_mm / gain_mm_per_a / LSB_A
        return ScanWaveform(amplitude_levels=amp_levels, frequency_hz=frequency_hz,
                            axis=axis)


def waveform_sample(w: ScanWaveform, t: float) -> CurrentCommand:
    """Sample the scan sinusoid at time t (s) and quantize to DAC levels."""
    if t < 0.0 or not np.isfinite(t):
        raise DomainError("t must be finite and >= 0")
    level = w.amplitude_levels * math.sin(2.0 * math.pi * w.frequency_hz * t
                                          + w.phase_rad)
    if w.axis is ScanAxis.X:
        return CurrentCommand.from_levels(level, 0.0)
    if w.axis is ScanAxis.Y:
        return CurrentCommand.from_levels(0.0, level)
    return CurrentCommand.from_levels(level, level)


def commanded_path_speed(w: ScanWaveform, gain_mm_per_a: float) -> float:
    """Average spot speed (mm/s) of the commanded, quasi-static scan path.

    One period covers the peak-to-peak line twice, so the speed is
    2 * line_length * f. This deliberately ignores dynamic magnification;
    the harness reports the measured speed separately.
    """
    line_mm = 2.0 * abs(w.amplitude_levels) * LSB_A * gain_mm_per_a
    return 2.0 * line_mm * w.frequency_hz


def replay_levels(
    times_s: np.ndarray,
    xs_mm: np.ndarray,
    ys_mm: np.ndarray,
    gain_mm_per_a: float,
    optics_scale: float = 1.0,
    workspace_halfwidth_mm: float = 2.0,
) -> np.ndarray:
    """Quasi-static inverse-plant feedforward levels on the 4 kHz grid.

    The waypoint list is validated against the workspace before anything
    is emitted, then resampled to the control grid by linear interpolation
    and quantized. Returns an (n_ticks, 2) int array of levels.
    """
    times_s = np.asarray(times_s, dtype=float)
    xs_mm = np.asarray(xs_mm, dtype=float)
    ys_mm = np.asarray(ys_mm, dtype=float)
    if times_s.size == 0:
        raise ValidationError("trajectory is empty")
    if np.any(np.diff(times_s) <= 0) and times_s.size > 1:
        raise ValidationError("trajectory timestamps must be strictly increasing")
    tip_x = xs_mm / optics_scale
    tip_y = ys_mm / optics_scale
    if np.max(np.abs(tip_x), initial=0.0) > workspace_halfwidth_mm or \
       np.max(np.abs(tip_y), initial=0.0) > workspace_halfwidth_mm:
        raise ValidationError("trajectory waypoint outside the workspace")
    duration = times_s[-1] - times_s[0]
    n_ticks = max(1, int(round(duration * TICK_RATE_HZ)) + 1)
    grid = times_s[0] + np.arange(n_ticks) * TICK_DT_S
    gx = np.interp(grid, times_s, tip_x)
    gy = np.interp(grid, times_s, tip_y)
    levels = np.empty((n_ticks, 2), dtype=np.int64)
    for i in range(n_ticks):
        levels[i, 0] = quantize_level(gx[i] / gain_mm_per_a / LSB_A)
        levels[i, 1] = quantize_level(gy[i] / gain_mm_per_a / LSB_A)
    return levels


def replay_trajectory(
    times_s,
    xs_mm,
    ys_mm,
    passes: int,
    rate_hz: float,
    gain_mm_per_a: float,
    optics_scale: float = 1.0,
    workspace_halfwidth_mm: float = 2.0,
) -> Iterator[CurrentCommand]:
    """Command stream traversing the trajectory `passes` times at rate_hz.

    One full pass takes 1/rate_hz seconds; pass k's subsequence is
    identical to pass 1's. The input trajectory's own timestamps only set
    the *shape-internal* pacing; they are rescaled to the pass duration.
    """
    if passes < 1:
        raise ValidationError("passes must be >= 1")
    if not (np.isfinite(rate_hz) and rate_hz > 0.0):
        raise ValidationError("rate must be > 0")
    times_s = np.asarray(times_s, dtype=float)
    if times_s.size == 0:
        raise ValidationError("trajectory is empty")
    if times_s.size == 1:
        scaled = np.array([0.0])
    else:
        span = times_s[-1] - times_s[0]
        if span <= 0:
            raise ValidationError("trajectory needs a positive time span")
        scaled = (times_s - times_s[0]) / span / rate_hz
    levels = replay_levels(scaled, xs_mm, ys_mm, gain_mm_per_a,
                           optics_scale, workspace_halfwidth_mm)
    for _ in range(passes):
        for lx, ly in levels:
            yield CurrentCommand(int(lx), int(ly))


# --- operating-mode machine -------------------------------------------------

class Mode(Enum):
    IDLE = "idle"
    HIGH_SPEED_SCAN = "high_speed_scan"
    TRAJECTORY_REPLAY = "trajectory_replay"
    TELEOPERATION = "teleoperation"


@dataclass
class ModeMachine:
    """Explicit mode machine; transitions pass through idle with a ramp.

    The machine owns no thread: callers drive it from the control tick.
    A transition out of an active mode while it is still running raises
    BusyError; stopping first (``stop_active``) is required. Transitions
    emit a ramp plan taking the last command linearly to zero over 50 ms.
    """

    mode: Mode = Mode.IDLE
    active: bool = False
    last_command: CurrentCommand = ZERO_COMMAND
    rest_velocity_threshold_mm_s: float = 0.5

    def ramp_to_zero(self) -> list[CurrentCommand]:
        n = int(round(MODE_RAMP_S * TICK_RATE_HZ))
        lx, ly = self.last_command.level_x, self.last_command.level_y
        plan = []
        for k in range(1, n + 1):
            frac = 1.0 - k / n
            plan.append(CurrentCommand.from_levels(lx * frac, ly * frac))
        return plan

    def stop_active(self) -> list[CurrentCommand]:
        """Stop the running mode; returns the ramp-down command plan."""
        plan = self.ramp_to_zero() if self.active else []
        self.active = False
        self.mode = Mode.IDLE
        self.last_command = ZERO_COMMAND
        return plan

    def request(self, requested: Mode,
                plant_velocity_mm_s: Optional[Sequence[float]] = None
                ) -> list[CurrentCommand]:
        """Switch to the requested mode, returning the transition ramp plan.

        Raises BusyError if another mode is still active. Entering
        TRAJECTORY_REPLAY additionally requires the plant to be at rest or
        decaying (velocity below threshold).
        """
        if self.active and requested is not self.mode:
            raise BusyError(f"{self.mode.value} still active; stop it first")
        if requested is Mode.TRAJECTORY_REPLAY and plant_velocity_mm_s is not None:
            if max(abs(float(v)) for v in plant_velocity_mm_s) > \
                    self.rest_velocity_threshold_mm_s:
                raise BusyError("plant not at rest; replay transition refused")
        plan = self.ramp_to_zero() if self.last_command != ZERO_COMMAND else []
        self.mode = requested
        self.active = requested is not Mode.IDLE
        self.last_command = ZERO_COMMAND
        return plan

    def note_command(self, cmd: CurrentCommand) -> None:
        self.last_command = cmd


class PoseMailbox:
    """Most-recent-wins mailbox between async pose ingress and the tick owner.

    ``post`` may be called from any thread; ``latest`` returns the newest
    pose without consuming it (teleoperation holds the last value when the
    stylus lifts, so there is nothing to clear).
    """

    def __init__(self):
        self._pose: Optional[TabletPose] = None

    def post(self, pose: TabletPose) -> None:
        self._pose = pose

    def latest(self) -> Optional[TabletPose]:
        return self._pose
