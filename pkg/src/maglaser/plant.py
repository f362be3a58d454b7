"""Current-to-spot plant: two second-order fiber-bending axes plus the
optical projection onto the target plane.

Each axis obeys

    d'' + 2*zeta*w_n*d' + w_n^2*d = w_n^2 * e(t),      w_n = 2*pi*f_n

where d is the spot-equivalent deflection (mm) and e(t) is the equivalent
command in mm: gain * current for that axis, plus (in the calibrated twin)
a resonant cross-axis coupling term kappa * d_o * v_o^2 / w_n^2 from the
other axis that models whirl onset: fast in-plane motion pumps the
perpendicular bending plane. The coupling is quadratic in velocity, so it
vanishes at DC and is negligible at hand speeds, and it is identically
zero in the default configuration.

Integration is fixed-step semi-implicit Euler at 0.25 ms (the 4 kHz
command rate): deterministic, symplectic in the undamped limit, stable for
the stiffest configured natural frequency.

The aggregate gain is calibrated, not derived: only the current-to-spot
slope is identifiable from the hardware, so the magnetostatics module
informs the model structure but not these parameters.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional, TextIO

import numpy as np

from .control import TICK_DT_S, CurrentCommand, I_MAX_A
from .errors import ConfigError, DomainError, SaturationError, WorkspaceExceededError

SOFT_CLAMP_FACTOR: float = 1.1   # error beyond halfwidth * this factor

DEFAULT_GAIN_MM_PER_A: float = 2.0 / I_MAX_A     # 4x4 mm workspace at +-0.165 A
DEFAULT_NATURAL_FREQUENCY_HZ: float = 63.0
DEFAULT_DAMPING_RATIO: float = 0.05


@dataclass(frozen=True)
class PlantParams:
    """Plant configuration; immutable and freely shareable.

    The lens focal lengths are recorded as metadata only: the measured
    current-to-position map already subsumes the optical gain, so no ray
    tracing is performed (optics_scale stays at 1.0 unless recalibrated).
    """

    gain_mm_per_a: float = DEFAULT_GAIN_MM_PER_A
    natural_frequency_hz: float = DEFAULT_NATURAL_FREQUENCY_HZ
    damping_ratio: float = DEFAULT_DAMPING_RATIO
    working_distance_mm: float = 30.0
    spot_diameter_mm: float = 0.57
    workspace_halfwidth_mm: float = 2.0
    optics_scale: float = 1.0
    dt_s: float = TICK_DT_S
    # Calibrated-twin extensions (all inert at their defaults)
    cross_coupling_mm2: float = 0.0     # kappa: whirl-onset cross-axis coupling
    current_noise_a: float = 0.0        # per-tick zero-mean current noise sigma
    # Per-axis, per-sign gain perturbations (manufacturing asymmetry); off by default
    gain_asym_x_pos: float = 1.0
    gain_asym_x_neg: float = 1.0
    gain_asym_y_pos: float = 1.0
    gain_asym_y_neg: float = 1.0
    # Optics metadata (not used in the projection)
    collimating_focal_mm: float = 12.5
    focusing_focal_mm: float = 30.0

    def __post_init__(self):
        if not self.gain_mm_per_a > 0:
            raise ConfigError("gain must be > 0")
        if not self.natural_frequency_hz > 0:
            raise ConfigError("natural frequency must be > 0")
        if not 0.0 < self.damping_ratio < 1.0:
            raise ConfigError("damping ratio must be in (0, 1)")
        if not self.working_distance_mm > 0:
            raise ConfigError("working distance must be > 0")
        if not self.workspace_halfwidth_mm > 0:
            raise ConfigError("workspace halfwidth must be > 0")
        if not 0.0 < self.dt_s <= 1e-3:
            raise ConfigError("dt must be in (0, 1] ms")

    @property
    def omega_n(self) -> float:
        return 2.0 * math.pi * self.natural_frequency_hz

    @property
    def soft_clamp_mm(self) -> float:
        return SOFT_CLAMP_FACTOR * self.workspace_halfwidth_mm

    def magnitude_response(self, f_hz: float) -> float:
        """Closed-form |H(j 2 pi f)| of one axis, normalized to 1 at DC."""
        r = f_hz / self.natural_frequency_hz
        return 1.0 / math.sqrt((1.0 - r * r) ** 2
                               + (2.0 * self.damping_ratio * r) ** 2)

    def config_text(self) -> str:
        """Canonical key=value serialization (field order, repr floats)."""
        lines = []
        for f in fields(self):
            lines.append(f"{f.name}={getattr(self, f.name)!r}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.config_text().encode()).hexdigest()


_PARAM_TYPES = {f.name: f.type for f in fields(PlantParams)}


def load_params(path_or_file) -> PlantParams:
    """Load PlantParams from a plain-text key=value file ('#' comments)."""
    if hasattr(path_or_file, "read"):
        text = path_or_file.read()
    else:
        with open(path_or_file, "r", encoding="utf-8") as fh:
            text = fh.read()
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _PARAM_TYPES:
            raise ConfigError(f"line {lineno}: unknown parameter {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad number {val!r}") from exc
    return PlantParams(**values)


def save_params(params: PlantParams, path_or_file, header: str = "") -> None:
    """Write PlantParams as a commented key=value config file."""
    def _write(fh: TextIO):
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        fh.write(params.config_text())

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", encoding="utf-8") as fh:
            _write(fh)


@dataclass(frozen=True)
class PlantState:
    """Per-axis deflection (mm) and velocity (mm/s) at time t (s)."""

    d: np.ndarray = field(default_factory=lambda: np.zeros(2))
    v: np.ndarray = field(default_factory=lambda: np.zeros(2))
    t: float = 0.0

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if d.shape != (2,) or v.shape != (2,) or not (
            np.all(np.isfinite(d)) and np.all(np.isfinite(v)) and np.isfinite(self.t)
        ):
            raise DomainError("plant state must be two finite axes")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "v", v)

    @staticmethod
    def rest() -> "PlantState":
        return PlantState()


@dataclass(frozen=True)
class SpotSample:
    """Observable on the target plane: position (mm), diameter, time."""

    x_mm: float
    y_mm: float
    diameter_mm: float
    t_s: float


def _effective_gain(params: PlantParams, axis: int, current: float) -> float:
    g = params.gain_mm_per_a
    if axis == 0:
        return g * (params.gain_asym_x_pos if current >= 0 else params.gain_asym_x_neg)
    return g * (params.gain_asym_y_pos if current >= 0 else params.gain_asym_y_neg)


def step(
    params: PlantParams,
    state: PlantState,
    command: CurrentCommand,
    dt: Optional[float] = None,
    rng: Optional[np.random.Generator] = None,
) -> PlantState:
    """Advance the plant one fixed step under the given command.

    Deterministic: identical inputs (and RNG state) give bit-identical
    outputs. Raises WorkspaceExceededError if an axis crosses the soft
    clamp, and ConfigError for an out-of-range dt.
    """
    h = params.dt_s if dt is None else dt
    if not 0.0 < h <= 1e-3:
        raise ConfigError("dt must be in (0, 1] ms")
    ix, iy = command.amps_x, command.amps_y
    if not (np.isfinite(ix) and np.isfinite(iy)):
        raise DomainError("command must be finite")
    if rng is not None and params.current_noise_a > 0.0:
        noise = rng.normal(0.0, params.current_noise_a, size=2)
        ix += noise[0]
        iy += noise[1]
    w = params.omega_n
    w2 = w * w
    two_zw = 2.0 * params.damping_ratio * w
    dx, dy = float(state.d[0]), float(state.d[1])
    vx, vy = float(state.v[0]), float(state.v[1])
    k = params.cross_coupling_mm2
    ex = _effective_gain(params, 0, ix) * ix
    ey = _effective_gain(params, 1, iy) * iy
    if k != 0.0:
        ex += k * dy * vy * vy / w2
        ey += k * dx * vx * vx / w2
    vx_n = vx + h * (w2 * (ex - dx) - two_zw * vx)
    dx_n = dx + h * vx_n
    vy_n = vy + h * (w2 * (ey - dy) - two_zw * vy)
    dy_n = dy + h * vy_n
    clamp = params.soft_clamp_mm
    if abs(dx_n) > clamp or abs(dy_n) > clamp:
        raise WorkspaceExceededError(
            f"deflection ({dx_n:.3f}, {dy_n:.3f}) mm beyond the "
            f"{clamp:.2f} mm soft clamp"
        )
    return PlantState(d=np.array([dx_n, dy_n]), v=np.array([vx_n, vy_n]),
                      t=state.t + h)


def project_to_target(state: PlantState, params: PlantParams) -> SpotSample:
    """Map tip deflection to the spot on the target plane (scale k_opt)."""
    clamp = params.soft_clamp_mm
    if abs(state.d[0]) > clamp or abs(state.d[1]) > clamp:
        raise WorkspaceExceededError(
            f"state {tuple(state.d)} mm beyond the {clamp:.2f} mm soft clamp"
        )
    return SpotSample(
        x_mm=params.optics_scale * float(state.d[0]),
        y_mm=params.optics_scale * float(state.d[1]),
        diameter_mm=params.spot_diameter_mm,
        t_s=state.t,
    )


def dc_response(current_a: float, params: PlantParams) -> float:
    """Steady-state spot displacement (mm) for a constant axis current."""
    if not np.isfinite(current_a):
        raise DomainError("current must be finite")
    if abs(current_a) > I_MAX_A:
        clamped = math.copysign(params.gain_mm_per_a * I_MAX_A, current_a)
        raise SaturationError(
            f"|I| = {abs(current_a):.4f} A beyond the {I_MAX_A} A limit",
            clamped=clamped,
        )
    return params.gain_mm_per_a * current_a


class PlantSim:
    """Mutable single-owner wrapper around the pure step for tight loops.

    Not reentrant: one logical owner advances it. Keeps plain floats to
    avoid per-tick array allocation; the math is identical to ``step``.
    """

    def __init__(self, params: PlantParams, rng: Optional[np.random.Generator] = None):
        self.params = params
        self.rng = rng
        self.dx = 0.0
        self.dy = 0.0
        self.vx = 0.0
        self.vy = 0.0
        self.t = 0.0
        self._w = params.omega_n
        self._w2 = self._w * self._w
        self._two_zw = 2.0 * params.damping_ratio * self._w
        self._k = params.cross_coupling_mm2
        self._h = params.dt_s
        self._clamp = params.soft_clamp_mm
        self._g = params.gain_mm_per_a
        self._asym = (params.gain_asym_x_pos, params.gain_asym_x_neg,
                      params.gain_asym_y_pos, params.gain_asym_y_neg)
        self._noise = params.current_noise_a
        self._uniform_gain = all(a == 1.0 for a in self._asym)

    def tick(self, amps_x: float, amps_y: float) -> None:
        ix, iy = amps_x, amps_y
        if self.rng is not None and self._noise > 0.0:
            ix += self.rng.normal(0.0, self._noise)
            iy += self.rng.normal(0.0, self._noise)
        if self._uniform_gain:
            ex = self._g * ix
            ey = self._g * iy
        else:
            ex = self._g * (self._asym[0] if ix >= 0 else self._asym[1]) * ix
            ey = self._g * (self._asym[2] if iy >= 0 else self._asym[3]) * iy
        if self._k != 0.0:
            ex += self._k * self.dy * self.vy * self.vy / self._w2
            ey += self._k * self.dx * self.vx * self.vx / self._w2
        h = self._h
        self.vx += h * (self._w2 * (ex - self.dx) - self._two_zw * self.vx)
        self.dx += h * self.vx
        self.vy += h * (self._w2 * (ey - self.dy) - self._two_zw * self.vy)
        self.dy += h * self.vy
        if abs(self.dx) > self._clamp or abs(self.dy) > self._clamp:
            raise WorkspaceExceededError(
                f"deflection ({self.dx:.3f}, {self.dy:.3f}) mm beyond the "
                f"{self._clamp:.2f} mm soft clamp at t={self.t:.4f}s"
            )
        self.t += h

    def spot(self) -> SpotSample:
        s = self.params.optics_scale
        return SpotSample(x_mm=s * self.dx, y_mm=s * self.dy,
                          diameter_mm=self.params.spot_diameter_mm, t_s=self.t)

    def state(self) -> PlantState:
        return PlantState(d=np.array([self.dx, self.dy]),
                          v=np.array([self.vx, self.vy]), t=self.t)


def with_calibration(params: PlantParams, **overrides) -> PlantParams:
    """Return params with calibrated fields replaced."""
    return replace(params, **overrides)
