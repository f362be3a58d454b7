"""Magnetostatics primitives: circular-coil fields and dipole force/torque.

All quantities are SI (meters, amperes, tesla). The on-axis field of a
circular loop is

    B(z) = mu0 * I / 2 * a^2 / (a^2 + z^2)^(3/2)

per loop, multiplied by the number of turns. Off-axis, the field is
extended with the first-order solenoidal expansion
B_rho = -(rho/2) * dBz/dz, which keeps div B = 0 exactly; full
elliptic-integral loop fields are deliberately out of scope. A coil pair
on a common axis is summed and treated as uniform across the narrow
workspace, matching the actuator's operating assumption.

Force on a dipole is the gradient of m . B (equivalently minus the
gradient of the potential energy U = -m . B); torque is m x B.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

# Permeability of free space (T*m/A)
MU_0: float = 4.0 * np.pi * 1e-7

# Central-difference step for dipole_force (m): balances truncation and
# cancellation at the workspace length scales.
FORCE_FD_STEP: float = 1e-5

# Coil-pair face separation for the 13 mm OD scanner layout (m).
COIL_SEPARATION: float = 10e-3

# Effective core permeability multiplier; the iron core is not modeled
# magnetostatically, its gain is folded into this scalar (plant gain is
# calibrated downstream anyway).
CORE_GAIN_DEFAULT: float = 1.0

from .errors import DomainError, GeometryError


def _as_unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or abs(n - 1.0) > 1e-9:
        raise GeometryError(f"axis must be a unit vector, |axis| = {n!r}")
    return v


@dataclass(frozen=True)
class CoilGeometry:
    """A multi-turn circular coil: radius, turns, axis and center.

    Args:
        radius: Loop radius in meters (> 0).
        turns: Number of wire turns (>= 1).
        axis: Unit 3-vector along the coil axis.
        center: Coil center position in meters.
        core_gain: Effective permeability multiplier for the iron core.
    """

    radius: float
    turns: int = 1
    axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    core_gain: float = CORE_GAIN_DEFAULT

    def __post_init__(self):
        if not (np.isfinite(self.radius) and self.radius > 0.0):
            raise GeometryError(f"coil radius must be > 0, got {self.radius}")
        if self.turns < 1:
            raise GeometryError(f"coil needs >= 1 turn, got {self.turns}")
        object.__setattr__(self, "axis", _as_unit(self.axis))
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not np.all(np.isfinite(self.center)):
            raise GeometryError("coil center must be finite")


@dataclass(frozen=True)
class DipoleMoment:
    """A point magnetic dipole, m in A*m^2."""

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.shape != (3,) or not np.all(np.isfinite(m)):
            raise DomainError("dipole moment must be a finite 3-vector")
        object.__setattr__(self, "m", m)


@dataclass(frozen=True)
class FieldSample:
    """Field vector B (T) with an optional spatial gradient dB_i/dx_j (T/m)."""

    B: np.ndarray
    gradient: Optional[np.ndarray] = None

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        if B.shape != (3,) or not np.all(np.isfinite(B)):
            raise DomainError("field sample must be a finite 3-vector")
        object.__setattr__(self, "B", B)
        if self.gradient is not None:
            g = np.asarray(self.gradient, dtype=float)
            if g.shape != (3, 3) or not np.all(np.isfinite(g)):
                raise DomainError("field gradient must be a finite 3x3 matrix")
            object.__setattr__(self, "gradient", g)


def on_axis_field(coil: CoilGeometry, current: float, z: float) -> float:
    """Axial field (T) of the coil at signed axial distance z from its center.

    Returns N * mu0 * I * a^2 / (2 (a^2 + z^2)^(3/2)); the sign follows the
    sign of the current.
    """
    if not (np.isfinite(current) and np.isfinite(z)):
        raise DomainError("current and z must be finite")
    a2 = coil.radius * coil.radius
    return (
        coil.turns
        * coil.core_gain
        * MU_0
        * current
        * a2
        / (2.0 * (a2 + z * z) ** 1.5)
    )


def on_axis_field_gradient(coil: CoilGeometry, current: float, z: float) -> float:
    """Closed-form dBz/dz (T/m) of the on-axis coil field at z."""
    if not (np.isfinite(current) and np.isfinite(z)):
        raise DomainError("current and z must be finite")
    a2 = coil.radius * coil.radius
    return (
        coil.turns
        * coil.core_gain
        * MU_0
        * current
        * a2
        * (-3.0 * z)
        / (2.0 * (a2 + z * z) ** 2.5)
    )


def loop_field(
    coil: CoilGeometry, current: float, point, include_gradient: bool = False
) -> FieldSample:
    """Field of a single coil near its axis (first-order solenoidal expansion).

    On axis this is exact; off axis the transverse component is
    B_rho = -(rho/2) dBz/dz, the unique first-order field with div B = 0.
    """
    p = np.asarray(point, dtype=float)
    if p.shape != (3,) or not np.all(np.isfinite(p)):
        raise DomainError("point must be a finite 3-vector")
    rel = p - coil.center
    z = float(rel @ coil.axis)
    rho_vec = rel - z * coil.axis
    bz = on_axis_field(coil, current, z)
    dbz = on_axis_field_gradient(coil, current, z)
    B = bz * coil.axis - 0.5 * dbz * rho_vec
    grad = None
    if include_gradient:
        # dB/dx = dbz/dz * (axis x axis^T) for the axial part plus the
        # transverse expansion's exact derivatives:
        #   B = bz(z) e_z - (dbz/dz / 2) rho_vec,   rho_vec = r - (r.e_z) e_z
        e = coil.axis
        P = np.eye(3) - np.outer(e, e)  # projector onto the transverse plane
        # d2Bz/dz2 from differentiating the closed form once more
        a2 = coil.radius * coil.radius
        d2bz = (
            coil.turns
            * coil.core_gain
            * MU_0
            * current
            * a2
            * (12.0 * z * z - 3.0 * a2)
            / (2.0 * (a2 + z * z) ** 3.5)
        )
        grad = (
            np.outer(e, e) * dbz
            - 0.5 * d2bz * np.outer(rho_vec, e)
            - 0.5 * dbz * P
        )
    return FieldSample(B=B, gradient=grad)


def pair_field(
    coil_pos: CoilGeometry,
    coil_neg: CoilGeometry,
    current: float,
    point,
    include_gradient: bool = False,
) -> FieldSample:
    """Summed axial field of a coaxial coil pair, uniform across the workspace.

    Both coils carry the same current with aiding polarity; the returned
    field is the sum of the two on-axis values at the point's axial
    coordinate, directed along the common axis. The pair must be coaxial
    (within 1e-6 rad) with equal radius and turns.
    """
    cross = np.linalg.norm(np.cross(coil_pos.axis, coil_neg.axis))
    if cross > 1e-6 or coil_pos.axis @ coil_neg.axis < 0.0:
        raise GeometryError("coil pair must be coaxial (same direction)")
    offset = coil_neg.center - coil_pos.center
    if np.linalg.norm(offset - (offset @ coil_pos.axis) * coil_pos.axis) > 1e-9:
        raise GeometryError("coil centers must lie on the common axis")
    if coil_pos.radius != coil_neg.radius or coil_pos.turns != coil_neg.turns:
        raise GeometryError("coil pair must share radius and turns")
    p = np.asarray(point, dtype=float)
    if p.shape != (3,) or not np.all(np.isfinite(p)):
        raise DomainError("point must be a finite 3-vector")
    e = coil_pos.axis
    z1 = float((p - coil_pos.center) @ e)
    z2 = float((p - coil_neg.center) @ e)
    bz = on_axis_field(coil_pos, current, z1) + on_axis_field(coil_neg, current, z2)
    grad = None
    if include_gradient:
        dbz = on_axis_field_gradient(coil_pos, current, z1) + on_axis_field_gradient(
            coil_neg, current, z2
        )
        grad = np.outer(e, e) * dbz
    return FieldSample(B=bz * e, gradient=grad)


def standard_pair(
    axis=(0.0, 0.0, 1.0),
    radius: float = 2.5e-3,
    turns: int = 150,
    separation: float = COIL_SEPARATION,
) -> tuple[CoilGeometry, CoilGeometry]:
    """The scanner's default opposing coil pair on one axis."""
    e = _as_unit(np.asarray(axis, dtype=float))
    half = 0.5 * separation
    return (
        CoilGeometry(radius=radius, turns=turns, axis=e, center=-half * e),
        CoilGeometry(radius=radius, turns=turns, axis=e, center=half * e),
    )


def dipole_force(
    moment: DipoleMoment,
    field_fn: Callable[[np.ndarray], FieldSample],
    point,
    h: float = FORCE_FD_STEP,
) -> np.ndarray:
    """Force (N) on a dipole: central-difference gradient of m . B at point."""
    p = np.asarray(point, dtype=float)
    if p.shape != (3,) or not np.all(np.isfinite(p)):
        raise DomainError("point must be a finite 3-vector")
    m = moment.m
    F = np.zeros(3)
    for i in range(3):
        dp = np.zeros(3)
        dp[i] = h
        up = field_fn(p + dp).B
        dn = field_fn(p - dp).B
        if not (np.all(np.isfinite(up)) and np.all(np.isfinite(dn))):
            raise DomainError("field samples must be finite")
        F[i] = (m @ up - m @ dn) / (2.0 * h)
    return F


def dipole_torque(moment: DipoleMoment, B) -> np.ndarray:
    """Torque (N*m) on a dipole: m x B."""
    B = np.asarray(B, dtype=float)
    if B.shape != (3,) or not np.all(np.isfinite(B)):
        raise DomainError("B must be a finite 3-vector")
    return np.cross(moment.m, B)


def biot_savart_loop(
    coil: CoilGeometry, current: float, point, segments: int = 20000
) -> np.ndarray:
    """Field of the coil by direct Biot-Savart line integration.

    Discretizes each turn into straight segments at parameter midpoints.
    Slow by design; this is the independent oracle for the closed forms.
    """
    p = np.asarray(point, dtype=float)
    e = coil.axis
    # orthonormal frame spanning the loop plane
    trial = np.array([1.0, 0.0, 0.0])
    if abs(trial @ e) > 0.9:
        trial = np.array([0.0, 1.0, 0.0])
    u = trial - (trial @ e) * e
    u /= np.linalg.norm(u)
    v = np.cross(e, u)
    theta = (np.arange(segments) + 0.5) * (2.0 * np.pi / segments)
    pos = (
        coil.center[None, :]
        + coil.radius * np.cos(theta)[:, None] * u[None, :]
        + coil.radius * np.sin(theta)[:, None] * v[None, :]
    )
    dl = (
        coil.radius
        * (2.0 * np.pi / segments)
        * (-np.sin(theta)[:, None] * u[None, :] + np.cos(theta)[:, None] * v[None, :])
    )
    r = p[None, :] - pos
    rnorm = np.linalg.norm(r, axis=1)
    dB = np.cross(dl, r) / rnorm[:, None] ** 3
    return (
        coil.turns * coil.core_gain * MU_0 * current / (4.0 * np.pi) * dB.sum(axis=0)
    )
