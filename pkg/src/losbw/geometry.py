"""Array-pair geometry: coordinate systems, placements, orientations.

Conventions used throughout the package:

* All lengths are wavelength-normalized (the wavelength field of
  :class:`ArrayConfig` is metadata for converting results to physical
  units).  Spatial frequencies and bandwidths are in cycles per
  wavelength.
* The local coordinate system (LCS) sits at the receiver center: its
  z-axis is parallel to the source array, its x-axis points away from
  the source array inside the plane containing both, and its y-axis is
  perpendicular to that plane.
* The source array occupies points ``(-R sin(theta), 0, -R cos(theta) + q)``
  for arc length ``q`` in ``[-Ls/2, Ls/2]``; the receiving array occupies
  ``l * v`` for the unit orientation ``v`` and ``l`` in ``[-Lr/2, Lr/2]``.

All functions are pure and safe for concurrent use.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArrayConfig",
    "Placement",
    "Orientation",
    "GroundScenario",
    "Validity",
    "EX",
    "EY",
    "EZ",
    "source_point",
    "receive_point",
    "spatial_frequency",
    "validity_check",
    "placement_from_ground",
    "rotation_gcs_to_lcs",
    "lcs_from_gcs",
    "projection_direction",
]

_UNIT_NORM_TOL = 1e-12


@dataclass(frozen=True)
class ArrayConfig:
    """Lengths of the source/receiver array pair.

    ``source_length`` and ``receiver_length`` are in wavelengths; the
    source array is the large one (``source_length >= receiver_length``).
    ``wavelength`` is in meters and only used when converting outputs to
    physical units.
    """

    source_length: float
    receiver_length: float
    wavelength: float = 1.0

    def __post_init__(self):
        if not (self.source_length > 0 and self.receiver_length > 0):
            raise ValueError("array lengths must be positive")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if self.source_length < self.receiver_length:
            raise ValueError(
                "source array must be at least as long as the receiving array"
            )

    def cycles_per_meter(self, w: float) -> float:
        """Convert a bandwidth/frequency from cycles-per-wavelength."""
        return w / self.wavelength

    def meters(self, length: float) -> float:
        """Convert a wavelength-normalized length to meters."""
        return length * self.wavelength


@dataclass(frozen=True)
class Placement:
    """Receiver-center position: radial distance and polar angle.

    ``theta`` is measured from the source-array axis to the line joining
    the array centers and must lie strictly inside ``(0, pi)`` so the
    arrays are never colinear.
    """

    distance: float
    theta: float

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError("distance must be positive")
        if not 0.0 < self.theta < math.pi:
            raise ValueError("theta must lie strictly inside (0, pi)")


@dataclass(frozen=True)
class Orientation:
    """Unit direction of the receiving array in the LCS.

    The representation is canonical: vectors with a negative x component
    are negated at construction (a sign flip does not change any
    bandwidth quantity).  Inputs must already have unit norm to 1e-12.
    """

    vx: float
    vy: float
    vz: float

    def __post_init__(self):
        n = math.sqrt(self.vx * self.vx + self.vy * self.vy + self.vz * self.vz)
        if abs(n - 1.0) > _UNIT_NORM_TOL:
            raise ValueError("orientation must be a unit vector (|norm - 1| <= 1e-12)")
        if self.vx < 0.0:
            object.__setattr__(self, "vx", -self.vx)
            object.__setattr__(self, "vy", -self.vy)
            object.__setattr__(self, "vz", -self.vz)

    @classmethod
    def from_vector(cls, v) -> "Orientation":
        v = np.asarray(v, dtype=float)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.vx, self.vy, self.vz])


EX = Orientation(1.0, 0.0, 0.0)
EY = Orientation(0.0, 1.0, 0.0)
EZ = Orientation(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class GroundScenario:
    """Elevated source array above a ground plane holding the receiver.

    The source array is parallel to the ground X-axis at height
    ``source_height``; the receiver center sits at ``(x, y, 0)`` with
    ``y >= 0`` (the other half-plane is symmetric).
    """

    source_height: float
    x: float
    y: float

    def __post_init__(self):
        if not self.source_height > 0:
            raise ValueError("source height must be positive")
        if self.y < 0:
            raise ValueError("ground y coordinate must be non-negative")


class Validity(enum.Enum):
    """Classification of a placement against the radiative-zone bound."""

    VALID = "valid"
    MARGINAL = "marginal"
    INVALID = "invalid"


def source_point(q: float, placement: Placement, cfg: ArrayConfig) -> np.ndarray:
    """LCS coordinates of the source-array point at arc length ``q``."""
    if abs(q) > cfg.source_length / 2:
        raise ValueError("arc length q outside the source array")
    R, th = placement.distance, placement.theta
    return np.array([-R * math.sin(th), 0.0, -R * math.cos(th) + q])


def receive_point(l: float, orientation: Orientation, cfg: ArrayConfig) -> np.ndarray:
    """LCS coordinates of the receiver-array point at arc length ``l``."""
    if abs(l) > cfg.receiver_length / 2:
        raise ValueError("arc length l outside the receiving array")
    return l * orientation.as_array()


def spatial_frequency(
    l: float,
    q: float,
    placement: Placement,
    orientation: Orientation,
    cfg: ArrayConfig,
) -> float:
    """Spatial frequency of one source contribution seen along the array.

    This is the rate of phase rotation (in cycles per wavelength) of the
    wave emitted at source arc length ``q``, observed while moving along
    the receiving array direction at position ``l``.  It equals the
    projection of the unit source-to-receiver vector onto the array
    orientation and is therefore bounded by 1 in magnitude.
    """
    r = receive_point(l, orientation, cfg) - source_point(q, placement, cfg)
    n = float(np.linalg.norm(r))
    if n == 0.0:
        raise ValueError("receiver point coincides with a source point")
    return float(np.dot(r, orientation.as_array())) / n


def validity_check(
    placement: Placement, cfg: ArrayConfig, min_clearance: float = 10.0
) -> Validity:
    """Classify a placement against the minimum radiative distance.

    VALID placements keep every point of an arbitrarily oriented
    receiving array at least ``min_clearance`` wavelengths away from the
    source array.  MARGINAL placements satisfy the weaker bound
    ``R >= min_clearance``, which suffices when the receiving array is
    parallel to the source array.  Everything closer is INVALID.
    """
    R, th = placement.distance, placement.theta
    full = (cfg.receiver_length / 2 + min_clearance) / math.sin(th)
    if R >= full:
        return Validity.VALID
    if R >= min_clearance:
        return Validity.MARGINAL
    return Validity.INVALID


def placement_from_ground(
    scene: GroundScenario, cfg: ArrayConfig
) -> tuple[Placement, float]:
    """Placement and plane-tilt angle for a ground-plane receiver.

    Returns the (distance, polar angle) placement of the receiver center
    together with ``psi``, the dihedral angle between the ground plane
    and the plane containing the source array and the receiver center.
    ``psi`` is in ``[0, pi/2]`` and equals ``pi/2`` directly below the
    source array (y = 0).
    """
    zs, x, y = scene.source_height, scene.x, scene.y
    R = math.sqrt(zs * zs + x * x + y * y)
    theta = math.acos(x / R)
    psi = math.atan2(zs, y)
    return Placement(R, theta), psi


def rotation_gcs_to_lcs(psi: float) -> np.ndarray:
    """Rotation matrix mapping ground-frame vectors into the LCS."""
    c, s = math.cos(psi), math.sin(psi)
    return np.array([[0.0, c, -s], [0.0, s, c], [1.0, 0.0, 0.0]])


def lcs_from_gcs(v_gcs, psi: float) -> Orientation:
    """Convert a ground-frame unit direction to a canonical LCS orientation."""
    v = rotation_gcs_to_lcs(psi) @ np.asarray(v_gcs, dtype=float)
    return Orientation.from_vector(v)


def projection_direction(theta: float) -> np.ndarray:
    """Unit vector in the x-z plane perpendicular to the center line.

    Far apart, both arrays act through their projections onto this
    direction, which drives the large-distance bandwidth formulas.
    """
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    return np.array([-math.cos(theta), 0.0, math.sin(theta)])
