"""Piecewise power-law models of the center bandwidth versus distance.

On log-log axes the exact center bandwidth is asymptotically piecewise
linear in distance: flat near the source, a straight slope far away,
and (for most angles) one intermediate slope.  Each branch is a
power-law segment ``A * (Ls/R)**B``; the exponent ``B`` is the spatial
bandwidth exponent (SBE).  Adjacent segments meet at critical
distances, and the set of segments used switches at critical polar
angles.  Everything here is closed-form except the two critical angles
found by bisection.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Optional

from .geometry import ArrayConfig, Orientation

__all__ = [
    "AsymptoteSegment",
    "PiecewiseBandwidthModel",
    "DegenerateOrientationError",
    "eta",
    "sbe_z2",
    "sbe_x2",
    "intersect",
    "critical_angle_z1",
    "critical_angle_z2",
    "critical_angle_x",
    "critical_distances",
    "critical_distance_general",
    "build_model_z",
    "build_model_x",
    "build_model_general",
    "eval_model",
    "orientation_strategy_threshold",
]

PERP_TOL = 1e-9  # band around theta = pi/2 treated as exactly perpendicular


class DegenerateOrientationError(ValueError):
    """Orientation for which the two-segment model is undefined."""


@dataclass(frozen=True)
class AsymptoteSegment:
    """One power-law branch ``A * (Ls/R)**B`` valid on (valid_from, valid_to]."""

    amplitude: float
    exponent: float
    valid_from: float
    valid_to: float

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError("segment amplitude must be positive")
        if self.exponent < 0:
            raise ValueError("segment exponent must be non-negative")
        if not self.valid_from < self.valid_to:
            raise ValueError("segment must span a non-empty distance range")

    def value(self, R: float, source_length: float) -> float:
        return self.amplitude * (source_length / R) ** self.exponent


@dataclass(frozen=True)
class PiecewiseBandwidthModel:
    """Ordered power-law segments tiling all distances.

    Continuity at every breakpoint and non-decreasing exponents are
    enforced at construction.
    """

    segments: tuple
    breakpoints: tuple
    label: str
    theta: float
    source_length: float
    orientation: Optional[Orientation] = None

    def __post_init__(self):
        segs = self.segments
        bps = self.breakpoints
        if len(bps) != len(segs) - 1:
            raise ValueError("need exactly one breakpoint between adjacent segments")
        if segs[0].valid_from != 0.0 or not math.isinf(segs[-1].valid_to):
            raise ValueError("segments must tile (0, inf)")
        # exponents need not be monotone: below the first critical angle
        # the middle segment decays faster than the far one
        for a, b, r in zip(segs, segs[1:], bps):
            if a.valid_to != r or b.valid_from != r:
                raise ValueError("segments must tile (0, inf) without gaps")
            va = a.value(r, self.source_length)
            vb = b.value(r, self.source_length)
            if abs(va - vb) > 1e-12 * max(abs(va), abs(vb)):
                raise ValueError("adjacent segments must agree at the breakpoint")

    def segment_index(self, R: float) -> int:
        """1-based index of the segment active at distance ``R``."""
        if not R > 0:
            raise ValueError("distance must be positive")
        for i, seg in enumerate(self.segments):
            if R <= seg.valid_to:
                return i + 1
        return len(self.segments)

    def value(self, R: float) -> float:
        return self.segments[self.segment_index(R) - 1].value(R, self.source_length)


def eta(theta: float) -> float:
    """Directional factor sin(theta)/sqrt(1 + 3 cos^2(theta)), in (0, 1]."""
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    c = math.cos(theta)
    return math.sin(theta) / math.sqrt(1.0 + 3.0 * c * c)


def _one_minus_eta(theta: float) -> float:
    # cancellation-free form of 1 - eta, needed near theta = pi/2
    c = math.cos(theta)
    s = math.sin(theta)
    g = math.sqrt(1.0 + 3.0 * c * c)
    return 4.0 * c * c / (g * (g + s))


def _sqrt_one_minus_eta_sq(theta: float) -> float:
    # exact: sqrt(1 - eta^2) = 2|cos| / sqrt(1 + 3 cos^2)
    c = abs(math.cos(theta))
    return 2.0 * c / math.sqrt(1.0 + 3.0 * c * c)


def sbe_z2(theta: float) -> float:
    """Middle-segment exponent for the parallel orientation."""
    e = eta(theta)
    return 0.5 * (e * e + 1.0 / e)


def sbe_x2(theta: float) -> float:
    """Middle-segment exponent for the boresight orientation, in (0, 1)."""
    e = eta(theta)
    return 0.5 * (e * e + e)


def intersect(seg1: AsymptoteSegment, seg2: AsymptoteSegment, cfg: ArrayConfig) -> float:
    """Distance at which two power-law segments cross."""
    if seg1.exponent == seg2.exponent:
        raise ValueError("parallel segments never intersect")
    ratio = seg1.amplitude / seg2.amplitude
    return cfg.source_length * ratio ** (1.0 / (seg1.exponent - seg2.exponent))


# --- critical angles (computed once per process, race-free) ---------------

_angle_lock = threading.Lock()
_angle_cache: dict = {}


def _bisect(f, a: float, b: float, tol: float = 1e-10) -> float:
    fa = f(a)
    fb = f(b)
    if (fa < 0.0) == (fb < 0.0):
        raise RuntimeError("root not bracketed")
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = f(m)
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _cached_angle(name: str, compute):
    v = _angle_cache.get(name)
    if v is None:
        with _angle_lock:
            v = _angle_cache.get(name)
            if v is None:
                v = compute()
                _angle_cache[name] = v
    return v


def critical_angle_z1() -> float:
    """Angle where the parallel-orientation middle exponent equals one."""
    return _cached_angle(
        "z1", lambda: math.acos(math.sqrt(1.0 / (2.0 * math.sqrt(5.0) - 1.0)))
    )


def critical_angle_z2() -> float:
    """Angle where the first/middle and first/last crossings coincide (parallel).

    Root of ``R_z12(theta) = R_z13(theta)``, i.e. of
    ``sqrt(1 - eta^2) = 2 (sin^2(theta) cos(theta))**B_z2`` — the form
    consistent with the critical-distance expressions.
    """

    def gap(th):
        return _r_z12(th) - _r_z13(th)

    # upper endpoint backed off pi/2, where the gap underflows to zero
    return _cached_angle(
        "z2", lambda: _bisect(gap, critical_angle_z1() + 1e-9, math.pi / 2 - 1e-3)
    )


def critical_angle_x() -> float:
    """Angle where the first/middle and first/last crossings coincide (boresight).

    Root of ``1 - eta = (2 sin(theta) cos^2(theta))**B_x2``.
    """

    def gap(th):
        return _r_x12(th) - _r_x13(th)

    return _cached_angle("x", lambda: _bisect(gap, 1e-6, math.pi / 4))


# --- critical distances (per unit source length) ---------------------------


def _r_z12(theta: float) -> float:
    c = abs(math.cos(theta))
    return (0.5 / c) * (_sqrt_one_minus_eta_sq(theta) / 2.0) ** (1.0 / sbe_z2(theta))


def _r_z23(theta: float) -> float:
    b = sbe_z2(theta)
    if b == 1.0:
        return math.inf
    c = abs(math.cos(theta))
    s2 = math.sin(theta) ** 2
    try:
        # the exponent diverges at the critical angles; treat overflow as
        # "the crossing is beyond any finite distance"
        return (0.5 / c) * (
            _sqrt_one_minus_eta_sq(theta) / (2.0 * s2 * c)
        ) ** (1.0 / (b - 1.0))
    except OverflowError:
        return math.inf


def _r_z13(theta: float) -> float:
    return 0.5 * math.sin(theta) ** 2


def _r_x12(theta: float) -> float:
    c = abs(math.cos(theta))
    return (0.5 / c) * _one_minus_eta(theta) ** (1.0 / sbe_x2(theta))


def _r_x23(theta: float) -> float:
    b = sbe_x2(theta)
    if b == 1.0:
        return math.inf
    c = abs(math.cos(theta))
    try:
        return (0.5 / c) * (
            _one_minus_eta(theta) / (2.0 * math.sin(theta) * c * c)
        ) ** (1.0 / (b - 1.0))
    except OverflowError:
        return math.inf


def _r_x13(theta: float) -> float:
    return math.sin(theta) * abs(math.cos(theta))


def critical_distances(theta: float, cfg: ArrayConfig) -> dict:
    """All pairwise segment-crossing distances at one angle.

    Values are in length units (wavelengths); entries that do not exist
    at the given angle (parallel segments) are ``inf``.
    """
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    ls = cfg.source_length
    perp = abs(theta - math.pi / 2) <= PERP_TOL
    return {
        "R_z_1_2": ls * _r_z12(theta) if not perp else math.inf,
        "R_z_2_3": ls * _r_z23(theta) if not perp else math.inf,
        "R_z_1_3": ls * _r_z13(theta),
        "R_x_1_2": ls * _r_x12(theta) if not perp else math.inf,
        "R_x_2_3": ls * _r_x23(theta) if not perp else math.inf,
        "R_x_1_3": ls * _r_x13(theta),
        "R_x_1_3star": ls / math.sqrt(8.0),
    }


# --- model builders ---------------------------------------------------------


def _two_segment(a1, a2_amp, exponent, bp, label, theta, ls, orientation=None):
    segments = (
        AsymptoteSegment(a1, 0.0, 0.0, bp),
        AsymptoteSegment(a2_amp, exponent, bp, math.inf),
    )
    return PiecewiseBandwidthModel(segments, (bp,), label, theta, ls, orientation)


def _three_segment(amps, exps, bp1, bp2, label, theta, ls):
    segments = (
        AsymptoteSegment(amps[0], exps[0], 0.0, bp1),
        AsymptoteSegment(amps[1], exps[1], bp1, bp2),
        AsymptoteSegment(amps[2], exps[2], bp2, math.inf),
    )
    return PiecewiseBandwidthModel(segments, (bp1, bp2), label, theta, ls)


def build_model_z(
    theta: float, cfg: ArrayConfig, dual_slope: bool = False
) -> PiecewiseBandwidthModel:
    """Distance model of the center bandwidth, parallel orientation.

    Two segments (flat, then slope one) inside the critical-angle band
    and at exactly pi/2; three segments elsewhere.  ``dual_slope``
    forces the two-segment form everywhere (the cruder model used for
    whole-plane error maps).
    """
    ls = cfg.source_length
    t = min(theta, math.pi - theta)
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    s2 = math.sin(theta) ** 2
    if dual_slope or critical_angle_z1() <= t <= critical_angle_z2() or t == math.pi / 2:
        return _two_segment(2.0, s2, 1.0, ls * _r_z13(theta), "z", theta, ls)
    b = sbe_z2(theta)
    try:
        a2 = _sqrt_one_minus_eta_sq(theta) / (2.0 * abs(math.cos(theta))) ** b
    except OverflowError:
        a2 = 0.0
    if a2 == 0.0:
        # the exponent grows like 1/theta toward the source axis and the
        # middle window shrinks to nothing; use the two-segment form
        return _two_segment(2.0, s2, 1.0, ls * _r_z13(theta), "z", theta, ls)
    bp1 = ls * _r_z12(theta)
    bp2 = ls * _r_z23(theta)
    if not bp1 < bp2 < math.inf:
        # float-degenerate middle segment (theta at a critical angle to
        # rounding): drop whichever endpoint segment it shadows
        if b > 1.0:
            return _two_segment(2.0, a2, b, bp1, "z", theta, ls)
        return _two_segment(2.0, s2, 1.0, ls * _r_z13(theta), "z", theta, ls)
    return _three_segment((2.0, a2, s2), (0.0, b, 1.0), bp1, bp2, "z", theta, ls)


def build_model_x(
    theta: float, cfg: ArrayConfig, dual_slope: bool = False
) -> PiecewiseBandwidthModel:
    """Distance model of the center bandwidth, boresight orientation.

    Exactly perpendicular placements (within ``PERP_TOL``) use the
    slope-two far segment; small angles use two segments; everything
    else uses three.  The flat segment has unit amplitude, the value
    consistent with the small-distance limit of the exact expression
    and with the crossing-distance formulas.
    """
    ls = cfg.source_length
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    t = min(theta, math.pi - theta)
    if abs(theta - math.pi / 2) <= PERP_TOL:
        return _two_segment(1.0, 0.125, 2.0, ls / math.sqrt(8.0), "x", theta, ls)
    a3 = math.sin(theta) * abs(math.cos(theta))
    if dual_slope or t <= critical_angle_x():
        return _two_segment(1.0, a3, 1.0, ls * _r_x13(theta), "x", theta, ls)
    b = sbe_x2(theta)
    a2 = _one_minus_eta(theta) / (2.0 * abs(math.cos(theta))) ** b
    bp1 = ls * _r_x12(theta)
    bp2 = ls * _r_x23(theta)
    if not bp1 < bp2 < math.inf:
        return _two_segment(1.0, a3, 1.0, ls * _r_x13(theta), "x", theta, ls)
    return _three_segment((1.0, a2, a3), (0.0, b, 1.0), bp1, bp2, "x", theta, ls)


def critical_distance_general(
    theta: float, orientation: Orientation, cfg: ArrayConfig
) -> float:
    """Crossing distance of the two general-orientation segments.

    Never exceeds half the source length, for any angle and orientation.
    """
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    vx, vz = orientation.vx, orientation.vz
    planar = math.hypot(vx, vz)
    if planar <= PERP_TOL:
        raise DegenerateOrientationError(
            "orientation perpendicular to the bandwidth-carrying plane"
        )
    a_far = abs(vx * math.cos(theta) - vz * math.sin(theta)) * math.sin(theta)
    return cfg.source_length * a_far / (planar + abs(vz))


def build_model_general(
    theta: float, orientation: Orientation, cfg: ArrayConfig
) -> PiecewiseBandwidthModel:
    """Two-segment distance model for an arbitrary orientation.

    Flat at ``sqrt(vx^2 + vz^2) + |vz|`` near the source, slope one with
    the projected-lengths amplitude far away.  Undefined for
    orientations perpendicular to the bandwidth-carrying plane, or
    aligned with the center-to-center line (the far amplitude vanishes).
    """
    ls = cfg.source_length
    vx, vz = orientation.vx, orientation.vz
    planar = math.hypot(vx, vz)
    a_near = planar + abs(vz)
    a_far = abs(vx * math.cos(theta) - vz * math.sin(theta)) * math.sin(theta)
    if a_far == 0.0 and planar > PERP_TOL:
        raise DegenerateOrientationError(
            "orientation along the center-to-center line: far-range amplitude vanishes"
        )
    bp = critical_distance_general(theta, orientation, cfg)
    return _two_segment(a_near, a_far, 1.0, bp, "general", theta, ls, orientation)


def eval_model(model: PiecewiseBandwidthModel, R: float) -> float:
    """Model bandwidth at distance ``R`` (cycles per wavelength)."""
    return model.value(R)


def orientation_strategy_threshold(
    theta: float, psi: float, constraint: str, cfg: ArrayConfig
) -> float:
    """Distance separating parallel-alignment from projection-alignment control.

    Closer than this, pointing the receiving array parallel to the
    source array wins; farther, aligning with the (constraint-dependent)
    projection direction wins.
    """
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    base = cfg.source_length * math.sin(theta) / 2.0
    if constraint == "3d":
        return base
    if constraint == "2d":
        f = math.sqrt(1.0 - math.cos(theta) ** 2 * math.sin(psi) ** 2)
        return f * base
    raise ValueError("constraint must be '3d' or '2d'")
