"""Exact local spatial bandwidth and the DOF-proxy integral.

The local spatial bandwidth at receiver position ``l`` is the spread
(max minus min) of the spatial frequencies contributed by all source
points.  For the two principal orientations it has closed forms; for an
arbitrary orientation two evaluators are provided:

* :func:`local_bandwidth_general` — uniform grid scan plus
  golden-section refinement of the frequency profile (the spec'd
  numeric route, no structural assumptions);
* :func:`local_bandwidth_exact` — closed-form extrema from the
  great-circle-arc argument (fast path used by the simulations; agrees
  with the numeric route to better than 1e-9).

Integrating the bandwidth along the receiving array gives the number of
non-redundant Nyquist samples (the K number), an estimate of the
spatial degrees of freedom of the link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernels
from .geometry import (
    ArrayConfig,
    Orientation,
    Placement,
    Validity,
    validity_check,
)

__all__ = [
    "BandwidthSample",
    "QuadratureError",
    "local_bandwidth_z",
    "local_bandwidth_x",
    "local_bandwidth_general",
    "local_bandwidth_exact",
    "k_number",
    "k_number_const",
]


class QuadratureError(RuntimeError):
    """Quadrature failed to reach the requested tolerance.

    Carries the best available estimate in ``best_estimate``.
    """

    def __init__(self, message: str, best_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate


@dataclass(frozen=True)
class BandwidthSample:
    """Local bandwidth at one receiver position.

    ``width = kappa_max - kappa_min`` in cycles per wavelength;
    ``q_max``/``q_min`` are the source arc lengths attaining the
    extremes (smallest such arc length on ties).
    """

    position: float
    width: float
    kappa_max: float
    kappa_min: float
    q_max: float
    q_min: float


def _check_placement(placement: Placement, cfg: ArrayConfig) -> None:
    # Only reactive-zone placements are rejected; marginal ones are the
    # caller's responsibility (the tri-state classification exists so
    # evaluations may probe near the bound).
    if validity_check(placement, cfg) is Validity.INVALID:
        raise ValueError(
            "placement closer than the minimum radiative distance "
            "(use validity_check to classify placements)"
        )


def _check_l(l: float, cfg: ArrayConfig) -> None:
    if abs(l) > cfg.receiver_length / 2:
        raise ValueError("receiver arc length l outside the array")


def local_bandwidth_z(l: float, placement: Placement, cfg: ArrayConfig) -> BandwidthSample:
    """Exact bandwidth when the receiving array parallels the source array.

    The frequency is monotone in the source coordinate, so the extremes
    sit at the two source endpoints.
    """
    _check_l(l, cfg)
    _check_placement(placement, cfg)
    R, th = placement.distance, placement.theta
    ls_half = cfg.source_length / 2
    u1 = l + R * math.cos(th) + ls_half
    u2 = l + R * math.cos(th) - ls_half
    c = R * math.sin(th)
    kmax = u1 / math.hypot(u1, c)
    kmin = u2 / math.hypot(u2, c)
    return BandwidthSample(l, kmax - kmin, kmax, kmin, -ls_half, ls_half)


def local_bandwidth_x(l: float, placement: Placement, cfg: ArrayConfig) -> BandwidthSample:
    """Exact bandwidth when the receiving array points away from the source.

    Below the crossover distance ``R |cos(theta)| = Ls/2`` the frequency
    reaches its absolute maximum (unity) at an interior source point;
    beyond it both extremes sit at the endpoints.  Continuous across the
    crossover.
    """
    _check_l(l, cfg)
    _check_placement(placement, cfg)
    R, th = placement.distance, placement.theta
    ls_half = cfg.source_length / 2
    u = l + R * math.sin(th)
    if u <= 0.0:
        raise ValueError("receiver point behind the source axis (l + R sin(theta) <= 0)")
    c0 = R * math.cos(th)
    ac = abs(c0)
    kmin = u / math.hypot(u, ac + ls_half)
    q_min = -ls_half if c0 >= 0.0 else ls_half
    if ac <= ls_half:
        kmax = 1.0
        q_max = c0
    else:
        kmax = u / math.hypot(u, ac - ls_half)
        q_max = math.copysign(ls_half, c0)
    return BandwidthSample(l, kmax - kmin, kmax, kmin, q_max, q_min)


def local_bandwidth_general(
    l: float,
    placement: Placement,
    orientation: Orientation,
    cfg: ArrayConfig,
    grid_points: int = 4096,
) -> BandwidthSample:
    """Bandwidth for an arbitrary orientation by numeric extremization.

    Scans the spatial-frequency profile on a uniform source grid
    (``grid_points`` nodes) and refines every detected interior extremum
    and both endpoints by golden-section search, to an absolute accuracy
    far below 1e-9 cycles per wavelength.

    Parameters
    ----------
    l : receiver arc length, |l| <= Lr/2
    placement, orientation, cfg : geometry of the link
    grid_points : number of coarse scan nodes (>= 16)
    """
    _check_l(l, cfg)
    _check_placement(placement, cfg)
    if grid_points < 16:
        raise ValueError("grid_points must be at least 16")
    kmax, kmin, qmax, qmin = kernels.grid_extrema(
        l, placement.distance, placement.theta,
        orientation.vx, orientation.vy, orientation.vz,
        cfg.source_length, grid_points,
    )
    return BandwidthSample(l, kmax - kmin, kmax, kmin, qmax, qmin)


def local_bandwidth_exact(
    l: float,
    placement: Placement,
    orientation: Orientation,
    cfg: ArrayConfig,
) -> BandwidthSample:
    """Bandwidth for an arbitrary orientation, closed-form extrema."""
    _check_l(l, cfg)
    _check_placement(placement, cfg)
    kmax, kmin, qmax, qmin = kernels.arc_extrema(
        l, placement.distance, placement.theta,
        orientation.vx, orientation.vy, orientation.vz,
        cfg.source_length,
    )
    return BandwidthSample(l, kmax - kmin, kmax, kmin, qmax, qmin)


def k_number(
    placement: Placement,
    orientation: Orientation,
    cfg: ArrayConfig,
    rtol: float = 1e-6,
    max_evals: int = 2**20,
) -> float:
    """Non-redundant Nyquist sample count along the receiving array.

    Integrates the local bandwidth over the array by adaptive composite
    quadrature (trapezoid doubling with Simpson extrapolation) to the
    requested relative tolerance.  Raises :class:`QuadratureError`
    carrying the best estimate if the evaluation cap is exhausted.
    """
    _check_placement(placement, cfg)
    k, converged = kernels.k_number(
        placement.distance, placement.theta,
        orientation.vx, orientation.vy, orientation.vz,
        cfg.source_length, cfg.receiver_length, rtol, max_evals,
    )
    if not converged:
        raise QuadratureError(
            "bandwidth quadrature did not converge within the evaluation cap",
            float(k),
        )
    return float(k)


def k_number_const(width: float, cfg: ArrayConfig) -> float:
    """Sample count under the constant-bandwidth approximation."""
    if width < 0:
        raise ValueError("bandwidth must be non-negative")
    return width * cfg.receiver_length
