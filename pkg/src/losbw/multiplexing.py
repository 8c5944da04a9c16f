"""Ground-scenario case study: K numbers, coverage regions, CDFs.

An elevated source array serves receivers on the ground plane whose
orientation is either freely controllable or random (uniform over the
sphere or over the ground circle).  Because the source sits higher than
half its length, every ground placement is past the model breakpoint,
so the slope-one approximation ``K = |<v,u>| sin(theta) Ls Lr / R``
applies everywhere.  This module provides its maximum/expected values
under the two orientation constraints, the coverage regions where they
meet a threshold, boundary tracing, seeded orientation sampling, the
exhaustive-search exact optimum, and grid CDF simulations comparing the
approximation against quadrature-exact K numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .geometry import ArrayConfig, Orientation, Placement

__all__ = [
    "RegionSpec",
    "OrientationDistribution",
    "RegionBoundary",
    "EmpiricalCdf",
    "k_approx",
    "k_max_3d",
    "k_max_2d",
    "k_exp_3d",
    "k_exp_2d",
    "region_membership",
    "region_boundary",
    "sample_orientation",
    "sample_orientations",
    "optimal_orientation_search",
    "cdf_simulation",
    "ks_distance",
]

_CONSTRAINTS = ("3d", "2d")
_MODES = ("max", "expected")
_KINDS = ("uni3d", "uni2d")


@dataclass(frozen=True)
class RegionSpec:
    """A coverage-region question: arrays, source height, threshold, flavor."""

    cfg: ArrayConfig
    source_height: float
    k_threshold: float
    constraint: str
    mode: str

    def __post_init__(self):
        if self.constraint not in _CONSTRAINTS:
            raise ValueError("constraint must be one of %r" % (_CONSTRAINTS,))
        if self.mode not in _MODES:
            raise ValueError("mode must be one of %r" % (_MODES,))
        if not self.k_threshold > 0:
            raise ValueError("threshold must be positive")
        if not self.source_height > self.cfg.source_length / 2:
            raise ValueError("source height must exceed half the source length")

    @property
    def g0(self) -> float:
        """Characteristic region length Ls*Lr / threshold (wavelengths)."""
        return self.cfg.source_length * self.cfg.receiver_length / self.k_threshold


@dataclass(frozen=True)
class OrientationDistribution:
    """Seeded random orientation family: uniform sphere or ground circle."""

    kind: str
    seed: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError("kind must be one of %r" % (_KINDS,))


@dataclass(frozen=True)
class RegionBoundary:
    """Sampled quarter-plane boundary trace of a coverage region."""

    points: np.ndarray
    nonempty: bool
    y_max: float


@dataclass(frozen=True)
class EmpiricalCdf:
    """Weighted empirical CDF: sorted values with cumulative fractions."""

    values: np.ndarray
    fractions: np.ndarray
    empty: bool


def _factor_2d(theta: float, psi: float) -> float:
    return math.sqrt(1.0 - math.cos(theta) ** 2 * math.sin(psi) ** 2)


def k_approx(placement: Placement, orientation: Orientation, cfg: ArrayConfig) -> float:
    """Slope-one K approximation for a specific orientation."""
    th = placement.theta
    proj = abs(orientation.vx * math.cos(th) - orientation.vz * math.sin(th))
    return proj * math.sin(th) * cfg.source_length * cfg.receiver_length / placement.distance


def k_max_3d(placement: Placement, cfg: ArrayConfig) -> tuple[float, Orientation]:
    """Best achievable K under free 3D orientation, with its orientation.

    The optimum aligns the receiving array with the in-plane direction
    perpendicular to the center-to-center line.
    """
    th = placement.theta
    k = math.sin(th) * cfg.source_length * cfg.receiver_length / placement.distance
    c = math.cos(th)
    if c == 0.0:
        best = Orientation(0.0, 0.0, 1.0)
    else:
        s = math.copysign(1.0, c)
        best = Orientation(s * c, 0.0, -s * math.sin(th))
    return k, best


def k_max_2d(placement: Placement, psi: float, cfg: ArrayConfig) -> float:
    """Best achievable K when the orientation stays in the ground plane."""
    k3, _ = k_max_3d(placement, cfg)
    return _factor_2d(placement.theta, psi) * k3


def k_exp_3d(placement: Placement, cfg: ArrayConfig) -> float:
    """Mean K under sphere-uniform orientation: exactly half the 3D optimum."""
    return 0.5 * k_max_3d(placement, cfg)[0]


def k_exp_2d(placement: Placement, psi: float, cfg: ArrayConfig) -> float:
    """Mean K under circle-uniform orientation: (2/pi) of the 2D optimum."""
    return (2.0 / math.pi) * k_max_2d(placement, psi, cfg)


def _k_asym_arrays(spec: RegionSpec, x, y):
    """Mode-appropriate approximate K on ground coordinates (vectorized)."""
    zs = spec.source_height
    cfg = spec.cfg
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    s2 = zs * zs + y * y
    r = np.sqrt(s2 + x * x)
    base = np.sqrt(s2) / r * cfg.source_length * cfg.receiver_length / r
    if spec.constraint == "2d":
        # sin(psi) = zs / sqrt(zs^2 + y^2); cos(theta) = x / r
        base = base * np.sqrt(1.0 - (x * x / (r * r)) * (zs * zs / s2))
    if spec.mode == "expected":
        base = base * (0.5 if spec.constraint == "3d" else 2.0 / math.pi)
    return base


def region_membership(spec: RegionSpec, x: float, y: float) -> bool:
    """Whether the ground point meets the region's K threshold."""
    if y < 0:
        raise ValueError("ground y coordinate must be non-negative")
    return bool(_k_asym_arrays(spec, x, y) >= spec.k_threshold)


def _family_scale(spec: RegionSpec) -> float:
    # optimum-mode regions are mean-mode regions at a rescaled threshold
    if spec.mode == "expected":
        return spec.g0
    return spec.g0 * (2.0 if spec.constraint == "3d" else math.pi / 2.0)


def region_boundary(spec: RegionSpec, n_points: int = 200) -> RegionBoundary:
    """Trace the region boundary in the quarter plane x, y >= 0.

    The 3D family has a closed form; the 2D family is solved per
    ordinate by bisection inside a bracketing 3D-family envelope.
    Returns an empty trace (``nonempty=False``) when the region does not
    exist at this source height.
    """
    if n_points < 2:
        raise ValueError("need at least two boundary points")
    zs = spec.source_height
    g = _family_scale(spec)
    if spec.constraint == "3d":
        if zs >= g / 2.0:
            return RegionBoundary(np.empty((0, 2)), False, 0.0)
        y_max = math.sqrt(g * g / 4.0 - zs * zs)
        ys = np.linspace(0.0, y_max, n_points)
        s = np.sqrt(zs * zs + ys * ys)
        xs = np.sqrt(np.maximum(g / 2.0 * s - s * s, 0.0))
        return RegionBoundary(np.column_stack([xs, ys]), True, y_max)
    bound = 2.0 / math.pi * g
    if zs >= bound:
        return RegionBoundary(np.empty((0, 2)), False, 0.0)
    y_max = math.sqrt(bound * bound - zs * zs)
    ys = np.linspace(0.0, y_max, n_points)
    xs = np.empty_like(ys)
    g_env = 4.0 / math.pi * g  # 3D-family superset envelope
    for i, y in enumerate(ys):
        s2 = zs * zs + y * y
        s = math.sqrt(s2)
        hi = math.sqrt(max(g_env / 2.0 * s - s2, 0.0))
        lo = 0.0
        f_lo = _boundary_gap_2d(lo, y, zs, g)
        if f_lo <= 0.0:
            xs[i] = 0.0
            continue
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            if _boundary_gap_2d(mid, y, zs, g) > 0.0:
                lo = mid
            else:
                hi = mid
        xs[i] = 0.5 * (lo + hi)
    return RegionBoundary(np.column_stack([xs, ys]), True, y_max)


def _boundary_gap_2d(x: float, y: float, zs: float, g: float) -> float:
    r2 = zs * zs + x * x + y * y
    inner = zs * zs + y * y - zs * zs * x * x / r2
    return 2.0 / math.pi * math.sqrt(inner) / r2 - 1.0 / g


# --- seeded orientation sampling -------------------------------------------


def _uniforms(seed: int, start: int, n: int) -> np.ndarray:
    # counter-based stream: draw i always consumes counter block i (one
    # Philox block is four 64-bit outputs, i.e. four doubles, two used),
    # so any (start, n) window is reproducible independently of batching
    bg = np.random.Philox(key=np.uint64(seed))
    bg.advance(start)
    return np.random.Generator(bg).random((n, 4))[:, :2]


def _gcs_samples(dist: OrientationDistribution, n: int, start: int) -> np.ndarray:
    u = _uniforms(dist.seed, start, n)
    gamma = 2.0 * math.pi * u[:, 0]
    if dist.kind == "uni3d":
        cos_phi = 1.0 - 2.0 * u[:, 1]
        sin_phi = np.sqrt(np.maximum(1.0 - cos_phi * cos_phi, 0.0))
        return np.column_stack(
            [sin_phi * np.cos(gamma), sin_phi * np.sin(gamma), cos_phi]
        )
    return np.column_stack([np.cos(gamma), np.sin(gamma), np.zeros(n)])


def sample_orientations(
    dist: OrientationDistribution, psi: float, n: int, start: int = 0
) -> np.ndarray:
    """Draw ``n`` orientations (LCS components, canonical sign) as rows.

    Draw ``start + i`` is identical no matter how the stream is chunked.
    """
    g = _gcs_samples(dist, n, start)
    c, s = math.cos(psi), math.sin(psi)
    vx = c * g[:, 1] - s * g[:, 2]
    vy = s * g[:, 1] + c * g[:, 2]
    vz = g[:, 0]
    out = np.column_stack([vx, vy, vz])
    out[out[:, 0] < 0.0] *= -1.0
    return out


def sample_orientation(
    dist: OrientationDistribution, psi: float, index: int = 0
) -> Orientation:
    """Single reproducible draw (see :func:`sample_orientations`)."""
    row = sample_orientations(dist, psi, 1, start=index)[0]
    return Orientation(row[0], row[1], row[2])


# --- exact-side machinery ---------------------------------------------------


def optimal_orientation_search(
    placement: Placement,
    psi: float,
    constraint: str,
    cfg: ArrayConfig,
    grid_n: int = 64,
    rtol: float = 1e-6,
) -> tuple[float, Orientation]:
    """Best exact K over the constraint set by exhaustive grid search.

    Scans a ``grid_n x 2*grid_n`` zenith/azimuth grid (or ``4*grid_n``
    circle points under the 2D constraint), then runs two
    golden-section refinement passes around the best cell.  The
    objective is the quadrature K number.
    """
    if grid_n < 64:
        raise ValueError("grid_n must be at least 64")
    if constraint == "3d":
        k, vx, vy, vz = kernels.search_max3d(
            placement.distance, placement.theta,
            cfg.source_length, cfg.receiver_length,
            rtol, 2**20, grid_n, 2 * grid_n,
        )
    elif constraint == "2d":
        k, vx, vy, vz = kernels.search_max2d(
            placement.distance, placement.theta, psi,
            cfg.source_length, cfg.receiver_length,
            rtol, 2**20, 4 * grid_n,
        )
    else:
        raise ValueError("constraint must be '3d' or '2d'")
    return float(k), Orientation.from_vector([vx, vy, vz])


def _grid_points(spec: RegionSpec, grid_step: float):
    """Member grid points of the quarter plane with full-plane weights."""
    zs = spec.source_height
    g = _family_scale(spec)
    reach = g / 2.0 if spec.constraint == "3d" else 2.0 / math.pi * g
    if reach <= zs:
        return None
    nmax = int(math.floor(math.sqrt(max(reach * reach - zs * zs, 0.0)) / grid_step))
    coords = grid_step * np.arange(nmax + 1)
    xx, yy = np.meshgrid(coords, coords, indexing="ij")
    k = _k_asym_arrays(spec, xx, yy)
    mask = k >= spec.k_threshold
    if not mask.any():
        return None
    x = xx[mask]
    y = yy[mask]
    # quarter-plane enumeration stands in for the full plane: mirrored
    # points carry identical values, so weight interior points 4x
    w = np.full(x.shape, 4.0)
    w[(x == 0.0) | (y == 0.0)] /= 2.0
    w[(x == 0.0) & (y == 0.0)] = 1.0
    return x, y, k[mask], w


def _make_cdf(values: np.ndarray, weights: np.ndarray) -> EmpiricalCdf:
    order = np.argsort(values, kind="stable")
    v = values[order]
    f = np.cumsum(weights[order])
    f /= f[-1]
    return EmpiricalCdf(v, f, False)


def cdf_simulation(
    spec: RegionSpec,
    grid_step: float,
    dist: Optional[OrientationDistribution] = None,
    method: str = "asymptotic",
    n_mc: int = 4096,
    search_grid: int = 64,
    rtol: float = 1e-6,
    batch: int = 256,
) -> EmpiricalCdf:
    """Empirical CDF of the mode-appropriate K over the region's grid points.

    Membership always uses the approximate formula family that defines
    the region, so the asymptotic and exact methods run on identical
    point sets.  ``method="exact"`` replaces the plotted values with
    quadrature K numbers: exhaustive-search optima for the optimum
    modes, seeded Monte-Carlo means (``n_mc`` draws per point, counter
    offsets derived from the point index) for the mean modes.
    """
    if method not in ("asymptotic", "exact"):
        raise ValueError("method must be 'asymptotic' or 'exact'")
    if not grid_step > 0:
        raise ValueError("grid step must be positive")
    pts = _grid_points(spec, grid_step)
    if pts is None:
        return EmpiricalCdf(np.empty(0), np.empty(0), True)
    x, y, k_asym, w = pts
    if method == "asymptotic":
        return _make_cdf(k_asym, w)
    zs = spec.source_height
    s2 = zs * zs + y * y
    rr = np.sqrt(s2 + x * x)
    thetas = np.arccos(x / rr)
    cfg = spec.cfg
    if spec.mode == "max":
        if spec.constraint == "3d":
            vals = kernels.sweep_max3d(
                rr, thetas, cfg.source_length, cfg.receiver_length,
                rtol, 2**20, search_grid, 2 * search_grid,
            )
        else:
            psis = np.arctan2(zs, y)
            vals = kernels.sweep_max2d(
                rr, thetas, psis, cfg.source_length, cfg.receiver_length,
                rtol, 2**20, 4 * search_grid,
            )
        return _make_cdf(np.asarray(vals), w)
    if dist is None:
        raise ValueError("expected-mode exact CDFs need an orientation distribution")
    want = "uni3d" if spec.constraint == "3d" else "uni2d"
    if dist.kind != want:
        raise ValueError("distribution kind %r does not match constraint %r"
                         % (dist.kind, spec.constraint))
    psis = np.arctan2(zs, y)
    vals = np.empty(x.shape[0])
    for lo in range(0, x.shape[0], batch):
        hi = min(lo + batch, x.shape[0])
        vs = np.empty((hi - lo, n_mc, 3))
        for i in range(lo, hi):
            vs[i - lo] = sample_orientations(dist, psis[i], n_mc, start=i * n_mc)
        vals[lo:hi] = kernels.sweep_mean_k(
            rr[lo:hi], thetas[lo:hi], vs,
            cfg.source_length, cfg.receiver_length, rtol, 2**20,
        )
    return _make_cdf(vals, w)


def ks_distance(a: EmpiricalCdf, b: EmpiricalCdf) -> float:
    """Kolmogorov-Smirnov distance between two (weighted) empirical CDFs."""
    if a.empty or b.empty:
        raise ValueError("cannot compare empty CDFs")
    support = np.concatenate([a.values, b.values])
    support.sort(kind="stable")

    def at(cdf, t):
        idx = np.searchsorted(cdf.values, t, side="right")
        out = np.zeros(t.shape)
        nz = idx > 0
        out[nz] = cdf.fractions[idx[nz] - 1]
        return out

    return float(np.max(np.abs(at(a, support) - at(b, support))))
