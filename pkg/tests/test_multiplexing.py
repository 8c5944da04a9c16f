import math

import numpy as np
import pytest

from losbw import kernels
from losbw.bandwidth import k_number
from losbw.geometry import (
    EY,
    EZ,
    GroundScenario,
    Orientation,
    Placement,
    placement_from_ground,
    projection_direction,
    rotation_gcs_to_lcs,
)
from losbw.multiplexing import (
    EmpiricalCdf,
    OrientationDistribution,
    RegionSpec,
    cdf_simulation,
    k_approx,
    k_exp_2d,
    k_exp_3d,
    k_max_2d,
    k_max_3d,
    ks_distance,
    optimal_orientation_search,
    region_boundary,
    region_membership,
    sample_orientation,
    sample_orientations,
)

from oracles import random_unit_vectors

# desk-scale study point: Ls=1000, Lr=20, K0=1 -> G0 = 20000 wavelengths,
# receiver straight below a source lifted 4500 wavelengths
YMAX_3D_EXP = 8930.285549745875
X0_3D_EXP = 4974.9371855331
BELOW = Placement(4500.0, math.pi / 2)


def spec_for(cfg, mode, constraint, zs=4500.0, k0=1.0):
    return RegionSpec(cfg, zs, k0, constraint, mode)


def test_region_spec_invariants(cfg):
    with pytest.raises(ValueError):
        RegionSpec(cfg, 400.0, 1.0, "3d", "expected")  # too low a source
    with pytest.raises(ValueError):
        RegionSpec(cfg, 4500.0, 0.0, "3d", "expected")
    with pytest.raises(ValueError):
        RegionSpec(cfg, 4500.0, 1.0, "5d", "expected")
    assert spec_for(cfg, "expected", "3d").g0 == pytest.approx(20000.0)


def test_k_approx_examples(cfg):
    assert k_approx(BELOW, EY, cfg) == 0.0
    assert k_approx(BELOW, EZ, cfg) == pytest.approx(4.444444444444445, rel=1e-12)
    rng = np.random.default_rng(30)
    for _ in range(20):
        theta = rng.uniform(0.1, math.pi - 0.1)
        p = Placement(rng.uniform(600.0, 20000.0), theta)
        u = projection_direction(theta)
        k, _ = k_max_3d(p, cfg)
        assert k_approx(p, Orientation.from_vector(u), cfg) == pytest.approx(k, rel=1e-12)


def test_k_max_3d(cfg):
    k, best = k_max_3d(BELOW, cfg)
    assert k == pytest.approx(4.444444444444445, rel=1e-12)
    assert abs(best.vz) == pytest.approx(1.0, abs=1e-15)
    assert abs(best.vx) < 1e-15 and best.vy == 0.0
    assert k_max_3d(Placement(5000.0, 1e-6), cfg)[0] < 1e-4
    rng = np.random.default_rng(31)
    for _ in range(200):
        theta = rng.uniform(0.05, math.pi - 0.05)
        psi = rng.uniform(0.0, math.pi / 2)
        p = Placement(rng.uniform(600.0, 30000.0), theta)
        assert k_max_2d(p, psi, cfg) <= k_max_3d(p, cfg)[0] * (1 + 1e-12)
        # the reported optimum attains the maximum
        k, best = k_max_3d(p, cfg)
        assert k_approx(p, best, cfg) == pytest.approx(k, rel=1e-12)


def test_k_max_2d_examples(cfg):
    assert k_max_2d(BELOW, 0.77, cfg) == pytest.approx(k_max_3d(BELOW, cfg)[0])
    p = Placement(9000.0, 2.2)
    assert k_max_2d(p, 0.0, cfg) == pytest.approx(k_max_3d(p, cfg)[0], rel=1e-12)
    p = Placement(4500.0, math.pi / 4)
    assert k_max_2d(p, math.pi / 2, cfg) == pytest.approx(2.2222222222222223, rel=1e-12)


def test_expected_value_identities(cfg):
    rng = np.random.default_rng(32)
    for _ in range(100):
        theta = rng.uniform(0.05, math.pi - 0.05)
        psi = rng.uniform(0.0, math.pi / 2)
        p = Placement(rng.uniform(600.0, 30000.0), theta)
        assert k_exp_3d(p, cfg) == 0.5 * k_max_3d(p, cfg)[0]
        assert k_exp_2d(p, psi, cfg) == (2.0 / math.pi) * k_max_2d(p, psi, cfg)
    assert k_exp_3d(BELOW, cfg) == pytest.approx(2.2222222222222223, rel=1e-12)
    assert k_exp_2d(BELOW, 0.4, cfg) == pytest.approx(2.8294212105225838, rel=1e-12)
    # ground-circle mean approaches (4/pi) of the sphere mean as the
    # containing plane flattens out
    p = Placement(9000.0, 1.1)
    assert k_exp_2d(p, 1e-9, cfg) == pytest.approx(
        4.0 / math.pi * k_exp_3d(p, cfg), rel=1e-9
    )


def test_sample_orientations_determinism_and_geometry():
    dist = OrientationDistribution("uni3d", seed=42)
    a = sample_orientations(dist, 0.3, 100, start=0)
    b = sample_orientations(dist, 0.3, 60, start=40)
    np.testing.assert_array_equal(a[40:], b)
    one = sample_orientation(dist, 0.3, index=77)
    row = sample_orientations(dist, 0.3, 1, start=77)[0]
    assert (one.vx, one.vy, one.vz) == tuple(row)
    np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1.0, atol=1e-12)
    assert (a[:, 0] >= 0).all()
    # ground-circle draws have no component along the ground normal
    dist2 = OrientationDistribution("uni2d", seed=7)
    psi = 0.9
    v = sample_orientations(dist2, psi, 500)
    q = rotation_gcs_to_lcs(psi)
    gcs = v @ q  # rows times Q equals Q^T v
    np.testing.assert_allclose(gcs[:, 2], 0.0, atol=1e-12)


def test_sample_orientation_sphere_uniformity():
    dist = OrientationDistribution("uni3d", seed=3)
    n = 1_000_000
    v = sample_orientations(dist, 0.0, n)
    # canonicalization folds the sphere: compare against the folded mean
    # |E v| of half-sphere: (0.5, 0, 0); use the GCS mean instead
    bg = np.random.Philox(key=np.uint64(3))
    raw = np.random.Generator(bg).random((n, 4))[:, :2]
    gamma = 2 * math.pi * raw[:, 0]
    cosphi = 1 - 2 * raw[:, 1]
    sinphi = np.sqrt(1 - cosphi**2)
    g = np.column_stack([sinphi * np.cos(gamma), sinphi * np.sin(gamma), cosphi])
    assert np.abs(g.mean(axis=0)).max() < 0.005


def test_mc_projection_factor_means():
    rng = np.random.default_rng(33)
    n = 200_000
    for trial in range(3):
        theta = rng.uniform(0.1, math.pi - 0.1)
        psi = rng.uniform(0.0, math.pi / 2)
        u = projection_direction(theta)
        v3 = sample_orientations(OrientationDistribution("uni3d", seed=trial), psi, n)
        m3 = np.abs(v3 @ u).mean()
        assert m3 == pytest.approx(0.5, abs=0.01)
        v2 = sample_orientations(OrientationDistribution("uni2d", seed=trial), psi, n)
        m2 = np.abs(v2 @ u).mean()
        expect = 2 / math.pi * math.sqrt(1 - math.cos(theta) ** 2 * math.sin(psi) ** 2)
        assert m2 == pytest.approx(expect, abs=0.01)


def test_mc_k_means_converge_to_expected_values(cfg):
    # sample means of the orientation-specific approximation reproduce
    # the analytic expected values to 0.5% at one million draws
    p = Placement(6200.0, 1.05)
    psi = 0.6
    n = 1_000_000
    v3 = sample_orientations(OrientationDistribution("uni3d", 77), psi, n)
    u = projection_direction(p.theta)
    base = math.sin(p.theta) * 20000.0 / p.distance
    mean3 = float(np.abs(v3 @ u).mean()) * base
    assert mean3 == pytest.approx(k_exp_3d(p, cfg), rel=5e-3)
    v2 = sample_orientations(OrientationDistribution("uni2d", 78), psi, n)
    mean2 = float(np.abs(v2 @ u).mean()) * base
    assert mean2 == pytest.approx(k_exp_2d(p, psi, cfg), rel=5e-3)


def test_max2d_never_beats_max3d_on_ground_grid(cfg):
    xs = np.linspace(0.0, 12000.0, 100)
    ys = np.linspace(0.0, 15000.0, 100)
    for x in xs:
        p, psi = placement_from_ground(GroundScenario(4500.0, x, 0.0), cfg)
        assert k_max_2d(p, psi, cfg) <= k_max_3d(p, cfg)[0] * (1 + 1e-12)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    zs = 4500.0
    r = np.sqrt(zs**2 + xx**2 + yy**2)
    sin_th = np.sqrt(zs**2 + yy**2) / r
    base = sin_th * 20000.0 / r
    factor = np.sqrt(1 - (xx / r) ** 2 * (zs**2 / (zs**2 + yy**2)))
    assert (factor * base <= base * (1 + 1e-12)).all()


def test_region_membership(cfg):
    spec = spec_for(cfg, "expected", "3d")
    assert region_membership(spec, 0.0, 0.0)
    assert not region_membership(spec, 0.0, YMAX_3D_EXP + 10.0)
    assert region_membership(spec, X0_3D_EXP - 1.0, 0.0)
    assert not region_membership(spec, X0_3D_EXP + 1.0, 0.0)
    # at the existence threshold only the degenerate point below the
    # source still meets the inequality; everywhere else fails
    empty = spec_for(cfg, "expected", "3d", zs=10_000.0)
    assert region_membership(empty, 0.0, 0.0)
    xs = np.linspace(1.0, 30000, 40)
    assert not any(region_membership(empty, x, y) for x in xs for y in xs[:20])
    with pytest.raises(ValueError):
        region_membership(spec, 0.0, -1.0)


def test_region_membership_matches_explicit_inequalities(cfg):
    # independently coded region conditions on ground coordinates
    rng = np.random.default_rng(34)
    zs = 4500.0
    g0 = 20000.0
    spec3 = spec_for(cfg, "expected", "3d")
    spec2 = spec_for(cfg, "expected", "2d")
    for _ in range(500):
        x = rng.uniform(0, 12000)
        y = rng.uniform(0, 14000)
        r2 = zs * zs + x * x + y * y
        lhs3 = math.sqrt(zs * zs + y * y) / (2 * r2)
        assert region_membership(spec3, x, y) == (lhs3 >= 1.0 / g0)
        lhs2 = 2 / math.pi / r2 * math.sqrt(zs * zs + y * y - zs * zs * x * x / r2)
        assert region_membership(spec2, x, y) == (lhs2 >= 1.0 / g0)


def test_region_boundary_3d(cfg):
    b = region_boundary(spec_for(cfg, "expected", "3d"), 200)
    assert b.nonempty
    assert b.y_max == pytest.approx(YMAX_3D_EXP, abs=1e-6)
    assert b.points[0][0] == pytest.approx(X0_3D_EXP, abs=1e-6)
    assert b.points[-1][0] == pytest.approx(0.0, abs=1e-6)
    # every boundary point satisfies the defining equality
    zs = 4500.0
    for x, y in b.points:
        r2 = zs * zs + x * x + y * y
        resid = math.sqrt(zs * zs + y * y) / (2 * r2) * 20000.0 - 1.0
        assert abs(resid) < 1e-8
    # optimum-mode region equals the mean-mode region at half the threshold
    bmax = region_boundary(spec_for(cfg, "max", "3d", k0=1.0), 50)
    bexp = region_boundary(spec_for(cfg, "expected", "3d", k0=0.5), 50)
    np.testing.assert_allclose(bmax.points, bexp.points, rtol=1e-12)


def test_region_boundary_2d(cfg):
    b = region_boundary(spec_for(cfg, "expected", "2d"), 100)
    assert b.nonempty
    assert b.y_max == pytest.approx(
        math.sqrt((2 / math.pi * 20000.0) ** 2 - 4500.0**2), rel=1e-12
    )
    zs = 4500.0
    for x, y in b.points:
        r2 = zs * zs + x * x + y * y
        lhs = 2 / math.pi / r2 * math.sqrt(zs * zs + y * y - zs * zs * x * x / r2)
        assert abs(lhs * 20000.0 - 1.0) < 1e-8
    bmax = region_boundary(spec_for(cfg, "max", "2d", k0=1.0), 40)
    bexp = region_boundary(spec_for(cfg, "expected", "2d", k0=2.0 / math.pi), 40)
    np.testing.assert_allclose(bmax.points, bexp.points, rtol=1e-10)


def test_region_nonemptiness_thresholds(cfg):
    # mean-mode 3D region exists only below half the characteristic length
    assert region_boundary(spec_for(cfg, "expected", "3d", zs=9999.0), 10).nonempty
    assert not region_boundary(spec_for(cfg, "expected", "3d", zs=10_000.0), 10).nonempty
    lim = 2 / math.pi * 20000.0
    assert region_boundary(spec_for(cfg, "expected", "2d", zs=lim - 1.0), 10).nonempty
    assert not region_boundary(spec_for(cfg, "expected", "2d", zs=lim + 1.0), 10).nonempty


def test_optimal_orientation_search(cfg):
    k, best = optimal_orientation_search(BELOW, math.pi / 2, "3d", cfg)
    angle = math.degrees(math.acos(min(1.0, abs(best.vz))))
    assert angle < 2.0
    assert k == pytest.approx(k_number(BELOW, EZ, cfg), rel=1e-6)
    with pytest.raises(ValueError):
        optimal_orientation_search(BELOW, 0.0, "3d", cfg, grid_n=32)


def test_search_beats_analytic_candidate_and_random(cfg):
    rng = np.random.default_rng(35)
    for _ in range(3):
        s = GroundScenario(4500.0, rng.uniform(0, 4000), rng.uniform(0, 6000))
        p, psi = placement_from_ground(s, cfg)
        k3, _ = optimal_orientation_search(p, psi, "3d", cfg)
        _, cand = k_max_3d(p, cfg)
        assert k3 >= k_number(p, cand, cfg) * (1 - 1e-3)
        k2, _ = optimal_orientation_search(p, psi, "2d", cfg)
        assert k2 <= k3 * (1 + 1e-9)
        dist = OrientationDistribution("uni3d", seed=9)
        vs = sample_orientations(dist, psi, 1000)
        ks, ok = kernels.k_number_batch(
            p.distance, p.theta, vs[:, 0], vs[:, 1], vs[:, 2],
            cfg.source_length, cfg.receiver_length,
        )
        assert ok.all() and k3 >= float(ks.max())


def test_exact_vs_approx_k_far_field(cfg):
    # slope-one product formula tracks the quadrature value once the
    # receiver is short relative to the distance (projection not tiny)
    rng = np.random.default_rng(36)
    checked = 0
    while checked < 40:
        theta = rng.uniform(0.15, math.pi - 0.15)
        R = rng.uniform(1000.0, 30000.0)
        v = random_unit_vectors(rng, 1)[0]
        o = Orientation.from_vector(v)
        p = Placement(R, theta)
        approx = k_approx(p, o, cfg)
        proj = abs(o.vx * math.cos(theta) - o.vz * math.sin(theta))
        if proj < 0.1:
            continue
        exact = k_number(p, o, cfg)
        assert abs(approx - exact) / exact <= 0.05
        checked += 1


def test_cdf_single_point(cfg):
    spec = spec_for(cfg, "expected", "3d")
    emp = cdf_simulation(spec, 20000.0)
    assert not emp.empty
    assert emp.values.shape == (1,)
    assert emp.fractions[0] == 1.0
    assert emp.values[0] == pytest.approx(2.2222222222222223, rel=1e-12)


def test_cdf_empty_region(cfg):
    spec = spec_for(cfg, "expected", "3d", zs=10_000.0)
    emp = cdf_simulation(spec, 50.0)
    assert emp.empty and emp.values.size == 0


def test_cdf_monotone_and_deterministic(cfg):
    spec = spec_for(cfg, "expected", "3d")
    a = cdf_simulation(spec, 500.0)
    assert (np.diff(a.values) >= 0).all()
    assert (np.diff(a.fractions) > 0).all()
    assert a.fractions[-1] == 1.0
    dist = OrientationDistribution("uni3d", seed=5)
    e1 = cdf_simulation(spec, 1000.0, dist, "exact", n_mc=256)
    e2 = cdf_simulation(spec, 1000.0, dist, "exact", n_mc=256)
    np.testing.assert_array_equal(e1.values, e2.values)
    with pytest.raises(ValueError):
        cdf_simulation(spec, 1000.0, OrientationDistribution("uni2d", 0), "exact")
    with pytest.raises(ValueError):
        cdf_simulation(spec, 1000.0, None, "exact")


def test_cdf_exact_close_to_asymptotic_coarse(cfg):
    # coarse-grid smoke version of the full acceptance comparison
    spec = spec_for(cfg, "max", "3d")
    asym = cdf_simulation(spec, 2000.0)
    exact = cdf_simulation(spec, 2000.0, None, "exact", search_grid=64)
    assert asym.values.size == exact.values.size
    assert ks_distance(asym, exact) <= 0.05


def test_ks_distance_basics(cfg):
    a = EmpiricalCdf(np.array([1.0, 2.0]), np.array([0.5, 1.0]), False)
    assert ks_distance(a, a) == 0.0
    b = EmpiricalCdf(np.array([1.5, 2.0]), np.array([0.5, 1.0]), False)
    assert ks_distance(a, b) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ks_distance(a, EmpiricalCdf(np.empty(0), np.empty(0), True))
