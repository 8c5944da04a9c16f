import math

import numpy as np
import pytest

from losbw import kernels
from losbw.kernels import (
    _arc_extrema_py,
    _grid_extrema_py,
    _k_number_py,
    _mean_k_py,
    _search_max2d_py,
    _search_max3d_py,
    _w_x_py,
    _w_z_py,
    backend,
    k_number_batch,
    set_threads,
    w_arc_batch,
    w_x_batch,
    w_z_batch,
)

from oracles import random_unit_vectors, valid_placement

needs_numba = pytest.mark.skipif(
    backend() != "numba", reason="lane comparison runs on the numba backend"
)


def _cases(n=60, seed=50):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        R, theta = valid_placement(rng, 1000.0, 20.0)
        v = random_unit_vectors(rng, 1)[0]
        l = rng.uniform(-10.0, 10.0)
        yield l, R, theta, v


def test_backend_reports_lane():
    assert backend() in ("numba", "numpy")
    set_threads(2)  # no-op on the numpy lane


@needs_numba
def test_scalar_kernels_match_python_reference():
    for l, R, theta, v in _cases():
        assert kernels.w_z(l, R, theta, 1000.0) == pytest.approx(
            _w_z_py(l, R, theta, 1000.0), rel=1e-14
        )
        assert kernels.w_x(l, R, theta, 1000.0) == pytest.approx(
            _w_x_py(l, R, theta, 1000.0), rel=1e-14
        )
        got = kernels.arc_extrema(l, R, theta, v[0], v[1], v[2], 1000.0)
        ref = _arc_extrema_py(l, R, theta, v[0], v[1], v[2], 1000.0)
        assert got == pytest.approx(ref, rel=1e-13, abs=1e-13)


@needs_numba
def test_grid_extrema_matches_python_reference():
    for l, R, theta, v in _cases(20):
        got = kernels.grid_extrema(l, R, theta, v[0], v[1], v[2], 1000.0, 512)
        ref = _grid_extrema_py(l, R, theta, v[0], v[1], v[2], 1000.0, 512)
        np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-12)


@needs_numba
def test_k_number_matches_python_reference():
    for _, R, theta, v in _cases(25):
        got = kernels.k_number(R, theta, v[0], v[1], v[2], 1000.0, 20.0, 1e-6, 2**20)
        ref = _k_number_py(R, theta, v[0], v[1], v[2], 1000.0, 20.0, 1e-6, 2**20)
        assert got[1] and ref[1]
        assert got[0] == pytest.approx(ref[0], rel=1e-12)


@needs_numba
def test_searches_match_python_reference():
    got = kernels.search_max3d(4500.0, 1.1, 1000.0, 20.0, 1e-6, 2**20, 64, 128)
    ref = _search_max3d_py(4500.0, 1.1, 1000.0, 20.0, 1e-6, 2**20, 64, 128)
    assert got[0] == pytest.approx(ref[0], rel=1e-10)
    got = kernels.search_max2d(4500.0, 1.1, 0.7, 1000.0, 20.0, 1e-6, 2**20, 256)
    ref = _search_max2d_py(4500.0, 1.1, 0.7, 1000.0, 20.0, 1e-6, 2**20, 256)
    assert got[0] == pytest.approx(ref[0], rel=1e-10)


@needs_numba
def test_mean_k_matches_python_reference():
    rng = np.random.default_rng(51)
    vs = random_unit_vectors(rng, 64)
    got = kernels.mean_k(vs, 4500.0, 1.3, 1000.0, 20.0, 1e-6, 2**20)
    ref = _mean_k_py(vs, 4500.0, 1.3, 1000.0, 20.0, 1e-6, 2**20)
    assert got == pytest.approx(ref, rel=1e-12)


def test_batch_forms_match_scalar():
    ls, rs, thetas, vs = [], [], [], []
    for l, R, theta, v in _cases(40, seed=52):
        ls.append(l)
        rs.append(R)
        thetas.append(theta)
        vs.append(v)
    ls = np.array(ls)
    rs = np.array(rs)
    thetas = np.array(thetas)
    vs = np.array(vs)
    wz = w_z_batch(ls, rs, thetas, 1000.0)
    wx = w_x_batch(ls, rs, thetas, 1000.0)
    wa = w_arc_batch(ls, rs, thetas, vs[:, 0], vs[:, 1], vs[:, 2], 1000.0)
    for i in range(len(ls)):
        assert wz[i] == pytest.approx(
            kernels.w_z(ls[i], rs[i], thetas[i], 1000.0), rel=1e-13
        )
        assert wx[i] == pytest.approx(
            kernels.w_x(ls[i], rs[i], thetas[i], 1000.0), rel=1e-13
        )
        assert wa[i] == pytest.approx(
            kernels.w_arc(ls[i], rs[i], thetas[i], vs[i, 0], vs[i, 1], vs[i, 2], 1000.0),
            rel=1e-13,
        )


def test_k_number_batch_matches_scalar():
    rng = np.random.default_rng(53)
    vs = random_unit_vectors(rng, 32)
    ks, ok = k_number_batch(4500.0, 1.2, vs[:, 0], vs[:, 1], vs[:, 2], 1000.0, 20.0)
    assert ok.all()
    for i in range(32):
        ref = kernels.k_number(4500.0, 1.2, vs[i, 0], vs[i, 1], vs[i, 2], 1000.0, 20.0)
        assert ks[i] == pytest.approx(ref[0], rel=1e-12)


def test_sweeps_match_per_point_calls():
    rng = np.random.default_rng(54)
    n = 4
    rs = rng.uniform(4500.0, 9000.0, size=n)
    thetas = rng.uniform(0.4, math.pi - 0.4, size=n)
    psis = rng.uniform(0.0, math.pi / 2, size=n)
    out = kernels.sweep_max3d(rs, thetas, 1000.0, 20.0, 1e-6, 2**20, 64, 128)
    for i in range(n):
        ref = kernels.search_max3d(rs[i], thetas[i], 1000.0, 20.0, 1e-6, 2**20, 64, 128)
        assert out[i] == pytest.approx(ref[0], rel=1e-12)
    out = kernels.sweep_max2d(rs, thetas, psis, 1000.0, 20.0, 1e-6, 2**20, 256)
    for i in range(n):
        ref = kernels.search_max2d(rs[i], thetas[i], psis[i], 1000.0, 20.0, 1e-6, 2**20, 256)
        assert out[i] == pytest.approx(ref[0], rel=1e-12)
    vs = np.stack([random_unit_vectors(rng, 128) for _ in range(n)])
    out = kernels.sweep_mean_k(rs, thetas, vs, 1000.0, 20.0, 1e-6, 2**20)
    for i in range(n):
        ref = kernels.mean_k(vs[i], rs[i], thetas[i], 1000.0, 20.0, 1e-6, 2**20)
        assert out[i] == pytest.approx(ref, rel=1e-12)


def test_quadrature_cap_flags_nonconvergence():
    k, ok = kernels.k_number(4500.0, math.pi / 2, 0.0, 0.0, 1.0, 1000.0, 20.0, 1e-6, 4)
    assert not ok
    assert k == pytest.approx(4.41725, rel=0.05)
