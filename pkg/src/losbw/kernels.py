"""Hot numeric kernels with two interchangeable backends.

The default backend JIT-compiles the scalar kernels and grid sweeps with
numba; setting the environment variable ``LOSBW_NO_NUMBA=1`` (before
import) selects a pure-numpy fallback implementing the same algorithms.
Both lanes agree to quadrature/rounding tolerance; within one lane all
results are deterministic.  ``benchmarks/bench_kernels.py`` compares the
two.

Kernel inventory:

* closed-form center bandwidths for the two principal orientations
  (``w_z``, ``w_x``) and the exact bandwidth for an arbitrary
  orientation via the planar-arc extremum argument (``w_arc``,
  ``arc_extrema``): every source-to-receiver unit vector at fixed
  receiver position lies on one great-circle arc, so the extreme
  projections onto the array direction have a closed form;
* ``grid_extrema``: extremization by uniform grid scan plus
  golden-section refinement (the slow, assumption-free route used for
  cross-checks);
* ``k_number``: DOF proxy by adaptive composite quadrature (trapezoid
  doubling with Simpson extrapolation) of the local bandwidth;
* exhaustive orientation searches and Monte-Carlo means, plus
  ``sweep_*`` drivers used by the region/CDF simulations.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "backend",
    "set_threads",
    "w_z",
    "w_x",
    "w_arc",
    "arc_extrema",
    "grid_extrema",
    "k_number",
    "search_max3d",
    "search_max2d",
    "mean_k",
    "sweep_max3d",
    "sweep_max2d",
    "sweep_mean_k",
    "w_z_batch",
    "w_x_batch",
    "w_arc_batch",
    "k_number_batch",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0
_GOLDEN_ITERS = 80
_TINY = 1e-300

_env = os.environ.get("LOSBW_NO_NUMBA", "").strip()
if _env not in ("", "0"):
    NUMBA_ENABLED = False
else:
    try:
        import numba
        from numba import njit, prange

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_ENABLED = False


def backend() -> str:
    """Active backend name: ``"numba"`` or ``"numpy"``."""
    return "numba" if NUMBA_ENABLED else "numpy"


def set_threads(n: int) -> None:
    """Set the worker count used by parallel sweeps (numba lane only)."""
    if NUMBA_ENABLED and n >= 1:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


# ---------------------------------------------------------------------------
# scalar kernels (plain python, JIT-compiled when the numba lane is active)
# ---------------------------------------------------------------------------


def _w_z_py(l, R, theta, Ls):
    u1 = l + R * math.cos(theta) + 0.5 * Ls
    u2 = l + R * math.cos(theta) - 0.5 * Ls
    c = R * math.sin(theta)
    return u1 / math.hypot(u1, c) - u2 / math.hypot(u2, c)


def _w_x_py(l, R, theta, Ls):
    # assumes l + R sin(theta) > 0 (guaranteed by non-invalid placements)
    u = l + R * math.sin(theta)
    ac = R * abs(math.cos(theta))
    if ac <= 0.5 * Ls:
        return 1.0 - u / math.hypot(u, ac + 0.5 * Ls)
    return u / math.hypot(u, ac - 0.5 * Ls) - u / math.hypot(u, ac + 0.5 * Ls)


def _arc_extrema_py(l, R, theta, vx, vy, vz, Ls):
    # All r(l, q) = p(l) - s(q) lie in the plane spanned by (a, b, 0) and
    # e_z; their unit vectors form a great-circle arc, so the projection
    # onto v is C*cos(omega - omega0) with omega strictly decreasing in q.
    a = l * vx + R * math.sin(theta)
    b = l * vy
    c0 = l * vz + R * math.cos(theta)
    rho = math.hypot(a, b)
    m = (a * vx + b * vy) / rho
    amp = math.hypot(m, vz)
    w0 = math.atan2(vz, m)
    wlo = math.atan2(c0 - 0.5 * Ls, rho)  # q = +Ls/2
    whi = math.atan2(c0 + 0.5 * Ls, rho)  # q = -Ls/2
    kmax = -2.0
    kmin = 2.0
    qmax = 0.0
    qmin = 0.0
    # candidates: both endpoints plus interior critical angles of the cosine
    for t in range(5):
        if t == 0:
            w = whi
            q = -0.5 * Ls
        elif t == 1:
            w = wlo
            q = 0.5 * Ls
        else:
            w = w0 + (t - 3) * math.pi  # w0 - pi, w0, w0 + pi
            if w <= wlo or w >= whi:
                continue
            q = c0 - rho * math.tan(w)
        k = amp * math.cos(w - w0)
        if k > kmax or (k == kmax and q < qmax):
            kmax = k
            qmax = q
        if k < kmin or (k == kmin and q < qmin):
            kmin = k
            qmin = q
    return kmax, kmin, qmax, qmin


def _w_arc_py(l, R, theta, vx, vy, vz, Ls):
    kmax, kmin, _, _ = _arc_extrema_py(l, R, theta, vx, vy, vz, Ls)
    return kmax - kmin


def _kappa_py(l, q, R, theta, vx, vy, vz):
    rx = l * vx + R * math.sin(theta)
    ry = l * vy
    rz = l * vz + R * math.cos(theta) - q
    n = math.sqrt(rx * rx + ry * ry + rz * rz)
    return (rx * vx + ry * vy + rz * vz) / n


def _golden_kappa_py(sign, qa, qb, l, R, theta, vx, vy, vz):
    # fixed-iteration golden-section search for max (sign=+1) / min (-1)
    a = qa
    b = qb
    c = a + _INVPHI2 * (b - a)
    d = a + _INVPHI * (b - a)
    fc = sign * _kappa_py(l, c, R, theta, vx, vy, vz)
    fd = sign * _kappa_py(l, d, R, theta, vx, vy, vz)
    for _ in range(_GOLDEN_ITERS):
        if fc > fd:
            b = d
            d = c
            fd = fc
            c = a + _INVPHI2 * (b - a)
            fc = sign * _kappa_py(l, c, R, theta, vx, vy, vz)
        else:
            a = c
            c = d
            fc = fd
            d = a + _INVPHI * (b - a)
            fd = sign * _kappa_py(l, d, R, theta, vx, vy, vz)
    if fc > fd:
        return sign * fc, c
    return sign * fd, d


def _grid_extrema_py(l, R, theta, vx, vy, vz, Ls, n):
    h = Ls / (n - 1)
    kmax = -2.0
    kmin = 2.0
    qmax = 0.0
    qmin = 0.0
    kprev2 = 0.0
    kprev = 0.0
    for i in range(n):
        q = -0.5 * Ls + i * h
        k = _kappa_py(l, q, R, theta, vx, vy, vz)
        if k > kmax or (k == kmax and q < qmax):
            kmax = k
            qmax = q
        if k < kmin or (k == kmin and q < qmin):
            kmin = k
            qmin = q
        if i >= 2:
            d0 = kprev - kprev2
            d1 = k - kprev
            if d0 * d1 < 0.0 or (d0 != 0.0 and d1 == 0.0) or (d0 == 0.0 and d1 != 0.0):
                qa = -0.5 * Ls + (i - 2) * h
                sign = 1.0 if d0 > d1 else -1.0
                kr, qr = _golden_kappa_py(sign, qa, q, l, R, theta, vx, vy, vz)
                if kr > kmax or (kr == kmax and qr < qmax):
                    kmax = kr
                    qmax = qr
                if kr < kmin or (kr == kmin and qr < qmin):
                    kmin = kr
                    qmin = qr
        kprev2 = kprev
        kprev = k
    return kmax, kmin, qmax, qmin


def _k_number_py(R, theta, vx, vy, vz, Ls, Lr, rtol, max_evals):
    a = -0.5 * Lr
    b = 0.5 * Lr
    fa = _w_arc_py(a, R, theta, vx, vy, vz, Ls)
    fb = _w_arc_py(b, R, theta, vx, vy, vz, Ls)
    t = 0.5 * (b - a) * (fa + fb)
    s_prev = math.inf
    n = 1
    evals = 2
    while True:
        if evals + n > max_evals:
            return s_prev if math.isfinite(s_prev) else t, False
        h = (b - a) / (2 * n)
        acc = 0.0
        for i in range(n):
            acc += _w_arc_py(a + (2 * i + 1) * h, R, theta, vx, vy, vz, Ls)
        evals += n
        tn = 0.5 * t + h * acc
        s = (4.0 * tn - t) / 3.0
        if math.isfinite(s_prev) and abs(s - s_prev) <= rtol * max(abs(s), _TINY):
            return s, True
        t = tn
        s_prev = s
        n *= 2


def _k_orient_py(phi, gam, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals):
    # mode2d: orientation confined to the ground-plane circle (angle gam)
    if mode2d:
        sg = math.sin(gam)
        vx = math.cos(psi) * sg
        vy = math.sin(psi) * sg
        vz = math.cos(gam)
    else:
        sp = math.sin(phi)
        vx = sp * math.cos(gam)
        vy = sp * math.sin(gam)
        vz = math.cos(phi)
    k, _ = _k_number_py(R, theta, vx, vy, vz, Ls, Lr, rtol, max_evals)
    return k


def _golden_orient_py(
    coord, lo, hi, phi, gam, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals
):
    # golden-section maximization over one angle (coord 0: phi, 1: gam)
    a = lo
    b = hi
    c = a + _INVPHI2 * (b - a)
    d = a + _INVPHI * (b - a)
    if coord == 0:
        fc = _k_orient_py(c, gam, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
        fd = _k_orient_py(d, gam, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
    else:
        fc = _k_orient_py(phi, c, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
        fd = _k_orient_py(phi, d, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
    for _ in range(40):
        if fc > fd:
            b = d
            d = c
            fd = fc
            c = a + _INVPHI2 * (b - a)
            if coord == 0:
                fc = _k_orient_py(c, gam, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
            else:
                fc = _k_orient_py(phi, c, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
        else:
            a = c
            c = d
            fc = fd
            d = a + _INVPHI * (b - a)
            if coord == 0:
                fd = _k_orient_py(d, gam, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
            else:
                fd = _k_orient_py(phi, d, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
    if fc > fd:
        return fc, c
    return fd, d


def _search_max3d_py(R, theta, Ls, Lr, rtol, max_evals, nphi, ngam):
    best = -1.0
    bphi = 0.0
    bgam = 0.0
    for i in range(nphi):
        phi = math.pi * i / (nphi - 1)
        for j in range(ngam):
            gam = 2.0 * math.pi * j / ngam
            k = _k_orient_py(phi, gam, R, theta, 0.0, False, Ls, Lr, rtol, max_evals)
            if k > best:
                best = k
                bphi = phi
                bgam = gam
    dphi = math.pi / (nphi - 1)
    dgam = 2.0 * math.pi / ngam
    for _ in range(2):
        k, bphi = _golden_orient_py(
            0, max(0.0, bphi - dphi), min(math.pi, bphi + dphi),
            bphi, bgam, R, theta, 0.0, False, Ls, Lr, rtol, max_evals,
        )
        if k > best:
            best = k
        k, bgam = _golden_orient_py(
            1, bgam - dgam, bgam + dgam,
            bphi, bgam, R, theta, 0.0, False, Ls, Lr, rtol, max_evals,
        )
        if k > best:
            best = k
        dphi *= 0.25
        dgam *= 0.25
    sp = math.sin(bphi)
    return best, sp * math.cos(bgam), sp * math.sin(bgam), math.cos(bphi)


def _search_max2d_py(R, theta, psi, Ls, Lr, rtol, max_evals, ngam):
    best = -1.0
    bgam = 0.0
    for j in range(ngam):
        gam = math.pi * j / ngam  # K is pi-periodic in gam (sign flip)
        k = _k_orient_py(0.0, gam, R, theta, psi, True, Ls, Lr, rtol, max_evals)
        if k > best:
            best = k
            bgam = gam
    dgam = math.pi / ngam
    for _ in range(2):
        k, bgam = _golden_orient_py(
            1, bgam - dgam, bgam + dgam,
            0.0, bgam, R, theta, psi, True, Ls, Lr, rtol, max_evals,
        )
        if k > best:
            best = k
        dgam *= 0.25
    sg = math.sin(bgam)
    return best, math.cos(psi) * sg, math.sin(psi) * sg, math.cos(bgam)


def _mean_k_py(vs, R, theta, Ls, Lr, rtol, max_evals):
    acc = 0.0
    for i in range(vs.shape[0]):
        k, _ = _k_number_py(R, theta, vs[i, 0], vs[i, 1], vs[i, 2], Ls, Lr, rtol, max_evals)
        acc += k
    return acc / vs.shape[0]


# ---------------------------------------------------------------------------
# vectorized (numpy) forms, shared by both lanes for array inputs
# ---------------------------------------------------------------------------


def w_z_batch(l, R, theta, Ls):
    """Closed-form bandwidth for the parallel orientation, broadcastable."""
    l, R, theta = np.broadcast_arrays(np.asarray(l, float), np.asarray(R, float),
                                      np.asarray(theta, float))
    u1 = l + R * np.cos(theta) + 0.5 * Ls
    u2 = l + R * np.cos(theta) - 0.5 * Ls
    c = R * np.sin(theta)
    return u1 / np.hypot(u1, c) - u2 / np.hypot(u2, c)


def w_x_batch(l, R, theta, Ls):
    """Closed-form bandwidth for the boresight orientation, broadcastable."""
    l, R, theta = np.broadcast_arrays(np.asarray(l, float), np.asarray(R, float),
                                      np.asarray(theta, float))
    u = l + R * np.sin(theta)
    ac = R * np.abs(np.cos(theta))
    near = 1.0 - u / np.hypot(u, ac + 0.5 * Ls)
    far = u / np.hypot(u, np.abs(ac - 0.5 * Ls)) - u / np.hypot(u, ac + 0.5 * Ls)
    return np.where(ac <= 0.5 * Ls, near, far)


def w_arc_batch(l, R, theta, vx, vy, vz, Ls):
    """Exact general-orientation bandwidth, broadcastable over all inputs."""
    l, R, theta, vx, vy, vz = np.broadcast_arrays(
        np.asarray(l, float), np.asarray(R, float), np.asarray(theta, float),
        np.asarray(vx, float), np.asarray(vy, float), np.asarray(vz, float))
    a = l * vx + R * np.sin(theta)
    b = l * vy
    c0 = l * vz + R * np.cos(theta)
    rho = np.hypot(a, b)
    m = (a * vx + b * vy) / rho
    amp = np.hypot(m, vz)
    w0 = np.arctan2(vz, m)
    wlo = np.arctan2(c0 - 0.5 * Ls, rho)
    whi = np.arctan2(c0 + 0.5 * Ls, rho)
    klo = amp * np.cos(wlo - w0)
    khi = amp * np.cos(whi - w0)
    kmax = np.maximum(klo, khi)
    kmin = np.minimum(klo, khi)
    inside_max = (wlo < w0) & (w0 < whi)
    kmax = np.where(inside_max, amp, kmax)
    for shift in (-np.pi, np.pi):
        inside_min = (wlo < w0 + shift) & (w0 + shift < whi)
        kmin = np.where(inside_min, -amp, kmin)
    return kmax - kmin


def k_number_batch(R, theta, vx, vy, vz, Ls, Lr, rtol=1e-6, max_evals=2**20):
    """Quadrature DOF proxy for many orientations at one placement.

    Implements the same trapezoid-doubling/Simpson scheme as the scalar
    kernel with per-orientation stopping.  Returns ``(K, converged)``.
    """
    vx = np.atleast_1d(np.asarray(vx, float))
    vy = np.atleast_1d(np.asarray(vy, float))
    vz = np.atleast_1d(np.asarray(vz, float))
    nv = vx.shape[0]
    a = -0.5 * Lr
    b = 0.5 * Lr
    fa = w_arc_batch(a, R, theta, vx, vy, vz, Ls)
    fb = w_arc_batch(b, R, theta, vx, vy, vz, Ls)
    t = 0.5 * (b - a) * (fa + fb)
    s_prev = np.full(nv, np.inf)
    out = np.where(np.isfinite(s_prev), s_prev, t)
    done = np.zeros(nv, dtype=bool)
    ok = np.zeros(nv, dtype=bool)
    n = 1
    evals = 2
    while not done.all():
        if evals + n > max_evals:
            out[~done] = np.where(np.isfinite(s_prev[~done]), s_prev[~done], t[~done])
            break
        h = (b - a) / (2 * n)
        mids = a + (2 * np.arange(n) + 1) * h
        idx = np.flatnonzero(~done)
        w = w_arc_batch(mids[:, None], R, theta, vx[idx][None, :],
                        vy[idx][None, :], vz[idx][None, :], Ls)
        evals += n
        tn = 0.5 * t[idx] + h * w.sum(axis=0)
        s = (4.0 * tn - t[idx]) / 3.0
        conv = np.isfinite(s_prev[idx]) & (
            np.abs(s - s_prev[idx]) <= rtol * np.maximum(np.abs(s), _TINY)
        )
        hit = idx[conv]
        out[hit] = s[conv]
        ok[hit] = True
        done[hit] = True
        t[idx] = tn
        s_prev[idx] = s
        n *= 2
    return out, ok


# ---------------------------------------------------------------------------
# numpy-lane scalar entry points (reuse the vectorized machinery)
# ---------------------------------------------------------------------------


def _k_number_np(R, theta, vx, vy, vz, Ls, Lr, rtol, max_evals):
    k, ok = k_number_batch(R, theta, vx, vy, vz, Ls, Lr, rtol, max_evals)
    return float(k[0]), bool(ok[0])


def _grid_extrema_np(l, R, theta, vx, vy, vz, Ls, n):
    qs = np.linspace(-0.5 * Ls, 0.5 * Ls, n)
    rx = l * vx + R * math.sin(theta)
    ry = l * vy
    rz = l * vz + R * math.cos(theta) - qs
    nr = np.sqrt(rx * rx + ry * ry + rz * rz)
    ks = (rx * vx + ry * vy + rz * vz) / nr
    imax = int(np.argmax(ks))
    imin = int(np.argmin(ks))
    cand_max = [(float(ks[imax]), float(qs[imax]))]
    cand_min = [(float(ks[imin]), float(qs[imin]))]
    d = np.diff(ks)
    flip = np.flatnonzero(
        (d[:-1] * d[1:] < 0.0) | ((d[:-1] != 0.0) ^ (d[1:] != 0.0))
    )
    for i in flip:
        sign = 1.0 if d[i] > d[i + 1] else -1.0
        kr, qr = _golden_kappa_py(sign, float(qs[i]), float(qs[i + 2]),
                                  l, R, theta, vx, vy, vz)
        (cand_max if sign > 0 else cand_min).append((kr, qr))
    kmax, qmax = max(cand_max, key=lambda t: (t[0], -t[1]))
    kmin, qmin = min(cand_min, key=lambda t: (t[0], t[1]))
    return kmax, kmin, qmax, qmin


def _search_max3d_np(R, theta, Ls, Lr, rtol, max_evals, nphi, ngam):
    phi = np.linspace(0.0, math.pi, nphi)
    gam = 2.0 * math.pi * np.arange(ngam) / ngam
    pp, gg = np.meshgrid(phi, gam, indexing="ij")
    vx = (np.sin(pp) * np.cos(gg)).ravel()
    vy = (np.sin(pp) * np.sin(gg)).ravel()
    vz = np.cos(pp).ravel()
    k, _ = k_number_batch(R, theta, vx, vy, vz, Ls, Lr, rtol, max_evals)
    i = int(np.argmax(k))
    best = float(k[i])
    bphi = float(pp.ravel()[i])
    bgam = float(gg.ravel()[i])
    dphi = math.pi / (nphi - 1)
    dgam = 2.0 * math.pi / ngam

    def k_at(p, g):
        sp = math.sin(p)
        return _k_number_np(R, theta, sp * math.cos(g), sp * math.sin(g),
                            math.cos(p), Ls, Lr, rtol, max_evals)[0]

    for _ in range(2):
        kk, bphi = _golden_np(lambda p: k_at(p, bgam),
                              max(0.0, bphi - dphi), min(math.pi, bphi + dphi))
        best = max(best, kk)
        kk, bgam = _golden_np(lambda g: k_at(bphi, g), bgam - dgam, bgam + dgam)
        best = max(best, kk)
        dphi *= 0.25
        dgam *= 0.25
    sp = math.sin(bphi)
    return best, sp * math.cos(bgam), sp * math.sin(bgam), math.cos(bphi)


def _search_max2d_np(R, theta, psi, Ls, Lr, rtol, max_evals, ngam):
    gam = math.pi * np.arange(ngam) / ngam
    sg = np.sin(gam)
    vx = math.cos(psi) * sg
    vy = math.sin(psi) * sg
    vz = np.cos(gam)
    k, _ = k_number_batch(R, theta, vx, vy, vz, Ls, Lr, rtol, max_evals)
    i = int(np.argmax(k))
    best = float(k[i])
    bgam = float(gam[i])
    dgam = math.pi / ngam

    def k_at(g):
        s = math.sin(g)
        return _k_number_np(R, theta, math.cos(psi) * s, math.sin(psi) * s,
                            math.cos(g), Ls, Lr, rtol, max_evals)[0]

    for _ in range(2):
        kk, bgam = _golden_np(k_at, bgam - dgam, bgam + dgam)
        best = max(best, kk)
        dgam *= 0.25
    s = math.sin(bgam)
    return best, math.cos(psi) * s, math.sin(psi) * s, math.cos(bgam)


def _golden_np(f, a, b):
    c = a + _INVPHI2 * (b - a)
    d = a + _INVPHI * (b - a)
    fc = f(c)
    fd = f(d)
    for _ in range(40):
        if fc > fd:
            b, d, fd = d, c, fc
            c = a + _INVPHI2 * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (fc, c) if fc > fd else (fd, d)


def _mean_k_np(vs, R, theta, Ls, Lr, rtol, max_evals):
    k, _ = k_number_batch(R, theta, vs[:, 0], vs[:, 1], vs[:, 2],
                          Ls, Lr, rtol, max_evals)
    return float(np.mean(k))


def _sweep_max3d_np(Rs, thetas, Ls, Lr, rtol, max_evals, nphi, ngam):
    out = np.empty(len(Rs))
    for i in range(len(Rs)):
        out[i] = _search_max3d_np(Rs[i], thetas[i], Ls, Lr, rtol, max_evals,
                                  nphi, ngam)[0]
    return out


def _sweep_max2d_np(Rs, thetas, psis, Ls, Lr, rtol, max_evals, ngam):
    out = np.empty(len(Rs))
    for i in range(len(Rs)):
        out[i] = _search_max2d_np(Rs[i], thetas[i], psis[i], Ls, Lr, rtol,
                                  max_evals, ngam)[0]
    return out


def _sweep_mean_k_np(Rs, thetas, vs, Ls, Lr, rtol, max_evals):
    out = np.empty(len(Rs))
    for i in range(len(Rs)):
        out[i] = _mean_k_np(vs[i], Rs[i], thetas[i], Ls, Lr, rtol, max_evals)
    return out


# ---------------------------------------------------------------------------
# lane selection
# ---------------------------------------------------------------------------

if NUMBA_ENABLED:
    _jit = njit(cache=True)
    w_z = _jit(_w_z_py)
    w_x = _jit(_w_x_py)
    _kappa = _jit(_kappa_py)
    arc_extrema = _jit(_arc_extrema_py)

    @njit(cache=True)
    def w_arc(l, R, theta, vx, vy, vz, Ls):
        kmax, kmin, _, _ = arc_extrema(l, R, theta, vx, vy, vz, Ls)
        return kmax - kmin

    @njit(cache=True)
    def _golden_kappa(sign, qa, qb, l, R, theta, vx, vy, vz):
        a = qa
        b = qb
        c = a + _INVPHI2 * (b - a)
        d = a + _INVPHI * (b - a)
        fc = sign * _kappa(l, c, R, theta, vx, vy, vz)
        fd = sign * _kappa(l, d, R, theta, vx, vy, vz)
        for _ in range(_GOLDEN_ITERS):
            if fc > fd:
                b = d
                d = c
                fd = fc
                c = a + _INVPHI2 * (b - a)
                fc = sign * _kappa(l, c, R, theta, vx, vy, vz)
            else:
                a = c
                c = d
                fc = fd
                d = a + _INVPHI * (b - a)
                fd = sign * _kappa(l, d, R, theta, vx, vy, vz)
        if fc > fd:
            return sign * fc, c
        return sign * fd, d

    @njit(cache=True)
    def grid_extrema(l, R, theta, vx, vy, vz, Ls, n):
        h = Ls / (n - 1)
        kmax = -2.0
        kmin = 2.0
        qmax = 0.0
        qmin = 0.0
        kprev2 = 0.0
        kprev = 0.0
        for i in range(n):
            q = -0.5 * Ls + i * h
            k = _kappa(l, q, R, theta, vx, vy, vz)
            if k > kmax or (k == kmax and q < qmax):
                kmax = k
                qmax = q
            if k < kmin or (k == kmin and q < qmin):
                kmin = k
                qmin = q
            if i >= 2:
                d0 = kprev - kprev2
                d1 = k - kprev
                if d0 * d1 < 0.0 or (d0 != 0.0 and d1 == 0.0) or (d0 == 0.0 and d1 != 0.0):
                    qa = -0.5 * Ls + (i - 2) * h
                    sign = 1.0 if d0 > d1 else -1.0
                    kr, qr = _golden_kappa(sign, qa, q, l, R, theta, vx, vy, vz)
                    if kr > kmax or (kr == kmax and qr < qmax):
                        kmax = kr
                        qmax = qr
                    if kr < kmin or (kr == kmin and qr < qmin):
                        kmin = kr
                        qmin = qr
            kprev2 = kprev
            kprev = k
        return kmax, kmin, qmax, qmin

    @njit(cache=True)
    def k_number(R, theta, vx, vy, vz, Ls, Lr, rtol=1e-6, max_evals=2**20):
        a = -0.5 * Lr
        b = 0.5 * Lr
        fa = w_arc(a, R, theta, vx, vy, vz, Ls)
        fb = w_arc(b, R, theta, vx, vy, vz, Ls)
        t = 0.5 * (b - a) * (fa + fb)
        s_prev = math.inf
        n = 1
        evals = 2
        while True:
            if evals + n > max_evals:
                return (s_prev if math.isfinite(s_prev) else t), False
            h = (b - a) / (2 * n)
            acc = 0.0
            for i in range(n):
                acc += w_arc(a + (2 * i + 1) * h, R, theta, vx, vy, vz, Ls)
            evals += n
            tn = 0.5 * t + h * acc
            s = (4.0 * tn - t) / 3.0
            if math.isfinite(s_prev) and abs(s - s_prev) <= rtol * max(abs(s), _TINY):
                return s, True
            t = tn
            s_prev = s
            n *= 2

    @njit(cache=True)
    def _k_orient(phi, gam, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals):
        if mode2d:
            sg = math.sin(gam)
            vx = math.cos(psi) * sg
            vy = math.sin(psi) * sg
            vz = math.cos(gam)
        else:
            sp = math.sin(phi)
            vx = sp * math.cos(gam)
            vy = sp * math.sin(gam)
            vz = math.cos(phi)
        k, _ = k_number(R, theta, vx, vy, vz, Ls, Lr, rtol, max_evals)
        return k

    @njit(cache=True)
    def _golden_orient(coord, lo, hi, phi, gam, R, theta, psi, mode2d,
                       Ls, Lr, rtol, max_evals):
        a = lo
        b = hi
        c = a + _INVPHI2 * (b - a)
        d = a + _INVPHI * (b - a)
        if coord == 0:
            fc = _k_orient(c, gam, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
            fd = _k_orient(d, gam, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
        else:
            fc = _k_orient(phi, c, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
            fd = _k_orient(phi, d, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
        for _ in range(40):
            if fc > fd:
                b = d
                d = c
                fd = fc
                c = a + _INVPHI2 * (b - a)
                if coord == 0:
                    fc = _k_orient(c, gam, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
                else:
                    fc = _k_orient(phi, c, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
            else:
                a = c
                c = d
                fc = fd
                d = a + _INVPHI * (b - a)
                if coord == 0:
                    fd = _k_orient(d, gam, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
                else:
                    fd = _k_orient(phi, d, R, theta, psi, mode2d, Ls, Lr, rtol, max_evals)
        if fc > fd:
            return fc, c
        return fd, d

    @njit(cache=True)
    def search_max3d(R, theta, Ls, Lr, rtol=1e-6, max_evals=2**20,
                     nphi=64, ngam=128):
        best = -1.0
        bphi = 0.0
        bgam = 0.0
        for i in range(nphi):
            phi = math.pi * i / (nphi - 1)
            for j in range(ngam):
                gam = 2.0 * math.pi * j / ngam
                k = _k_orient(phi, gam, R, theta, 0.0, False, Ls, Lr, rtol, max_evals)
                if k > best:
                    best = k
                    bphi = phi
                    bgam = gam
        dphi = math.pi / (nphi - 1)
        dgam = 2.0 * math.pi / ngam
        for _ in range(2):
            k, bphi = _golden_orient(0, max(0.0, bphi - dphi),
                                     min(math.pi, bphi + dphi), bphi, bgam,
                                     R, theta, 0.0, False, Ls, Lr, rtol, max_evals)
            if k > best:
                best = k
            k, bgam = _golden_orient(1, bgam - dgam, bgam + dgam, bphi, bgam,
                                     R, theta, 0.0, False, Ls, Lr, rtol, max_evals)
            if k > best:
                best = k
            dphi *= 0.25
            dgam *= 0.25
        sp = math.sin(bphi)
        return best, sp * math.cos(bgam), sp * math.sin(bgam), math.cos(bphi)

    @njit(cache=True)
    def search_max2d(R, theta, psi, Ls, Lr, rtol=1e-6, max_evals=2**20, ngam=256):
        best = -1.0
        bgam = 0.0
        for j in range(ngam):
            gam = math.pi * j / ngam
            k = _k_orient(0.0, gam, R, theta, psi, True, Ls, Lr, rtol, max_evals)
            if k > best:
                best = k
                bgam = gam
        dgam = math.pi / ngam
        for _ in range(2):
            k, bgam = _golden_orient(1, bgam - dgam, bgam + dgam, 0.0, bgam,
                                     R, theta, psi, True, Ls, Lr, rtol, max_evals)
            if k > best:
                best = k
            dgam *= 0.25
        sg = math.sin(bgam)
        return best, math.cos(psi) * sg, math.sin(psi) * sg, math.cos(bgam)

    @njit(cache=True)
    def mean_k(vs, R, theta, Ls, Lr, rtol=1e-6, max_evals=2**20):
        acc = 0.0
        for i in range(vs.shape[0]):
            k, _ = k_number(R, theta, vs[i, 0], vs[i, 1], vs[i, 2],
                            Ls, Lr, rtol, max_evals)
            acc += k
        return acc / vs.shape[0]

    @njit(cache=True, parallel=True)
    def sweep_max3d(Rs, thetas, Ls, Lr, rtol=1e-6, max_evals=2**20,
                    nphi=64, ngam=128):
        out = np.empty(Rs.shape[0])
        for i in prange(Rs.shape[0]):
            k, _, _, _ = search_max3d(Rs[i], thetas[i], Ls, Lr, rtol,
                                      max_evals, nphi, ngam)
            out[i] = k
        return out

    @njit(cache=True, parallel=True)
    def sweep_max2d(Rs, thetas, psis, Ls, Lr, rtol=1e-6, max_evals=2**20,
                    ngam=256):
        out = np.empty(Rs.shape[0])
        for i in prange(Rs.shape[0]):
            k, _, _, _ = search_max2d(Rs[i], thetas[i], psis[i], Ls, Lr, rtol,
                                      max_evals, ngam)
            out[i] = k
        return out

    @njit(cache=True, parallel=True)
    def sweep_mean_k(Rs, thetas, vs, Ls, Lr, rtol=1e-6, max_evals=2**20):
        out = np.empty(Rs.shape[0])
        for i in prange(Rs.shape[0]):
            out[i] = mean_k(vs[i], Rs[i], thetas[i], Ls, Lr, rtol, max_evals)
        return out

else:
    w_z = _w_z_py
    w_x = _w_x_py
    _kappa = _kappa_py
    arc_extrema = _arc_extrema_py
    w_arc = _w_arc_py

    def grid_extrema(l, R, theta, vx, vy, vz, Ls, n):
        return _grid_extrema_np(l, R, theta, vx, vy, vz, Ls, n)

    def k_number(R, theta, vx, vy, vz, Ls, Lr, rtol=1e-6, max_evals=2**20):
        return _k_number_np(R, theta, vx, vy, vz, Ls, Lr, rtol, max_evals)

    def search_max3d(R, theta, Ls, Lr, rtol=1e-6, max_evals=2**20,
                     nphi=64, ngam=128):
        return _search_max3d_np(R, theta, Ls, Lr, rtol, max_evals, nphi, ngam)

    def search_max2d(R, theta, psi, Ls, Lr, rtol=1e-6, max_evals=2**20, ngam=256):
        return _search_max2d_np(R, theta, psi, Ls, Lr, rtol, max_evals, ngam)

    def mean_k(vs, R, theta, Ls, Lr, rtol=1e-6, max_evals=2**20):
        return _mean_k_np(vs, R, theta, Ls, Lr, rtol, max_evals)

    def sweep_max3d(Rs, thetas, Ls, Lr, rtol=1e-6, max_evals=2**20,
                    nphi=64, ngam=128):
        return _sweep_max3d_np(Rs, thetas, Ls, Lr, rtol, max_evals, nphi, ngam)

    def sweep_max2d(Rs, thetas, psis, Ls, Lr, rtol=1e-6, max_evals=2**20,
                    ngam=256):
        return _sweep_max2d_np(Rs, thetas, psis, Ls, Lr, rtol, max_evals, ngam)

    def sweep_mean_k(Rs, thetas, vs, Ls, Lr, rtol=1e-6, max_evals=2**20):
        return _sweep_mean_k_np(Rs, thetas, vs, Ls, Lr, rtol, max_evals)
