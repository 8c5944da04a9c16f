"""Command-line front end: sweeps and simulations to CSV (and SVG).

Subcommands
-----------
critical   critical angles and per-angle segment-crossing distances
bandwidth  exact vs model bandwidth over a distance range (optional SVG)
errormap   relative model error over a distance/angle grid
region     coverage-region boundary traces on the ground plane
cdf        grid CDFs of approximate vs exact K numbers

All angles are given in units of pi (``--theta 0.25`` means pi/4);
distances are in source lengths for sweeps and in wavelengths for
ground coordinates.  Every command is deterministic given its flags
(including ``--seed``); reruns produce byte-identical files.

Exit codes: 0 success, 2 usage/config error, 3 computational error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import asymptotics, kernels, multiplexing, svgplot
from .bandwidth import (
    QuadratureError,
    local_bandwidth_exact,
    local_bandwidth_x,
    local_bandwidth_z,
)
from .geometry import ArrayConfig, Orientation, Placement

_CURVES = ("max3D", "max2D", "exp-uni3D", "exp-uni2D")


class UsageError(ValueError):
    pass


def _fnum(v: float) -> str:
    return format(float(v), ".12g")


def _parse_pi_list(text: str) -> list:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError("empty angle list")
    try:
        vals = [float(t) * math.pi for t in items]
    except ValueError as exc:
        raise UsageError("bad angle list %r" % text) from exc
    for v in vals:
        if not 0.0 < v < math.pi:
            raise UsageError("angles must lie strictly inside (0, 1) in units of pi")
    return vals


def _parse_orientation(text: str) -> tuple:
    """Returns ('z'|'x'|'general', Orientation|None)."""
    if text in ("z", "x"):
        return text, None
    try:
        parts = [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError("bad orientation %r" % text) from exc
    if len(parts) != 3:
        raise UsageError("orientation needs 'z', 'x' or three components")
    v = np.asarray(parts)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise UsageError("orientation vector must be nonzero")
    return "general", Orientation.from_vector(v / n)


def _r_grid(args) -> np.ndarray:
    if args.r_points < 2 or args.r_min <= 0 or args.r_max <= args.r_min:
        raise UsageError("need r_min > 0, r_max > r_min and r_points >= 2")
    if args.spacing == "log":
        return np.geomspace(args.r_min, args.r_max, args.r_points)
    return np.linspace(args.r_min, args.r_max, args.r_points)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _model_for(kind: str, orientation, theta: float, cfg: ArrayConfig, dual: bool):
    if kind == "z":
        return asymptotics.build_model_z(theta, cfg, dual_slope=dual)
    if kind == "x":
        return asymptotics.build_model_x(theta, cfg, dual_slope=dual)
    return asymptotics.build_model_general(theta, orientation, cfg)


def _exact_center_w(kind: str, orientation, placement: Placement, cfg: ArrayConfig) -> float:
    if kind == "z":
        return local_bandwidth_z(0.0, placement, cfg).width
    if kind == "x":
        return local_bandwidth_x(0.0, placement, cfg).width
    return local_bandwidth_exact(0.0, placement, orientation, cfg).width


# --- subcommands ------------------------------------------------------------


def cmd_critical(args) -> int:
    cfg = ArrayConfig(args.Ls, min(args.Ls, 20.0))
    rows = [
        ["theta_z1", "", _fnum(asymptotics.critical_angle_z1() / math.pi)],
        ["theta_z2", "", _fnum(asymptotics.critical_angle_z2() / math.pi)],
        ["theta_x", "", _fnum(asymptotics.critical_angle_x() / math.pi)],
    ]
    for theta in _parse_pi_list(args.theta) if args.theta else []:
        dists = asymptotics.critical_distances(theta, cfg)
        for name, value in dists.items():
            rows.append(
                [name + "_over_Ls", _fnum(theta / math.pi), _fnum(value / args.Ls)]
            )
    _write_csv(args.output, ["quantity", "theta_over_pi", "value"], rows)
    return 0


def cmd_bandwidth(args) -> int:
    cfg = ArrayConfig(args.Ls, args.Lr)
    thetas = _parse_pi_list(args.theta)
    kind, orientation = _parse_orientation(args.orientation)
    rs = _r_grid(args)
    if rs[0] * args.Ls < 10.0:
        raise UsageError("r_min is inside the reactive zone (R < 10 wavelengths)")
    rows = []
    series = []
    markers = []
    for theta in thetas:
        model = _model_for(kind, orientation, theta, cfg, dual=False)
        exact = np.empty_like(rs)
        asym = np.empty_like(rs)
        for i, r in enumerate(rs):
            placement = Placement(r * args.Ls, theta)
            exact[i] = _exact_center_w(kind, orientation, placement, cfg)
            asym[i] = model.value(r * args.Ls)
            rows.append(
                [
                    _fnum(r),
                    _fnum(theta / math.pi),
                    _fnum(exact[i]),
                    _fnum(asym[i]),
                    str(model.segment_index(r * args.Ls)),
                ]
            )
        label = "t=%spi" % _fnum(theta / math.pi)
        series.append((rs, exact, "exact " + label, False))
        series.append((rs, asym, "model " + label, True))
        markers.extend(
            (bp / args.Ls, model.value(bp)) for bp in model.breakpoints
        )
    _write_csv(
        args.output,
        ["R_over_Ls", "theta", "W_exact_lambda", "W_asym_lambda", "segment_index"],
        rows,
    )
    if args.svg:
        svgplot.render_line_plot(
            args.svg, series, "R / Ls", "bandwidth (cycles per wavelength)",
            log_x=True, log_y=True, markers=markers,
            title="orientation %s" % args.orientation,
        )
    return 0


def cmd_errormap(args) -> int:
    cfg = ArrayConfig(args.Ls, min(args.Ls, 20.0))
    if args.family not in ("z", "x"):
        raise UsageError("family must be z or x")
    rs = _r_grid(args)
    if rs[0] * args.Ls < 10.0:
        raise UsageError("r_min is inside the reactive zone (R < 10 wavelengths)")
    if args.theta_points < 1:
        raise UsageError("need at least one angle")
    thetas = (np.arange(args.theta_points) + 1) / args.theta_points * (math.pi / 2)
    dual = args.variant == "dual"
    rows = []
    for theta in thetas:
        model = _model_for(args.family, None, float(theta), cfg, dual)
        for r in rs:
            placement = Placement(r * args.Ls, float(theta))
            w = _exact_center_w(args.family, None, placement, cfg)
            rel = (model.value(r * args.Ls) - w) / w
            rows.append([_fnum(r), _fnum(theta / math.pi), _fnum(rel)])
    _write_csv(args.output, ["R_over_Ls", "theta_over_pi", "rel_error"], rows)
    return 0


def _closed_trace(points: np.ndarray):
    # quadrant trace (y ascending) -> mirrored closed loop for plotting
    n = points.shape[0]
    out = []
    for i in range(n - 1, -1, -1):
        out.append((points[i, 0], points[i, 1]))
    for i in range(1, n):
        out.append((points[i, 0], -points[i, 1]))
    for i in range(n - 2, -1, -1):
        out.append((-points[i, 0], -points[i, 1]))
    for i in range(1, n):
        out.append((-points[i, 0], points[i, 1]))
    return out


def cmd_region(args) -> int:
    cfg = ArrayConfig(args.Ls, args.Lr)
    if args.points < 2:
        raise UsageError("need at least two boundary points")
    try:
        zs_list = [float(t) for t in args.Zs.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError("bad source-height list %r" % args.Zs) from exc
    if not zs_list:
        raise UsageError("empty source-height list")
    rows = []
    for zs in zs_list:
        spec = multiplexing.RegionSpec(cfg, zs, args.K0, args.constraint, args.mode)
        boundary = multiplexing.region_boundary(spec, args.points)
        if not boundary.nonempty:
            rows.append([_fnum(zs), args.mode, args.constraint, "empty", "empty"])
            continue
        for x, y in _closed_trace(boundary.points):
            rows.append(
                [_fnum(zs), args.mode, args.constraint, _fnum(x), _fnum(y)]
            )
    _write_csv(args.output, ["Zs", "mode", "constraint", "Xr", "Yr"], rows)
    return 0


_CURVE_SPECS = {
    "max3D": ("max", "3d", None),
    "max2D": ("max", "2d", None),
    "exp-uni3D": ("expected", "3d", "uni3d"),
    "exp-uni2D": ("expected", "2d", "uni2d"),
}


def cmd_cdf(args) -> int:
    cfg = ArrayConfig(args.Ls, args.Lr)
    if args.curves == "all":
        curves = list(_CURVES)
    else:
        curves = [c for c in args.curves.split(",") if c.strip()]
        for c in curves:
            if c not in _CURVE_SPECS:
                raise UsageError("unknown curve %r (choose from %s)" % (c, _CURVES,))
    methods = ("asymptotic", "exact") if args.methods == "both" else (args.methods,)
    rows = []
    for curve in curves:
        mode, constraint, kind = _CURVE_SPECS[curve]
        spec = multiplexing.RegionSpec(cfg, args.Zs, args.K0, constraint, mode)
        dist = (
            multiplexing.OrientationDistribution(kind, args.seed)
            if kind is not None
            else None
        )
        cdfs = {}
        for method in methods:
            cdfs[method] = multiplexing.cdf_simulation(
                spec, args.grid_step, dist, method,
                n_mc=args.mc, search_grid=args.search_grid,
            )
            emp = cdfs[method]
            for v, f in zip(emp.values, emp.fractions):
                rows.append([curve, method, _fnum(v), _fnum(f)])
        if len(methods) == 2 and not cdfs["asymptotic"].empty:
            ks = multiplexing.ks_distance(cdfs["asymptotic"], cdfs["exact"])
            rows.append([curve, "ks", _fnum(ks), ""])
    _write_csv(args.output, ["curve", "method", "K_value", "cdf"], rows)
    return 0


# --- parser / config plumbing -----------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="losbw",
        description="Spatial bandwidth, DOF proxies and coverage regions "
        "for line-of-sight links with a large linear source array.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-o", "--output", required=True, help="output CSV path")
        p.add_argument("--config", help="key=value defaults file (flags win)")
        p.add_argument("--threads", type=int, default=0,
                       help="worker threads (default: LOSBW_THREADS or all)")

    p = sub.add_parser("critical", help="critical angles and distances")
    p.add_argument("--Ls", type=float, default=1000.0)
    p.add_argument("--theta", default="",
                   help="comma list of angles (units of pi) for distance rows")
    common(p)
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("bandwidth", help="exact vs model bandwidth sweep")
    p.add_argument("--Ls", type=float, default=1000.0)
    p.add_argument("--Lr", type=float, default=20.0)
    p.add_argument("--theta", default="", help="comma list, units of pi")
    p.add_argument("--orientation", default="z", help="z, x, or vx,vy,vz")
    p.add_argument("--r-min", type=float, default=0.01, help="in source lengths")
    p.add_argument("--r-max", type=float, default=100.0)
    p.add_argument("--r-points", type=int, default=200)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.add_argument("--svg", default="", help="also write a log-log SVG overlay")
    common(p)
    p.set_defaults(func=cmd_bandwidth)

    p = sub.add_parser("errormap", help="relative model error over (R, theta)")
    p.add_argument("--family", default="", choices=("z", "x", ""))
    p.add_argument("--variant", choices=("multi", "dual"), default="multi")
    p.add_argument("--Ls", type=float, default=1000.0)
    p.add_argument("--r-min", type=float, default=0.01)
    p.add_argument("--r-max", type=float, default=5.0)
    p.add_argument("--r-points", type=int, default=60)
    p.add_argument("--theta-points", type=int, default=45)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    common(p)
    p.set_defaults(func=cmd_errormap)

    p = sub.add_parser("region", help="coverage-region boundary traces")
    p.add_argument("--Ls", type=float, default=1000.0)
    p.add_argument("--Lr", type=float, default=20.0)
    p.add_argument("--K0", type=float, default=1.0)
    p.add_argument("--Zs", default="", help="comma list of source heights")
    p.add_argument("--mode", choices=("max", "expected"), default="expected")
    p.add_argument("--constraint", choices=("3d", "2d"), default="3d")
    p.add_argument("--points", type=int, default=200)
    common(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("cdf", help="grid CDFs of approximate vs exact K")
    p.add_argument("--Ls", type=float, default=1000.0)
    p.add_argument("--Lr", type=float, default=20.0)
    p.add_argument("--Zs", type=float, default=4500.0)
    p.add_argument("--K0", type=float, default=1.0)
    p.add_argument("--grid-step", type=float, default=50.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mc", type=int, default=4096,
                   help="orientation draws per point (expected-mode exact)")
    p.add_argument("--search-grid", type=int, default=64,
                   help="zenith grid size of the exhaustive search")
    p.add_argument("--curves", default="all",
                   help="all or comma list of %s" % (_CURVES,))
    p.add_argument("--methods", choices=("both", "asymptotic", "exact"),
                   default="both")
    common(p)
    p.set_defaults(func=cmd_cdf)
    return parser


def _load_config(path: str) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError("%s:%d: expected key=value" % (path, lineno))
                key, _, value = line.partition("=")
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise UsageError("cannot read config file: %s" % exc) from exc
    return values


def _apply_config(parser, argv) -> None:
    # flags always win: config only replaces parser defaults
    cfg_path = ""
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            cfg_path = argv[i + 1]
        elif arg.startswith("--config="):
            cfg_path = arg.partition("=")[2]
    if not cfg_path:
        return
    cmd = next((a for a in argv if not a.startswith("-")), None)
    sub_actions = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    )
    if cmd not in sub_actions.choices:
        return
    sub = sub_actions.choices[cmd]
    values = _load_config(cfg_path)
    by_dest = {a.dest: a for a in sub._actions}
    coerced = {}
    for key, text in values.items():
        if key not in by_dest:
            raise UsageError("unknown config key %r for command %r" % (key, cmd))
        action = by_dest[key]
        coerced[key] = action.type(text) if action.type else text
    sub.set_defaults(**coerced)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        threads = args.threads or int(os.environ.get("LOSBW_THREADS", "0") or 0)
        if threads:
            kernels.set_threads(threads)
        return args.func(args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (QuadratureError, RuntimeError) as exc:
        print("computational error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
