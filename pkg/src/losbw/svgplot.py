"""Small self-contained SVG 1.1 line-plot writer (no external renderer).

Supports linear or log10 axes, multiple polyline series with a legend,
and diamond point markers.  Only what the CLI figures need.
"""

from __future__ import annotations

import math

_W, _H = 720, 520
_ML, _MR, _MT, _MB = 70, 20, 30, 55
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x: float) -> str:
    return "%.2f" % x


def _ticks_linear(lo: float, hi: float, n: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)], lo, hi


def _ticks_log(lo: float, hi: float):
    a = int(math.floor(math.log10(lo)))
    b = int(math.ceil(math.log10(hi)))
    if b == a:
        b = a + 1
    return [10.0 ** k for k in range(a, b + 1)], 10.0 ** a, 10.0 ** b


def render_line_plot(
    path: str,
    series,
    x_label: str,
    y_label: str,
    log_x: bool = False,
    log_y: bool = False,
    markers=(),
    title: str = "",
) -> None:
    """Write a line plot to ``path``.

    ``series`` is an iterable of ``(xs, ys, label, dashed)`` tuples;
    ``markers`` is an iterable of ``(x, y)`` points drawn as diamonds.
    Non-positive values are dropped on log axes.
    """
    pts_all = []
    for xs, ys, _, _ in series:
        for x, y in zip(xs, ys):
            if (not log_x or x > 0) and (not log_y or y > 0):
                pts_all.append((float(x), float(y)))
    if not pts_all:
        raise ValueError("nothing to plot")
    xv = [p[0] for p in pts_all]
    yv = [p[1] for p in pts_all]
    if log_x:
        xticks, xlo, xhi = _ticks_log(min(xv), max(xv))
    else:
        xticks, xlo, xhi = _ticks_linear(min(xv), max(xv))
    if log_y:
        yticks, ylo, yhi = _ticks_log(min(yv), max(yv))
    else:
        yticks, ylo, yhi = _ticks_linear(min(yv), max(yv))

    def sx(x):
        t = (math.log10(x / xlo) / math.log10(xhi / xlo)) if log_x else (x - xlo) / (xhi - xlo)
        return _ML + t * (_W - _ML - _MR)

    def sy(y):
        t = (math.log10(y / ylo) / math.log10(yhi / ylo)) if log_y else (y - ylo) / (yhi - ylo)
        return _H - _MB - t * (_H - _MT - _MB)

    out = []
    out.append(
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'width="%d" height="%d" viewBox="0 0 %d %d">' % (_W, _H, _W, _H)
    )
    out.append('<rect width="%d" height="%d" fill="white"/>' % (_W, _H))
    if title:
        out.append(
            '<text x="%d" y="20" font-family="sans-serif" font-size="14" '
            'text-anchor="middle">%s</text>' % (_W // 2, title)
        )
    # grid and tick labels
    for xt in xticks:
        px = sx(xt)
        out.append(
            '<line x1="%.1f" y1="%d" x2="%.1f" y2="%d" stroke="#dddddd"/>'
            % (px, _MT, px, _H - _MB)
        )
        lab = ("1e%d" % round(math.log10(xt))) if log_x else _fmt(xt)
        out.append(
            '<text x="%.1f" y="%d" font-family="sans-serif" font-size="11" '
            'text-anchor="middle">%s</text>' % (px, _H - _MB + 18, lab)
        )
    for yt in yticks:
        py = sy(yt)
        out.append(
            '<line x1="%d" y1="%.1f" x2="%d" y2="%.1f" stroke="#dddddd"/>'
            % (_ML, py, _W - _MR, py)
        )
        lab = ("1e%d" % round(math.log10(yt))) if log_y else _fmt(yt)
        out.append(
            '<text x="%d" y="%.1f" font-family="sans-serif" font-size="11" '
            'text-anchor="end">%s</text>' % (_ML - 6, py + 4, lab)
        )
    out.append(
        '<rect x="%d" y="%d" width="%d" height="%d" fill="none" stroke="black"/>'
        % (_ML, _MT, _W - _ML - _MR, _H - _MT - _MB)
    )
    # series
    for i, (xs, ys, label, dashed) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = [
            "%.2f,%.2f" % (sx(x), sy(y))
            for x, y in zip(xs, ys)
            if (not log_x or x > 0) and (not log_y or y > 0)
        ]
        dash = ' stroke-dasharray="6 4"' if dashed else ""
        out.append(
            '<polyline fill="none" stroke="%s" stroke-width="1.5"%s points="%s"/>'
            % (color, dash, " ".join(pts))
        )
        ly = _MT + 16 + 16 * i
        out.append(
            '<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="%s" stroke-width="1.5"%s/>'
            % (_ML + 10, ly, _ML + 40, ly, color, dash)
        )
        out.append(
            '<text x="%d" y="%d" font-family="sans-serif" font-size="12">%s</text>'
            % (_ML + 46, ly + 4, label)
        )
    for mx, my in markers:
        if (log_x and mx <= 0) or (log_y and my <= 0):
            continue
        px, py = sx(mx), sy(my)
        out.append(
            '<path d="M %.1f %.1f l 5 5 l -5 5 l -5 -5 z" fill="none" stroke="black"/>'
            % (px, py - 5)
        )
    out.append(
        '<text x="%d" y="%d" font-family="sans-serif" font-size="13" '
        'text-anchor="middle">%s</text>' % ((_ML + _W - _MR) // 2, _H - 12, x_label)
    )
    out.append(
        '<text x="16" y="%d" font-family="sans-serif" font-size="13" '
        'text-anchor="middle" transform="rotate(-90 16 %d)">%s</text>'
        % ((_MT + _H - _MB) // 2, (_MT + _H - _MB) // 2, y_label)
    )
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
