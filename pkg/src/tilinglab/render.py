"""Deterministic SVG output for patches and band-grid overlays.

Coordinates are embedded with a certified 24-bit interval, scaled, and
rounded half-to-even to three decimals, so equal inputs give equal bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exactnum import embed
from .tiling import Patch

PALETTE = ["#e6c84f", "#4f8fe6", "#e6734f", "#5fbf6a", "#a56fd6", "#4fc9c9",
           "#d64f8f", "#9c9c4f", "#6f7fd6", "#d6a36f", "#4fa37f", "#c46fc4"]


@dataclass
class RenderSpec:
    view: tuple | None = None            # (xmin, ymin, xmax, ymax); None means fit the patch
    colors: dict = field(default_factory=dict)
    overlays: list = field(default_factory=list)   # {"a", "r0_2", "anchor", "style"}
    scale: Fraction = Fraction(20)
    stroke: str = "#333333"


def _q(e) -> Fraction:
    if isinstance(e, (int, Fraction)):
        return Fraction(e)
    lo, hi = embed(e, 24)
    return (lo + hi) / 2


def _fmt(q: Fraction) -> str:
    n = round(q * 1000)          # Fraction rounding is half-to-even
    s = "-" if n < 0 else ""
    n = abs(n)
    return f"{s}{n // 1000}.{n % 1000:03d}"


def _color(spec: RenderSpec, proto: int) -> str:
    return spec.colors.get(proto, PALETTE[proto % len(PALETTE)])


def _tile_points(patch: Patch, t, cache: dict):
    poly = patch.protos.polygon(t.proto, t.shift)
    pts = []
    for v in poly.vertices:
        key = tuple(tuple(e.c) for e in v)
        if key not in cache:
            cache[key] = tuple(_q(e) for e in v)
        pts.append(cache[key])
    if len(pts[0]) == 1:
        # intervals are drawn as bars of height 1/2
        (x0,), (x1,) = pts
        h = Fraction(1, 2)
        pts = [(x0, Fraction(0)), (x1, Fraction(0)), (x1, h), (x0, h)]
    return pts


def _fit(points) -> tuple:
    if not points:
        return (Fraction(0), Fraction(0), Fraction(1), Fraction(1))
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys), max(xs), max(ys))


def _clip(poly, nx, ny, c):
    """Sutherland-Hodgman clip of poly to the half plane nx*x + ny*y >= c."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = nx * p[0] + ny * p[1] - c
        fq = nx * q[0] + ny * q[1] - c
        if fp >= 0:
            out.append(p)
        if (fp >= 0) != (fq >= 0):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def band_polygons(a, r0_2, anchor, view) -> list:
    """Stripes {v : |<a, v - anchor> - k| < R0 |a|} cut to the view rectangle (floats)."""
    ax, ay = (float(_q(e)) for e in a)
    px, py = (float(_q(e)) for e in anchor)
    na = math.hypot(ax, ay)
    half = math.sqrt(float(_q(r0_2))) * na
    xmin, ymin, xmax, ymax = (float(v) for v in view)
    rect = [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]
    vals = [ax * (x - px) + ay * (y - py) for x, y in rect]
    out = []
    for k in range(math.floor(min(vals) - half), math.ceil(max(vals) + half) + 1):
        base = ax * px + ay * py + k
        poly = _clip(rect, ax, ay, base - half)
        poly = _clip(poly, -ax, -ay, -(base + half))
        if len(poly) >= 3:
            out.append(poly)
    return out


def render_svg(patch: Patch, spec: RenderSpec | None = None) -> str:
    spec = spec or RenderSpec()
    cache: dict = {}
    tiles = patch.sorted_tiles()
    shapes = [(t, _tile_points(patch, t, cache)) for t in tiles]
    if spec.view is not None:
        view = tuple(_q(v) for v in spec.view)
    else:
        view = _fit([p for _, pts in shapes for p in pts])
    xmin, ymin, xmax, ymax = view
    s = spec.scale
    width, height = (xmax - xmin) * s, (ymax - ymin) * s

    def px(p):
        return f"{_fmt((p[0] - xmin) * s)},{_fmt((ymax - p[1]) * s)}"

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0.000 0.000 {_fmt(width)} {_fmt(height)}">',
        '<g stroke="{}" stroke-width="0.500" stroke-linejoin="round">'.format(spec.stroke),
    ]
    for t, pts in shapes:
        lines.append(f'<polygon data-proto="{t.proto}" fill="{_color(spec, t.proto)}" '
                     f'points="{" ".join(px(p) for p in pts)}"/>')
    lines.append("</g>")
    for ov in spec.overlays:
        style = ov.get("style", "#d62728")
        lines.append(f'<g fill="{style}" fill-opacity="0.300" stroke="none">')
        for poly in band_polygons(ov["a"], ov["r0_2"], ov["anchor"], view):
            pts = [(Fraction(x).limit_denominator(1 << 24), Fraction(y).limit_denominator(1 << 24)) for x, y in poly]
            lines.append(f'<polygon points="{" ".join(px(p) for p in pts)}"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
