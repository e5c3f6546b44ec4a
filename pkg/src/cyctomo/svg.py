"""Deterministic SVG figures for patches, U-polygons and ghost pairs.

Geometry stays exact until emission.  Each coordinate is evaluated with
160-bit floating point and printed with 20 significant digits, rounded half
to even.  Nothing in the output depends on time or on hash order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Context
from fractions import Fraction

import mpmath

from .cyclotomic import CycNum, parse_rational
from .errors import ViewportOverflow
from .modelset import Patch, as_cyc

DIGITS = 20
_CTX = Context(prec=DIGITS, rounding=ROUND_HALF_EVEN)
_MP = mpmath.MPContext()
_MP.prec = 160

DEFAULT_PALETTE = {
    "background": "#ffffff",
    "common": "#9a9a9a",
    "black": "#000000",
    "grey": "#b8b8b8",
    "boundary": "#1f4e9e",
    "point": "#303030",
}


@dataclass(frozen=True)
class RenderSpec:
    scale: Fraction = Fraction(20)
    palette: dict = field(default_factory=lambda: dict(DEFAULT_PALETTE))
    viewport: tuple[Fraction, Fraction, Fraction, Fraction] | None = None
    point_radius: Fraction = Fraction(1, 8)

    def __post_init__(self):
        object.__setattr__(self, "scale", parse_rational(self.scale))
        object.__setattr__(self, "point_radius", parse_rational(self.point_radius))
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.viewport is not None:
            vp = tuple(parse_rational(v) for v in self.viewport)
            if len(vp) != 4 or vp[0] >= vp[2] or vp[1] >= vp[3]:
                raise ValueError("viewport must be (xmin, ymin, xmax, ymax) with positive extent")
            object.__setattr__(self, "viewport", vp)
        merged = dict(DEFAULT_PALETTE)
        merged.update(self.palette)
        object.__setattr__(self, "palette", merged)


def _coords(x: CycNum):
    m = x.m
    re = _MP.mpf(0)
    im = _MP.mpf(0)
    for j, c in enumerate(x.num):
        if c:
            t = _MP.mpf(2 * j) / m
            re += c * _MP.cospi(t)
            im += c * _MP.sinpi(t)
    return re / x.den, im / x.den


def fmt(v) -> str:
    """Half-even rounding to 20 significant digits, without exponent."""
    # cancellation residue of exact zeros sits near 2^-160
    if abs(v) < 1e-30:
        return "0"
    d = _CTX.create_decimal(_MP.nstr(v, DIGITS + 10, strip_zeros=False))
    if d.is_zero():
        return "0"
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _auto_viewport(pts) -> tuple[Fraction, ...]:
    if not pts:
        return (Fraction(-1), Fraction(-1), Fraction(1), Fraction(1))
    xs = [float(p[0]) for p in pts]
    ys = [float(p[1]) for p in pts]
    pad = 1
    return (
        Fraction(int(min(xs)) - 1 - pad),
        Fraction(int(min(ys)) - 1 - pad),
        Fraction(int(max(xs)) + 1 + pad),
        Fraction(int(max(ys)) + 1 + pad),
    )


class _Canvas:
    def __init__(self, spec: RenderSpec, all_pts):
        self.spec = spec
        vp = spec.viewport or _auto_viewport(all_pts)
        self.vp = [_mpq(v) for v in vp]
        self.scale = _mpq(spec.scale)
        lo_x, lo_y, hi_x, hi_y = self.vp
        for x, y in all_pts:
            if x < lo_x or x > hi_x or y < lo_y or y > hi_y:
                raise ViewportOverflow(f"point ({fmt(x)}, {fmt(y)}) lies outside the viewport")
        self.width = (vp[2] - vp[0]) * spec.scale
        self.height = (vp[3] - vp[1]) * spec.scale
        self.lines: list[str] = []

    def px(self, p) -> tuple[str, str]:
        x, y = p
        s = self.scale
        return fmt((x - self.vp[0]) * s), fmt((self.vp[3] - y) * s)

    def circle(self, p, color: str, cls: str) -> None:
        cx, cy = self.px(p)
        r = fmt(_mpq(self.spec.point_radius * self.spec.scale))
        self.lines.append(f'  <circle class="{cls}" cx="{cx}" cy="{cy}" r="{r}" fill="{color}"/>')

    def path(self, pts, color: str) -> None:
        cmds = []
        for i, p in enumerate(pts):
            x, y = self.px(p)
            cmds.append(f"{'M' if i == 0 else 'L'}{x},{y}")
        cmds.append("Z")
        self.lines.append(
            f'  <path class="boundary" d="{" ".join(cmds)}" fill="none" stroke="{color}" stroke-width="1"/>'
        )

    def document(self) -> str:
        w, h = fmt(_mpq(self.width)), fmt(_mpq(self.height))
        bg = self.spec.palette["background"]
        head = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
            f'  <rect x="0" y="0" width="{w}" height="{h}" fill="{bg}"/>',
        ]
        return "\n".join(head + self.lines + ["</svg>", ""])


def _mpq(q: Fraction):
    return _MP.mpf(q.numerator) / q.denominator


def render_patch(patch: Patch, spec: RenderSpec | None = None) -> str:
    spec = spec or RenderSpec()
    pts = [_coords(as_cyc(p)) for p in patch.points]
    canvas = _Canvas(spec, pts)
    for p in pts:
        canvas.circle(p, spec.palette["point"], "point")
    return canvas.document()


def render_ghost(ghost, spec: RenderSpec | None = None) -> str:
    spec = spec or RenderSpec()
    common = [_coords(as_cyc(p)) for p in ghost.common]
    black = [_coords(as_cyc(p)) for p in ghost.black]
    grey = [_coords(as_cyc(p)) for p in ghost.grey]
    poly = [_coords(as_cyc(p)) for p in ghost.polygon]
    canvas = _Canvas(spec, common + black + grey + poly)
    if poly:
        canvas.path(poly, spec.palette["boundary"])
    for p in common:
        canvas.circle(p, spec.palette["common"], "common")
    for p in black:
        canvas.circle(p, spec.palette["black"], "black")
    for p in grey:
        canvas.circle(p, spec.palette["grey"], "grey")
    return canvas.document()


def render_polygon(P, spec: RenderSpec | None = None) -> str:
    spec = spec or RenderSpec()
    poly = [_coords(v) for v in P.vertices]
    canvas = _Canvas(spec, poly)
    canvas.path(poly, spec.palette["boundary"])
    for p in poly:
        canvas.circle(p, spec.palette["black"], "vertex")
    return canvas.document()


def render(obj, spec: RenderSpec | None = None) -> str:
    """SVG text for a Patch, GhostPair or UPolygon."""
    from .upolygon import GhostPair, UPolygon

    if isinstance(obj, Patch):
        return render_patch(obj, spec)
    if isinstance(obj, GhostPair):
        return render_ghost(obj, spec)
    if isinstance(obj, UPolygon):
        return render_polygon(obj, spec)
    raise TypeError(f"cannot render {type(obj).__name__}")
