"""Exact planar predicates on points of Q(zeta_m).

A point is a CycNum read as a complex number.  Every predicate first tries
a float evaluation with a rigorous error bound and falls back to the exact
sign routines only when the float result is inside the bound.
"""

from __future__ import annotations

from functools import cmp_to_key
from typing import Iterable, Sequence

from .cyclotomic import CycNum, im_sign, re_sign

_EPS = 4.5e-16


def _filtered(val: float, bound: float) -> int:
    if val > bound:
        return 1
    if val < -bound:
        return -1
    return 0


def cross_sign(u: CycNum, v: CycNum) -> int:
    """Sign of Im(conj(u) v), the orientation of the pair (u, v)."""
    ux, uy, eu = u.approx()
    vx, vy, ev = v.approx()
    val = ux * vy - uy * vx
    mag = (abs(ux) + abs(uy) + eu) * ev + (abs(vx) + abs(vy) + ev) * eu
    bound = 2 * mag + 8 * _EPS * (abs(ux * vy) + abs(uy * vx)) + 1e-300
    s = _filtered(val, bound)
    if s:
        return s
    return im_sign(u.conj() * v)


def dot_sign(u: CycNum, v: CycNum) -> int:
    """Sign of Re(conj(u) v)."""
    ux, uy, eu = u.approx()
    vx, vy, ev = v.approx()
    val = ux * vx + uy * vy
    mag = (abs(ux) + abs(uy) + eu) * ev + (abs(vx) + abs(vy) + ev) * eu
    bound = 2 * mag + 8 * _EPS * (abs(ux * vx) + abs(uy * vy)) + 1e-300
    s = _filtered(val, bound)
    if s:
        return s
    return re_sign(u.conj() * v)


def orient(a: CycNum, b: CycNum, c: CycNum) -> int:
    """+1 for a left turn a -> b -> c, -1 for a right turn, 0 if collinear."""
    return cross_sign(b - a, c - a)


def is_parallel(u: CycNum, v: CycNum) -> bool:
    x = u.conj() * v
    return x == x.conj()


def between(a: CycNum, b: CycNum, c: CycNum) -> bool:
    """b lies on the closed segment [a, c]; assumes collinearity."""
    return dot_sign(b - a, c - b) >= 0


def lex_cmp(a: CycNum, b: CycNum) -> int:
    d = a - b
    if d.is_zero():
        return 0
    s = re_sign(d)
    return s if s else im_sign(d)


def sort_lex(points: Iterable[CycNum]) -> list[CycNum]:
    return sorted(points, key=cmp_to_key(lex_cmp))


def convex_hull(points: Iterable[CycNum]) -> list[CycNum]:
    """Strict hull vertices in counterclockwise order (monotone chain)."""
    pts = []
    for p in sort_lex(points):
        if not pts or pts[-1] != p:
            pts.append(p)
    if len(pts) <= 2:
        return pts
    lower: list[CycNum] = []
    for p in pts:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[CycNum] = []
    for p in reversed(pts):
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull


def in_hull(p: CycNum, hull: Sequence[CycNum], strict: bool = False) -> bool:
    """Point in the closed (or open) convex polygon given by ``hull``."""
    k = len(hull)
    if k == 0:
        return False
    if k == 1:
        return not strict and p == hull[0]
    if k == 2:
        if strict:
            return False
        return orient(hull[0], hull[1], p) == 0 and between(hull[0], p, hull[1])
    for i in range(k):
        s = orient(hull[i], hull[(i + 1) % k], p)
        if s < 0 or (strict and s == 0):
            return False
    return True


def is_convex_polygon(vertices: Sequence[CycNum]) -> bool:
    """Strictly convex, counterclockwise, nondegenerate, winding once."""
    k = len(vertices)
    if k < 3:
        return False
    for i in range(k):
        if orient(vertices[i], vertices[(i + 1) % k], vertices[(i + 2) % k]) <= 0:
            return False
    for i in range(k):
        a, b = vertices[i], vertices[(i + 1) % k]
        for j in range(k):
            if j != i and j != (i + 1) % k and orient(a, b, vertices[j]) <= 0:
                return False
    return True


def im_part(x: CycNum) -> CycNum:
    """Im(x) as a real CycNum: (x - conj x) / (2i)."""
    return (x - x.conj()) * CycNum.zeta(4, 3) / 2


def re_part(x: CycNum) -> CycNum:
    return (x + x.conj()) / 2


def area2(vertices: Sequence[CycNum]) -> CycNum:
    """Twice the signed area, as an exact real CycNum."""
    acc = CycNum.rational(0)
    k = len(vertices)
    for i in range(k):
        acc = acc + vertices[i].conj() * vertices[(i + 1) % k]
    return im_part(acc)
