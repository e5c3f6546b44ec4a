"""Discrete parallel X-rays, slopes, cross ratios and determination checks.

Directions are nonzero elements of Z[zeta_n] up to positive real scaling.
An X-ray in direction u counts points on each line p + R*u; the line of p
is keyed by the exact real number Im(p * conj(u)).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cmp_to_key, lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .cyclotomic import CycNum, im_sign, parse_rational, re_sign, real_sign
from .errors import (
    DegenerateTuple,
    OrderMismatch,
    ParallelPair,
    RegionTooLarge,
    RegionTooSmall,
    TooFewDirections,
)
from .geometry import between, convex_hull, cross_sign, in_hull, im_part, is_parallel, lex_cmp, orient
from .modelset import LatticePoint, ModelSetSpec, Patch, as_cyc, generate_patch, to_order
from .solutions import ObstructionSet, obstruction_set

# -- directions and slopes -----------------------------------------------------


class Direction:
    """Lambda-direction: a primitive element of Z[zeta_n] with Re > 0, or Re = 0 and Im > 0."""

    __slots__ = ("n", "coeffs", "_cyc")

    def __init__(self, n: int, coeffs: Sequence[int]):
        coeffs = [int(c) for c in coeffs]
        g = 0
        for c in coeffs:
            g = math.gcd(g, c)
        if g == 0:
            raise ValueError("a direction must be nonzero")
        coeffs = [c // g for c in coeffs]
        z = CycNum(n, coeffs)
        s = re_sign(z) or im_sign(z)
        if s < 0:
            coeffs = [-c for c in coeffs]
            z = -z
        self.n = n
        self.coeffs = tuple(coeffs)
        self._cyc = z

    @classmethod
    def from_cyc(cls, x: CycNum, n: int) -> Direction:
        y = to_order(x, n)
        return cls(n, [c for c in y.num])

    @classmethod
    def parse(cls, text: str, n: int) -> Direction:
        """Comma-separated integer coefficients over the zeta_n power basis."""
        return cls(n, [int(t) for t in text.split(",")])

    @property
    def rep(self) -> LatticePoint:
        return LatticePoint(self.n, self.coeffs)

    def cyc(self) -> CycNum:
        return self._cyc

    def __eq__(self, other) -> bool:
        if not isinstance(other, Direction):
            return NotImplemented
        return self.n == other.n and (self.coeffs == other.coeffs or is_parallel(self._cyc, other._cyc))

    def __hash__(self) -> int:
        return hash((self.n, slope(self)))

    def __repr__(self) -> str:
        return f"Direction({self.n}, {list(self.coeffs)})"

    def to_json(self) -> list[int]:
        return list(self.coeffs)


@dataclass(frozen=True)
class Slope:
    """A real slope, or infinity when ``value`` is None."""

    value: CycNum | None

    @property
    def is_inf(self) -> bool:
        return self.value is None

    @classmethod
    def parse(cls, text: str) -> Slope:
        t = text.strip().lower()
        if t in ("inf", "infinity", "oo"):
            return cls(None)
        return cls(CycNum.rational(parse_rational(t)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Slope):
            return NotImplemented
        if self.value is None or other.value is None:
            return self.value is None and other.value is None
        return self.value == other.value

    def __hash__(self) -> int:
        return hash(None) if self.value is None else hash(self.value)

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)

    def to_json(self):
        return "inf" if self.value is None else self.value.to_json()


def slope_of(z: CycNum) -> Slope:
    s = z + z.conj()
    if s.is_zero():
        return Slope(None)
    # -i (z - conj z) / (z + conj z)
    return Slope((z - z.conj()) * CycNum.zeta(4, 3) / s)


def slope(d: Direction) -> Slope:
    return slope_of(d.cyc())


def cross_ratio(t1: Slope, t2: Slope, t3: Slope, t4: Slope) -> CycNum:
    """<t1,t2,t3,t4> = (t3-t1)(t4-t2) / ((t3-t2)(t4-t1)); factors holding infinity cancel."""
    ts = (t1, t2, t3, t4)
    for a, b in itertools.combinations(ts, 2):
        if a == b:
            raise DegenerateTuple("slopes must be pairwise distinct")

    def diff(i: int, j: int):
        if ts[i].is_inf or ts[j].is_inf:
            return None
        return ts[i].value - ts[j].value

    num = [diff(2, 0), diff(3, 1)]
    den = [diff(2, 1), diff(3, 0)]
    acc = CycNum.rational(1)
    for f in num:
        if f is not None:
            acc = acc * f
    for f in den:
        if f is not None:
            acc = acc / f
    return acc


def _upper(z: CycNum) -> CycNum:
    # representative with angle in [0, pi)
    s = im_sign(z)
    if s < 0 or (s == 0 and re_sign(z) < 0):
        return -z
    return z


def order_by_angle(U: Iterable[Direction]) -> list[Direction]:
    """Sort by the angle of the line with the positive real axis, in [0, pi)."""
    dirs = list(U)
    ups = {id(d): _upper(d.cyc()) for d in dirs}
    for a, b in itertools.combinations(dirs, 2):
        if is_parallel(a.cyc(), b.cyc()):
            raise ParallelPair(f"{a} and {b} are parallel")

    def cmp(a: Direction, b: Direction) -> int:
        ua, ub = ups[id(a)], ups[id(b)]
        if im_sign(ua) == 0:
            return -1
        if im_sign(ub) == 0:
            return 1
        return -cross_sign(ua, ub)

    return sorted(dirs, key=cmp_to_key(cmp))


# -- X-rays --------------------------------------------------------------------


def line_key(p: CycNum, u: Direction) -> CycNum:
    return im_part(p * u.cyc().conj())


def _point_cyc(p, n: int) -> CycNum:
    if isinstance(p, LatticePoint):
        if p.n != n:
            raise OrderMismatch(f"point has n = {p.n}, direction has n = {n}")
        return p.embed()
    return CycNum.coerce(p)


@dataclass
class XRayRow:
    direction: Direction
    buckets: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.buckets.values())

    def counts(self) -> list[int]:
        return sorted(self.buckets.values())

    def sorted_items(self) -> list[tuple[CycNum, int]]:
        return sorted(self.buckets.items(), key=cmp_to_key(lambda a, b: real_sign(a[0] - b[0])))

    def __eq__(self, other) -> bool:
        if not isinstance(other, XRayRow):
            return NotImplemented
        return self.direction == other.direction and self.buckets == other.buckets

    def to_json(self) -> dict:
        return {
            "dir": self.direction.to_json(),
            "buckets": [{"key": k.to_json(), "count": c} for k, c in self.sorted_items()],
        }

    @classmethod
    def from_json(cls, obj: dict, n: int) -> XRayRow:
        d = Direction(n, obj["dir"])
        return cls(d, {CycNum.from_json(b["key"]): int(b["count"]) for b in obj["buckets"]})


def xray(F: Iterable, u: Direction) -> XRayRow:
    row: dict = {}
    for p in F:
        k = line_key(_point_cyc(p, u.n), u)
        row[k] = row.get(k, 0) + 1
    return XRayRow(u, row)


def xrays_equal(F: Iterable, G: Iterable, U: Iterable[Direction]) -> bool:
    F, G = list(F), list(G)
    return all(xray(F, u).buckets == xray(G, u).buckets for u in U)


# -- convex subsets ------------------------------------------------------------


def _region_points(C: list, spec: ModelSetSpec | None, region) -> list[CycNum]:
    if isinstance(region, Patch):
        R = region.radius
        for c in C:
            if real_sign(CycNum.rational(R * R) - c.abs2()) < 0:
                raise RegionTooSmall("a point of C lies outside the patch radius")
        return region.cycs()
    if region is not None:
        pts = [as_cyc(p) for p in region]
        have = set(pts)
        if any(c not in have for c in C):
            raise RegionTooSmall("C is not contained in the region")
        return pts
    if spec is None:
        raise ValueError("either a spec or a region is required")
    R = 0
    for c in C:
        x, y, e = c.approx()
        R = max(R, math.ceil(math.hypot(x, y) + e) + 1)
    return generate_patch(spec, R).cycs()


def is_convex_subset(C: Iterable, spec: ModelSetSpec | None = None, region=None) -> bool:
    """C = conv(C) intersected with the model set.

    ``region`` is a Patch (whose radius must cover C), or an explicit list of
    model-set points assumed to contain every model-set point of conv(C).
    Without a region the covering patch is generated from ``spec``.
    """
    pts = [as_cyc(p) for p in C]
    if not pts:
        return True
    if spec is None:
        lp = next((p for p in C if isinstance(p, LatticePoint)), None)
        if lp is not None and lp.n in (3, 4):
            spec = ModelSetSpec(lp.n)
    universe = _region_points(pts, spec, region)
    hull = convex_hull(pts)
    have = set(pts)
    for q in universe:
        if q not in have and in_hull(q, hull):
            return False
    return True


@dataclass
class ConvexSubset:
    points: list
    spec: ModelSetSpec | None = None
    region: object = None

    def verify(self) -> bool:
        return is_convex_subset(self.points, self.spec, self.region)


# -- determination certificate -------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    determined: bool
    order: tuple[Direction, ...]
    witness: tuple[Direction, ...] | None = None
    value: CycNum | None = None
    note: str = ""

    @property
    def status(self) -> str:
        return "determined" if self.determined else "inconclusive"

    def to_json(self) -> dict:
        out = {"status": self.status, "directions": [d.to_json() for d in self.order]}
        if self.witness is not None:
            out["witness"] = [d.to_json() for d in self.witness]
            out["cross_ratio"] = self.value.to_json()
        out["note"] = self.note
        return out


@lru_cache(maxsize=None)
def _obstructions(n: int) -> ObstructionSet:
    from .solutions import REAL_SUBFIELD_D

    return obstruction_set(n, general=n not in REAL_SUBFIELD_D)


NOTE = "obstruction set taken over Q(zeta_n)^+, which equals K^+ for cyclotomic model sets"


def _certify(order: list, slopes: list[Slope], n: int) -> Certificate:
    obs = _obstructions(n)
    for idx in itertools.combinations(range(len(order)), 4):
        cr = cross_ratio(*(slopes[i] for i in idx))
        if cr in obs:
            return Certificate(False, tuple(order), tuple(order[i] for i in idx), cr, NOTE)
    return Certificate(True, tuple(order), note=NOTE)


def determination_certificate(U: Iterable[Direction], n: int) -> Certificate:
    dirs = list(U)
    if len(dirs) < 4:
        raise TooFewDirections("fewer than four directions always admit a U-polygon")
    order = order_by_angle(dirs)
    return _certify(order, [slope(d) for d in order], n)


def certify_slopes(slopes: Sequence[Slope], n: int) -> Certificate:
    """Certificate from slopes given directly, ordered by angle of the line."""
    if len(slopes) < 4:
        raise TooFewDirections("fewer than four directions always admit a U-polygon")
    for a, b in itertools.combinations(slopes, 2):
        if a == b:
            raise ParallelPair(f"slope {a} repeated")

    def cmp(a: Slope, b: Slope) -> int:
        # angle in [0, pi): nonnegative slopes first, then negative ones, infinity between
        def rank(s: Slope):
            if s.is_inf:
                return 1
            return 0 if real_sign(s.value) >= 0 else 2

        ra, rb = rank(a), rank(b)
        if ra != rb:
            return -1 if ra < rb else 1
        if ra == 1:
            return 0
        return real_sign(a.value - b.value)

    order = sorted(slopes, key=cmp_to_key(cmp))
    return _certify(order, order, n)


# -- brute-force oracle --------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    unique: bool
    pair: tuple[tuple[CycNum, ...], tuple[CycNum, ...]] | None
    subsets: int

    @property
    def status(self) -> str:
        return "unique" if self.unique else "collision"


def point_tables(pts: Sequence[CycNum]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orientation and betweenness tables plus the lexicographic order."""
    N = len(pts)
    o = np.zeros((N, N, N), dtype=np.int8)
    bt = np.zeros((N, N, N), dtype=np.bool_)
    for i, j, k in itertools.combinations(range(N), 3):
        s = orient(pts[i], pts[j], pts[k])
        for (a, b, c), sg in (
            ((i, j, k), s), ((j, k, i), s), ((k, i, j), s),
            ((j, i, k), -s), ((i, k, j), -s), ((k, j, i), -s),
        ):
            o[a, b, c] = sg
        if s == 0:
            for a, b, c in itertools.permutations((i, j, k)):
                bt[a, b, c] = between(pts[a], pts[b], pts[c])
    lex = sorted(range(N), key=cmp_to_key(lambda a, b: lex_cmp(pts[a], pts[b])))
    return o, bt, np.array(lex, dtype=np.int64)


def brute_force_oracle(region, U: Iterable[Direction], *, cap: int = 40, seed: int = 0) -> OracleResult:
    """Exhaustive search for two convex subsets of ``region`` with equal X-rays.

    The region should itself be convex in the model set, so that its convex
    subsets are exactly the convex subsets of the model set inside it.
    """
    src = region.points if isinstance(region, Patch) else list(region)
    pts: list[CycNum] = []
    seen = set()
    for p in src:
        c = as_cyc(p)
        if c not in seen:
            seen.add(c)
            pts.append(c)
    N = len(pts)
    if N > min(cap, 62):
        raise RegionTooLarge(f"{N} points exceed the cap of {min(cap, 62)}")
    dirs = list(U)
    o, bt, lex = point_tables(pts)
    labels = np.zeros((len(dirs), N), dtype=np.int64)
    for t, u in enumerate(dirs):
        keys: dict = {}
        for i, p in enumerate(pts):
            labels[t, i] = keys.setdefault(line_key(p, u), len(keys))
    rng = np.random.default_rng(seed)
    W = rng.integers(1, 1 << 40, size=(len(dirs), N), dtype=np.int64)
    weights = np.zeros(N, dtype=np.int64)
    for t in range(len(dirs)):
        weights += W[t, labels[t]]
    masks, hashes, complete = _kernels.enumerate_convex(o, bt, lex, weights)
    if not complete:
        raise RegionTooLarge("enumeration limit reached")
    order = np.argsort(hashes, kind="stable")
    hs = hashes[order]
    starts = np.flatnonzero(np.r_[True, hs[1:] != hs[:-1]])
    ends = np.r_[starts[1:], len(hs)]
    bits = np.int64(1) << np.arange(N, dtype=np.int64)
    for s, e in zip(starts, ends):
        if e - s < 2:
            continue
        group = masks[order[s:e]]
        member = (group[:, None] & bits[None, :]) != 0
        prints: dict = {}
        for row, mk in zip(member, group):
            fp = tuple(tuple(np.bincount(labels[t][row], minlength=N)) for t in range(len(dirs)))
            if fp in prints:
                a, b = prints[fp], int(mk)
                F = tuple(pts[i] for i in range(N) if (a >> i) & 1)
                G = tuple(pts[i] for i in range(N) if (b >> i) & 1)
                return OracleResult(False, (F, G), len(masks))
            prints[fp] = int(mk)
    return OracleResult(True, None, len(masks))
