"""Cyclotomic model sets for n in {3, 4, 5, 8, 12}.

For n in {5, 8, 12} the ring Z[zeta_n] has rank 4 and the internal space is
one complex line, reached through z -> sigma_a(z).  For n in {3, 4} the
internal space is trivial and the model set is a translate of the lattice.

Windows are open convex polygons whose vertices are CycNum points of
Q(zeta_n).  Membership is decided exactly.  Patch generation scans an
integer coefficient box with a float prefilter and confirms every
candidate exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .cyclotomic import CycNum, QuadraticSurd, parse_rational, real_sign, totient
from .errors import (
    NoInternalSpace,
    NotInSubfield,
    OrderMismatch,
    SearchExhausted,
    WindowDegenerate,
)
from .geometry import area2, is_convex_polygon, orient

SUPPORTED_N = (3, 4, 5, 8, 12)
DEFAULT_STAR = {5: 2, 8: 3, 12: 5}
LATTICE_N = (3, 4)


def to_order(x: CycNum, n: int) -> CycNum:
    """Re-express x at order n; OrderMismatch if x is not in Q(zeta_n)."""
    if x.m == n:
        return x
    try:
        if n % x.m == 0:
            return x.promote(n)
        return x.promote(math.lcm(x.m, n)).demote(n)
    except NotInSubfield:
        raise OrderMismatch(f"{x} is not in Q(zeta_{n})") from None


@dataclass(frozen=True)
class LatticePoint:
    """Element of Z[zeta_n] plus an optional CycNum offset."""

    n: int
    coeffs: tuple[int, ...]
    translate: CycNum | None = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) != totient(self.n):
            raise ValueError(f"expected {totient(self.n)} coefficients for n = {self.n}")
        if self.translate is not None and self.translate.is_zero():
            object.__setattr__(self, "translate", None)

    @classmethod
    def from_cyc(cls, x: CycNum, n: int, translate: CycNum | None = None) -> LatticePoint:
        """Lattice point whose embedding is x (x - translate must be integral)."""
        base = x - translate if translate is not None else x
        y = to_order(base, n)
        if y.den != 1:
            raise ValueError(f"{x} is not in Z[zeta_{n}]")
        return cls(n, y.num, translate)

    def lattice_part(self) -> CycNum:
        return CycNum(self.n, self.coeffs)

    def embed(self) -> CycNum:
        z = self.lattice_part()
        return z + self.translate if self.translate is not None else z

    def __add__(self, other: LatticePoint) -> LatticePoint:
        if other.n != self.n:
            raise OrderMismatch(f"n = {self.n} vs {other.n}")
        if self.translate is not None and other.translate is not None:
            raise ValueError("cannot add two translated points")
        t = self.translate if self.translate is not None else other.translate
        return LatticePoint(self.n, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), t)

    def __sub__(self, other: LatticePoint) -> LatticePoint:
        if other.n != self.n:
            raise OrderMismatch(f"n = {self.n} vs {other.n}")
        if self.translate != other.translate:
            raise ValueError("difference of points with different translates")
        return LatticePoint(self.n, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def to_json(self):
        if self.translate is None:
            return list(self.coeffs)
        return {"c": list(self.coeffs), "t": self.translate.to_json()}

    @classmethod
    def from_json(cls, obj, n: int) -> LatticePoint:
        if isinstance(obj, dict):
            return cls(n, obj["c"], CycNum.from_json(obj["t"]))
        return cls(n, obj)


def as_cyc(p) -> CycNum:
    if isinstance(p, LatticePoint):
        return p.embed()
    return CycNum.coerce(p)


# -- windows -------------------------------------------------------------------


def _window_vertex(v, n: int) -> CycNum:
    if isinstance(v, CycNum):
        return v
    x, y = (QuadraticSurd.coerce(t) for t in v)
    return x.to_cyc() + y.to_cyc() * CycNum.zeta(4)


def regular_window(n: int, k: int, radius=1, rotation: int = 0) -> tuple[CycNum, ...]:
    """Regular k-gon of circumradius ``radius`` with vertices radius*zeta_k^(j+rotation/2)."""
    r = Fraction(radius)
    if rotation % 2:
        base = [CycNum.zeta(2 * k, 2 * j + 1) for j in range(k)]
    else:
        base = [CycNum.zeta(k, j) for j in range(k)]
    return tuple(to_order(b, n) * r for b in base)


WINDOW_SHAPES = {"octagon": 8, "decagon": 10, "dodecagon": 12, "square": 4, "hexagon": 6}


def parse_window(text: str, n: int) -> tuple[CycNum, ...]:
    """``shape:radius`` such as ``octagon:1``."""
    name, _, r = text.partition(":")
    if name == "shield":
        name = "dodecagon"
    if name not in WINDOW_SHAPES:
        raise ValueError(f"unknown window shape {name!r}")
    return regular_window(n, WINDOW_SHAPES[name], parse_rational(r or "1"))


@dataclass(frozen=True)
class ModelSetSpec:
    n: int
    star_exponent: int = 0
    window: tuple[CycNum, ...] = ()
    translate: CycNum | None = None

    def __post_init__(self):
        n = self.n
        if n not in SUPPORTED_N:
            raise ValueError(f"n = {n} is not one of {SUPPORTED_N}")
        if n in LATTICE_N:
            object.__setattr__(self, "star_exponent", 0)
            object.__setattr__(self, "window", ())
        else:
            a = self.star_exponent or DEFAULT_STAR[n]
            if math.gcd(a, n) != 1 or a % n in (1, n - 1):
                raise ValueError(f"star exponent {a} is not admissible for n = {n}")
            object.__setattr__(self, "star_exponent", a)
            win = tuple(_window_vertex(v, n) for v in self.window)
            if len(win) < 3:
                raise WindowDegenerate("a window needs at least three vertices")
            if real_sign(area2(win)) < 0:
                win = win[::-1]
            if not is_convex_polygon(win):
                raise WindowDegenerate("window is not a nondegenerate convex polygon")
            object.__setattr__(self, "window", win)
        if self.translate is not None and self.translate.is_zero():
            object.__setattr__(self, "translate", None)

    @classmethod
    def default(cls, n: int, radius=1) -> ModelSetSpec:
        if n in LATTICE_N:
            return cls(n)
        shape = {5: 10, 8: 8, 12: 12}[n]
        return cls(n, DEFAULT_STAR[n], regular_window(n, shape, radius))

    @property
    def has_internal_space(self) -> bool:
        return self.n not in LATTICE_N

    @cached_property
    def circumradius(self) -> Fraction:
        """Rational upper bound on max |w| over window vertices."""
        best = 0.0
        for w in self.window:
            x, y, e = w.approx()
            best = max(best, math.hypot(x, y) + 2 * e)
        return Fraction(best * (1 + 1e-9) + 1e-12).limit_denominator(10**6) + Fraction(1, 10**6)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "star_exponent": self.star_exponent,
            "window": [w.to_json() for w in self.window],
            "translate": self.translate.to_json() if self.translate is not None else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> ModelSetSpec:
        t = obj.get("translate")
        return cls(
            int(obj["n"]),
            int(obj.get("star_exponent") or 0),
            tuple(CycNum.from_json(w) for w in obj.get("window") or ()),
            CycNum.from_json(t) if t else None,
        )


def _check_n(z: LatticePoint, spec: ModelSetSpec) -> None:
    if z.n != spec.n:
        raise OrderMismatch(f"point has n = {z.n}, spec has n = {spec.n}")


def star_map(z: LatticePoint, spec: ModelSetSpec) -> CycNum:
    """sigma_a of the lattice part; zero when there is no internal space."""
    _check_n(z, spec)
    if not spec.has_internal_space:
        return CycNum.rational(0, spec.n)
    return z.lattice_part().galois(spec.star_exponent)


def star_cyc(x: CycNum, spec: ModelSetSpec) -> CycNum:
    if not spec.has_internal_space:
        return CycNum.rational(0, spec.n)
    return to_order(x, spec.n).galois(spec.star_exponent)


def in_window(s: CycNum, spec: ModelSetSpec) -> bool:
    """Strict interior test of an internal-space point."""
    w = spec.window
    k = len(w)
    return all(orient(w[i], w[(i + 1) % k], s) > 0 for i in range(k))


def membership(z: LatticePoint, spec: ModelSetSpec) -> bool:
    _check_n(z, spec)
    if not spec.has_internal_space:
        return True
    return in_window(star_map(z, spec), spec)


@dataclass
class Patch:
    spec: ModelSetSpec
    radius: Fraction
    points: list[LatticePoint] = field(default_factory=list)

    def cycs(self) -> list[CycNum]:
        return [p.embed() for p in self.points]

    def to_json(self) -> dict:
        out = {"n": self.spec.n, "radius": str(self.radius), "points": [p.to_json() for p in self.points]}
        out["spec"] = self.spec.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> Patch:
        n = int(obj["n"])
        spec = ModelSetSpec.from_json(obj["spec"]) if "spec" in obj else ModelSetSpec.default(n)
        pts = [LatticePoint.from_json(p, n) for p in obj["points"]]
        if spec.translate is not None:
            pts = [LatticePoint(n, p.coeffs, spec.translate) for p in pts]
        return cls(spec, parse_rational(obj.get("radius", "0")) if "radius" in obj else Fraction(0), pts)


# -- patch generation ----------------------------------------------------------


@lru_cache(maxsize=None)
def _embedding_matrices(n: int, a: int) -> tuple[np.ndarray, np.ndarray]:
    phi = totient(n)
    ang = 2 * np.pi * np.arange(phi) / n
    phys = np.stack([np.cos(ang), np.sin(ang)])
    if a:
        intl = np.stack([np.cos(a * ang), np.sin(a * ang)])
    else:
        intl = np.zeros((2, phi))
    return phys, intl


def coefficient_bounds(spec: ModelSetSpec, R: Fraction) -> np.ndarray:
    """Per-coordinate bound on |c_j| for points within radius R."""
    phys, intl = _embedding_matrices(spec.n, spec.star_exponent)
    if spec.has_internal_space:
        M = np.vstack([phys, intl])
        inv = np.linalg.inv(M)
        rp = np.abs(inv[:, :2]).sum(axis=1)
        ri = np.abs(inv[:, 2:]).sum(axis=1)
        b = rp * float(R) + ri * float(spec.circumradius)
    else:
        inv = np.linalg.inv(phys)
        b = np.abs(inv).sum(axis=1) * float(R)
    return np.floor(b * (1 + 1e-9) + 1e-9).astype(np.int64) + 1


def _within(x: CycNum, R: Fraction) -> bool:
    re, im, e = x.approx()
    r2 = float(R) ** 2
    val = r2 - (re * re + im * im)
    bound = 4 * e * (abs(re) + abs(im) + e) + 1e-12 * (r2 + 1)
    if val > bound:
        return True
    if val < -bound:
        return False
    return real_sign(CycNum.rational(R * R) - x.abs2()) >= 0


def generate_patch(spec: ModelSetSpec, R, *, workers: int = 1) -> Patch:
    """All model-set points of physical modulus <= R."""
    R = Fraction(R)
    if R <= 0:
        raise ValueError("radius must be positive")
    n = spec.n
    phi = totient(n)
    bound = coefficient_bounds(spec, R)
    phys, intl = _embedding_matrices(n, spec.star_exponent)
    off = spec.translate
    if off is not None:
        ox, oy, _ = off.approx()
        bound = bound + int(math.ceil(abs(ox) + abs(oy))) + 1
        off_p = np.array([ox, oy])
    else:
        off_p = np.zeros(2)
    planes = []
    w = spec.window
    for i in range(len(w)):
        x0, y0, _ = w[i].approx()
        x1, y1, _ = w[(i + 1) % len(w)].approx()
        dx, dy = x1 - x0, y1 - y0
        norm = math.hypot(dx, dy)
        # left of the edge: dx*(v - y0) - dy*(u - x0) > 0
        planes.append((-dy / norm, dx / norm, (dy * x0 - dx * y0) / norm))
    planes_arr = np.array(planes, dtype=np.float64).reshape(-1, 3)
    tol = 1e-6 * (1.0 + float(R))
    lo, hi = -bound, bound

    def scan(range0):
        lo2, hi2 = lo.copy(), hi.copy()
        lo2[0], hi2[0] = range0
        return _kernels.box_scan(lo2, hi2, phys, intl, off_p, np.zeros(2), float(R) ** 2, planes_arr, tol)

    first = list(range(int(lo[0]), int(hi[0]) + 1))
    if workers > 1 and len(first) > 1:
        chunks = [c for c in np.array_split(np.array(first), workers) if len(c)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: scan((int(c[0]), int(c[-1]))), chunks))
        pts = np.concatenate([p for p, _ in parts]) if parts else np.empty((0, phi), np.int64)
    else:
        pts, _ = scan((int(lo[0]), int(hi[0])))
    out = []
    seen = set()
    for row in pts:
        key = tuple(int(c) for c in row)
        if key in seen:
            continue
        seen.add(key)
        p = LatticePoint(n, key, off)
        if _within(p.embed(), R) and membership(p, spec):
            out.append(p)
    return Patch(spec, R, out)


# -- PV units and the homothety embedding --------------------------------------


def pv_unit(n: int) -> CycNum:
    """Pisot unit generating Z[zeta_n]^+ for n in {5, 8, 12}."""
    if n in LATTICE_N:
        raise NoInternalSpace(f"n = {n} has no internal space")
    if n not in DEFAULT_STAR:
        raise ValueError(f"n = {n} is not supported")
    z = CycNum.zeta(n)
    base = 2 if n == 12 else 1
    lam = z + z.inverse() + base
    star = lam.galois(DEFAULT_STAR[n])
    if real_sign(lam - 1) <= 0 or real_sign(1 - star.abs2()) <= 0:
        raise ArithmeticError("PV check failed")
    return lam


def _content_denominator(x: CycNum, n: int) -> int:
    return to_order(x, n).den


@dataclass(frozen=True)
class Homothety:
    scale: CycNum
    offset: LatticePoint
    k: int

    def apply(self, x: CycNum) -> LatticePoint:
        n = self.offset.n
        y = to_order(self.scale * as_cyc(x), n) + self.offset.lattice_part()
        return LatticePoint(n, LatticePoint.from_cyc(y, n).coeffs, self.offset.translate)


def _interior_candidates(spec: ModelSetSpec, bound: int) -> Iterable[LatticePoint]:
    # small coefficient vectors, ordered by max-norm then lexicographically
    phi = totient(spec.n)
    for r in range(bound + 1):
        rng = range(-r, r + 1)
        for c in np.ndindex(*([2 * r + 1] * phi)):
            cc = tuple(rng[i] for i in c)
            if max((abs(t) for t in cc), default=0) == r:
                yield LatticePoint(spec.n, cc)


def find_homothety(F: Sequence, spec: ModelSetSpec, *, bound: int = 3, max_power: int = 200) -> Homothety:
    """Scale l*lambda^k and offset z0 with scale*F + z0 inside the model set."""
    n = spec.n
    pts = [to_order(as_cyc(f), n) for f in F]
    if not pts:
        raise ValueError("F must be nonempty")
    l = 1
    for p in pts:
        l = math.lcm(l, p.den)
    base = [p * l for p in pts]
    t = spec.translate
    if not spec.has_internal_space:
        return Homothety(CycNum.rational(l, n), LatticePoint(n, [0] * totient(n), t), 0)
    lam = pv_unit(n)
    mu = lam.galois(spec.star_exponent)
    stars = [b.galois(spec.star_exponent) for b in base]
    for z0 in _interior_candidates(spec, bound):
        s0 = star_map(z0, spec)
        if not in_window(s0, spec):
            continue
        mk = CycNum.rational(1, n)
        for k in range(max_power + 1):
            if all(in_window(mk * s + s0, spec) for s in stars):
                scale = lam**k * l
                return Homothety(scale, LatticePoint(n, z0.coeffs, t), k)
            mk = mk * mu
        break
    raise SearchExhausted(f"no admissible offset within coefficient bound {bound} and power {max_power}")


# -- Delone audit --------------------------------------------------------------


@dataclass(frozen=True)
class DeloneReport:
    min_distance: float
    covering_radius: float
    r: Fraction
    R_cov: Fraction
    separated: bool
    covering: bool

    @property
    def passed(self) -> bool:
        return self.separated and self.covering


def verify_delone(patch: Patch, r, R_cov, *, grid: int = 64) -> DeloneReport:
    """Float audit of separation (>= 2r) and covering radius on the patch interior."""
    r, R_cov = Fraction(r), Fraction(R_cov)
    xy = np.array([p.embed().approx()[:2] for p in patch.points], dtype=np.float64).reshape(-1, 2)
    if len(xy) < 2:
        return DeloneReport(math.inf, math.inf, r, R_cov, len(xy) == 1, False)
    dmin = math.inf
    for i in range(0, len(xy), 512):
        d = np.linalg.norm(xy[i : i + 512, None, :] - xy[None, :, :], axis=2)
        idx = np.arange(i, min(i + 512, len(xy)))
        d[idx - i, idx] = np.inf
        dmin = min(dmin, float(d.min()))
    inner = float(patch.radius) - 2 * float(R_cov)
    cov = 0.0
    if inner > 0:
        g = np.linspace(-inner, inner, grid)
        gx, gy = np.meshgrid(g, g)
        q = np.stack([gx.ravel(), gy.ravel()], axis=1)
        q = q[np.hypot(q[:, 0], q[:, 1]) <= inner]
        for i in range(0, len(q), 512):
            d = np.linalg.norm(q[i : i + 512, None, :] - xy[None, :, :], axis=2)
            cov = max(cov, float(d.min(axis=1).max()))
    else:
        cov = math.inf
    return DeloneReport(dmin, cov, r, R_cov, dmin >= 2 * float(r) - 1e-12, cov <= float(R_cov))
