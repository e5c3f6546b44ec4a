"""U-polygons, maximal direction ranges and ghost pairs.

A U-polygon is a convex polygon such that every line through a vertex in a
direction of U meets a second vertex.  Its two vertex color classes, padded
with the model-set points inside the polygon, form two different convex
subsets with equal X-rays in every direction of U.

Construction works in frames.  A rotated regular 2M-gon is a U-polygon for
all M directions exp(h*pi*i/M), so its chord pattern is a template.  A real
linear map carries the template onto any projectively equivalent direction
set.  The incidences of the pattern are Q-linear conditions on the vertex
coordinates; an integral point of that solution space close to the mapped
template is found by lattice reduction, with internal-space coordinates kept
small so that the polygon embeds in a model set without large dilations.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterable, Iterator, Sequence

import numpy as np

from .cyclotomic import CycNum, real_sign, totient
from .errors import (
    ConstructionFailed,
    DegeneratePolygon,
    EmbeddingFailed,
    NotColorable,
    OrderMismatch,
    UnsupportedN,
    VerificationFailed,
)
from .geometry import area2, convex_hull, im_part, in_hull, is_convex_polygon
from .modelset import (
    DEFAULT_STAR,
    LatticePoint,
    ModelSetSpec,
    find_homothety,
    generate_patch,
    to_order,
)
from .solutions import (
    REAL_SUBFIELD_D,
    Quadruple,
    classify_family,
    load_reference,
    obstruction_order,
    solve_in_field,
)
from .tomography import (
    Direction,
    cross_ratio,
    is_convex_subset,
    line_key,
    slope_of,
    xrays_equal,
)

# -- U-polygon predicate -------------------------------------------------------


@dataclass(frozen=True)
class UPolygon:
    n: int
    vertices: tuple[CycNum, ...]
    U: tuple[Direction, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "vertices": [v.to_json() for v in self.vertices],
            "directions": [u.to_json() for u in self.U],
        }

    @classmethod
    def from_json(cls, obj: dict) -> UPolygon:
        n = int(obj["n"])
        return cls(
            n,
            tuple(CycNum.from_json(v) for v in obj["vertices"]),
            tuple(Direction(n, d) for d in obj["directions"]),
        )


def _line_partners(vertices: Sequence[CycNum], u: Direction) -> dict[int, list[int]]:
    lines: dict = {}
    for i, v in enumerate(vertices):
        lines.setdefault(line_key(v, u), []).append(i)
    return lines


def is_upolygon(P, U: Iterable[Direction] | None = None) -> bool:
    """Exact check of the vertex-line property."""
    if isinstance(P, UPolygon):
        verts, dirs = list(P.vertices), list(U if U is not None else P.U)
    else:
        verts, dirs = [CycNum.coerce(v) if not isinstance(v, LatticePoint) else v.embed() for v in P], list(U)
    if real_sign(area2(verts)) < 0:
        verts = verts[::-1]
    if not is_convex_polygon(verts):
        raise DegeneratePolygon("vertices do not form a nondegenerate convex polygon")
    for u in dirs:
        if any(len(ix) < 2 for ix in _line_partners(verts, u).values()):
            return False
    return True


# -- maximal direction ranges --------------------------------------------------


@dataclass(frozen=True)
class HRangeSet:
    """Directions exp(h*pi*i/m) for h in ``hs``."""

    m: int
    hs: tuple[int, ...]

    def __post_init__(self):
        hs = tuple(sorted(set(int(h) for h in self.hs)))
        if any(h < 0 or h >= self.m for h in hs):
            raise ValueError(f"h values must lie in [0, {self.m})")
        object.__setattr__(self, "hs", hs)

    def __len__(self) -> int:
        return len(self.hs)

    def quadruples(self) -> Iterator:
        for a, b, c, d in itertools.combinations(self.hs, 4):
            yield _normalize((c - a, d - b, c - b, d - a))


def _normalize(k: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    k1, k2, k3, k4 = k
    return (k2, k1, k3, k4) if k1 > k2 else k


@dataclass(frozen=True)
class MaxDirections:
    n: int
    m: int
    ranges: tuple[HRangeSet, ...]
    b: int
    seeds: tuple[tuple[int, int, int, int], ...]
    verified: tuple[bool, ...]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "b": self.b,
            "ranges": [list(r.hs) for r in self.ranges],
            "verified": list(self.verified),
        }


# b_n for the rational cases, cited rather than derived
B_LATTICE = {3: 6, 4: 6}
REFERENCE_FOR_N = {5: "a", 8: "b", 12: "c"}


@lru_cache(maxsize=None)
def sporadic_list(n: int, source: str = "computed") -> frozenset:
    m = obstruction_order(n)
    if source == "printed":
        return frozenset(q.k for _, q in load_reference(REFERENCE_FOR_N[n]).entries)
    return frozenset(r.quadruple.k for r in solve_in_field(m, REAL_SUBFIELD_D[n]) if r.sporadic)


def _valid(k, m: int, spor: frozenset) -> bool:
    try:
        q = Quadruple(m, tuple(k))
    except ValueError:
        return False
    return q.k in spor or classify_family(q) is not None


def range_is_valid(r: HRangeSet, spor: frozenset) -> bool:
    """Every angle-ordered 4-subset maps to a solution quadruple."""
    return all(_valid(k, r.m, spor) for k in r.quadruples())


def max_direction_sets(n: int, *, source: str = "computed") -> MaxDirections:
    """Candidate ranges of more than four directions, and b_n.

    Seeds (0, k1-k3, k1, k4) come from sporadic quadruples with all k_j <= m/2.
    A seed (h1,h2,h3,h4) is extended by every h > h4 whose quadruple
    (h4-h2, h-h3, h4-h3, h-h2) is sporadic or of family form.  Seeds with no
    extension are dropped.  ``source`` selects the computed sporadic list or
    the printed tables.
    """
    if n in B_LATTICE:
        return MaxDirections(n, obstruction_order(n), (), B_LATTICE[n], (), ())
    if n not in REFERENCE_FOR_N:
        raise UnsupportedN(f"n = {n} is not one of 3, 4, 5, 8, 12")
    m = obstruction_order(n)
    spor = sporadic_list(n, source)
    seeds = []
    for k in sorted(spor):
        if max(k) <= m // 2:
            k1, k2, k3, k4 = k
            seeds.append((0, k1 - k3, k1, k4))
    ranges: list[HRangeSet] = []
    for h1, h2, h3, h4 in seeds:
        ext = [h for h in range(h4 + 1, m) if _valid((h4 - h2, h - h3, h4 - h3, h - h2), m, spor)]
        if ext:
            r = HRangeSet(m, (h1, h2, h3, h4, *ext))
            if r not in ranges:
                ranges.append(r)
    verified = tuple(range_is_valid(r, spor) for r in ranges)
    b = max((len(r) for r in ranges), default=4)
    return MaxDirections(n, m, tuple(ranges), b, tuple(seeds), verified)


def printed_ranges(n: int) -> tuple[int, list[HRangeSet]]:
    """Reference h-range lists shipped with the package, as (m, ranges)."""
    with resources.files("cyctomo.data").joinpath("h_ranges.json").open() as fh:
        obj = json.load(fh)["ranges"][str(n)]
    m = int(obj["m"])
    return m, [HRangeSet(m, r) for r in obj["ranges"]]


# -- frames --------------------------------------------------------------------


def _template(M: int) -> tuple[int, list[complex]]:
    # rotated regular 2M-gon; chord (i, j) has direction angle
    # pi*(i + j + off + M)/(2M), so direction h pairs i with 2h - off - M - i
    off = 1 if M % 2 == 0 else 0
    return off, [cmath.exp(1j * math.pi * (2 * j + off) / (2 * M)) for j in range(2 * M)]


def _partner(i: int, h: int, M: int, off: int) -> int:
    return (2 * h - off - M - i) % (2 * M)


def _vertical(n: int) -> CycNum:
    z = CycNum.zeta(n)
    return z - z.conj()


def _direction_for_angle(m: int, h: int, n: int) -> Direction | None:
    """Direction of Q(zeta_n) parallel to exp(h*pi*i/m), if any."""
    if 2 * h == m:
        return Direction.from_cyc(_vertical(n), n)
    try:
        return Direction.from_cyc(CycNum.zeta(m, h) + 1, n)
    except OrderMismatch:
        return None


def _float_slope(angle: float) -> float:
    c = math.cos(angle)
    return math.inf if abs(c) < 1e-15 else math.sin(angle) / c


def _cr_float(ts: Sequence[float]) -> float:
    t1, t2, t3, t4 = ts

    def d(a, b):
        return None if math.isinf(a) or math.isinf(b) else a - b

    acc = 1.0
    for f in (d(t3, t1), d(t4, t2)):
        if f is not None:
            acc *= f
    for f in (d(t3, t2), d(t4, t1)):
        if f is not None:
            acc /= f
    return acc


@dataclass(frozen=True)
class Frame:
    M: int
    template_h: tuple[int, ...]  # template direction per target direction
    directions: tuple[Direction, ...]
    psi: np.ndarray  # 2x2 real map from template plane to target plane


def _exact_cr(angles_num: Sequence[int], den: int) -> CycNum:
    # slopes of exp(h*pi*i/den) computed exactly
    ts = [slope_of(CycNum.zeta(2 * den, h)) for h in angles_num]
    return cross_ratio(*ts)


def _target_directions(hs: Sequence[int], m: int, n: int) -> tuple[Direction, ...]:
    direct = [_direction_for_angle(m, h, n) for h in hs]
    if all(d is not None for d in direct):
        return tuple(direct)
    # projective frame: the first three slopes go to 0, s and infinity,
    # with s the slope of 1 + zeta_n; the rest follow from cross ratios
    base = CycNum.zeta(n) + 1
    re = (base + base.conj()) / 2
    im = (base - base.conj()) / 2
    out = [Direction(n, [1] + [0] * (totient(n) - 1)), Direction.from_cyc(base, n), Direction.from_cyc(im, n)]
    h1, h2, h3 = hs[:3]
    for h in hs[3:]:
        c = _exact_cr((h1, h2, h3, h), m)
        # <0, s, inf, t> = (t - s)/t = c, so t = s/(1 - c)
        try:
            r = to_order(1 / (1 - c), n)
        except OrderMismatch:
            raise ConstructionFailed(f"cross ratio {c} is not in Q(zeta_{n})") from None
        out.append(Direction.from_cyc(re + im * r, n))
    return tuple(out)


def _fit_linear(src: Sequence[complex], dst: Sequence[complex]) -> np.ndarray:
    """Real 2x2 map A with A*src_j parallel to dst_j for every j."""
    a = np.array([[s.real, s.imag] for s in src])
    b = np.array([[d.real, d.imag] for d in dst])
    # A s_1 = b_1 and A s_2 = t b_2, with t fixed by A s_3 parallel to b_3
    S = np.array([a[0], a[1]]).T
    x = np.linalg.solve(S, a[2])  # s_3 = x0 s_1 + x1 s_2
    # x0 b_1 + x1 t b_2 parallel to b_3: cross(x0 b1 + x1 t b2, b3) = 0
    c1 = b[0, 0] * b[2, 1] - b[0, 1] * b[2, 0]
    c2 = b[1, 0] * b[2, 1] - b[1, 1] * b[2, 0]
    t = -x[0] * c1 / (x[1] * c2)
    T = np.array([b[0], t * b[1]]).T
    A = T @ np.linalg.inv(S)
    for s, d in zip(a, b):
        v = A @ s
        if abs(v[0] * d[1] - v[1] * d[0]) > 1e-7 * np.linalg.norm(v) * np.linalg.norm(d):
            raise ConstructionFailed("direction sets are not projectively equivalent")
    return A


def find_frame(hs: Sequence[int], m: int, n: int, *, M: int | None = None) -> Frame:
    """Template order M and directions matched projectively to ``hs``."""
    hs = sorted(hs)
    dirs = _target_directions(hs, m, n)
    g = 0
    for h in hs:
        g = math.gcd(g, h)
    g = math.gcd(g, m)
    natural = m // g
    if M is None or M == natural:
        tpl = tuple(h // g for h in hs)
        Mn = natural
    else:
        tpl, Mn = _match_template(hs, m, M), M
    src = [cmath.exp(1j * math.pi * h / Mn) for h in tpl]
    dst = [complex(*d.cyc().approx()[:2]) for d in dirs]
    psi = _fit_linear(src, dst)
    return Frame(Mn, tpl, dirs, psi)


def _match_template(hs: Sequence[int], m: int, M: int) -> tuple[int, ...]:
    k = len(hs)
    target = [_float_slope(math.pi * h / m) for h in hs]
    tcr = [_cr_float([target[0], target[1], target[2], target[j]]) for j in range(3, k)]
    for sub in itertools.combinations(range(M), k):
        if sub[0] != 0:
            continue
        for rot in range(k):
            for rev in (False, True):
                cand = list(sub[rot:] + sub[:rot])
                if rev:
                    cand = cand[::-1]
                sl = [_float_slope(math.pi * h / M) for h in cand]
                ok = all(
                    abs(_cr_float([sl[0], sl[1], sl[2], sl[j]]) - tcr[j - 3]) < 1e-9 for j in range(3, k)
                )
                if ok and all(
                    _exact_cr((cand[0], cand[1], cand[2], cand[j]), M)
                    == _exact_cr((hs[0], hs[1], hs[2], hs[j]), m)
                    for j in range(3, k)
                ):
                    return tuple(cand)
    raise ConstructionFailed(f"no {2 * M}-gon template matches the range")


# -- exact linear algebra ------------------------------------------------------


def _rref_nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Rational nullspace basis; rows are kept sparse during elimination."""
    R: dict[int, dict[int, Fraction]] = {}
    for row in rows:
        r = {j: Fraction(x) for j, x in enumerate(row) if x}
        for pc in sorted(set(r) & set(R)):
            f = r.get(pc)
            if not f:
                continue
            for j, b in R[pc].items():
                v = r.get(j, 0) - f * b
                if v:
                    r[j] = v
                else:
                    r.pop(j, None)
        if not r:
            continue
        lead = min(r)
        inv = 1 / r[lead]
        r = {j: x * inv for j, x in r.items()}
        for pr in R.values():
            f = pr.get(lead)
            if f:
                for j, b in r.items():
                    v = pr.get(j, 0) - f * b
                    if v:
                        pr[j] = v
                    else:
                        del pr[j]
        R[lead] = r
    free = [j for j in range(ncols) if j not in R]
    basis = []
    for fj in free:
        v = [Fraction(0)] * ncols
        v[fj] = Fraction(1)
        for pc, pr in R.items():
            v[pc] = -pr.get(fj, Fraction(0))
        basis.append(v)
    return basis


def _direction_rows(u: Direction, n: int) -> list[list[Fraction]]:
    """Independent Q-linear rows expressing Im(x * conj(u)) = 0 for x in Q(zeta_n)."""
    phi = totient(n)
    cols = []
    for k in range(phi):
        y = im_part(CycNum.zeta(n, k) * u.cyc().conj())
        cols.append(y)
    L = math.lcm(*(c.m for c in cols))
    mat = [[c.promote(L).coeffs[r] for c in cols] for r in range(totient(L))]
    out: list[list[Fraction]] = []
    # keep a maximal independent subset of rows
    basis: list[list[Fraction]] = []
    pivots: list[int] = []
    for row in mat:
        r = list(row)
        for br, bp in zip(basis, pivots):
            if r[bp]:
                f = r[bp] / br[bp]
                r = [a - f * b for a, b in zip(r, br)]
        lead = next((j for j in range(phi) if r[j]), None)
        if lead is not None:
            basis.append(r)
            pivots.append(lead)
            out.append(list(row))
    return out


def _embed_rows(vec: Sequence, n: int, N: int, a: int) -> np.ndarray:
    phi = totient(n)
    ang = 2 * np.pi * np.arange(phi) / n
    c = np.array([float(x) for x in vec]).reshape(N, phi)
    phys = np.stack([c @ np.cos(ang), c @ np.sin(ang)], axis=1).ravel()
    if a:
        intl = np.stack([c @ np.cos(a * ang), c @ np.sin(a * ang)], axis=1).ravel()
    else:
        intl = np.zeros(0)
    return np.concatenate([phys, intl])


def _fincke_pohst(Q: np.ndarray, radius: float, limit: int) -> list[np.ndarray]:
    """Integer vectors x with x^T Q x <= radius (Q positive definite)."""
    k = Q.shape[0]
    R = np.linalg.cholesky(Q).T
    d = np.diag(R) ** 2
    mu = R / np.diag(R)[:, None]
    out: list[np.ndarray] = []
    x = np.zeros(k)

    def rec(i: int, rem: float) -> None:
        if len(out) >= limit:
            return
        centre = -(mu[i, i + 1 :] @ x[i + 1 :])
        half = math.sqrt(max(rem, 0.0) / d[i])
        for v in range(math.ceil(centre - half), math.floor(centre + half) + 1):
            x[i] = v
            r = rem - d[i] * (v - centre) ** 2
            if r < 0:
                continue
            if i == 0:
                if x.any():
                    out.append(x.copy())
            else:
                rec(i - 1, r)
        x[i] = 0

    rec(k - 1, radius)
    return out


def _float_convex(xy: np.ndarray) -> bool:
    d = np.roll(xy, -1, axis=0) - xy
    cr = d[:, 0] * np.roll(d, -1, axis=0)[:, 1] - d[:, 1] * np.roll(d, -1, axis=0)[:, 0]
    scale = np.abs(d).max() ** 2
    if not np.all(cr > 1e-9 * scale):
        return False
    ang = np.arctan2(d[:, 1], d[:, 0])
    turn = np.mod(np.diff(np.r_[ang, ang[0]]), 2 * np.pi).sum()
    return abs(turn - 2 * np.pi) < 1e-6


def build_upolygon(
    hs,
    n: int,
    *,
    m: int | None = None,
    vertices: int | None = None,
    star_exponent: int | None = None,
    internal_radius: float = 0.45,
    tolerance: float = 0.15,
    max_doublings: int = 24,
) -> UPolygon:
    """A U-polygon over Z[zeta_n] for the directions of ``hs``.

    ``vertices`` asks for a template with that many vertices; it must be 2M
    for a template order M with a projectively equivalent direction subset.
    For n with internal space, every vertex star image lies within
    ``internal_radius`` of the star image of the first vertex.
    """
    if isinstance(hs, HRangeSet):
        m, hs = hs.m, list(hs.hs)
    elif m is None:
        m = obstruction_order(n)
    hs = sorted(set(hs))
    if len(hs) < 3:
        raise ConstructionFailed("at least three directions are needed")
    frame = find_frame(hs, m, n, M=None if vertices is None else vertices // 2)
    M = frame.M
    off, tpl = _template(M)
    N = 2 * M
    phi = totient(n)
    a = star_exponent if star_exponent is not None else DEFAULT_STAR.get(n, 0)

    rows: list[list[Fraction]] = []
    for u, h in zip(frame.directions, frame.template_h):
        drows = _direction_rows(u, n)
        done = set()
        for i in range(N):
            j = _partner(i, h, M, off)
            if (j, i) in done:
                continue
            done.add((i, j))
            for dr in drows:
                r = [Fraction(0)] * (N * phi)
                for t in range(phi):
                    r[j * phi + t] += dr[t]
                    r[i * phi + t] -= dr[t]
                rows.append(r)
    # pin the first vertex at the origin to remove translations
    for t in range(phi):
        r = [Fraction(0)] * (N * phi)
        r[t] = Fraction(1)
        rows.append(r)
    basis = _rref_nullspace(rows, N * phi)
    if not basis:
        raise ConstructionFailed("the incidence system has only the zero solution")
    ints = []
    for v in basis:
        den = math.lcm(*(x.denominator for x in v))
        ints.append([int(x * den) for x in v])

    A = frame.psi
    T = np.array([A @ np.array([z.real, z.imag]) for z in tpl])
    T = (T - T[0]).ravel()
    Emb = np.array([_embed_rows(b, n, N, a) for b in ints])
    P = Emb[:, : 2 * N]
    coef, *_ = np.linalg.lstsq(P.T, T, rcond=None)
    if np.linalg.norm(P.T @ coef - T) > 1e-6 * np.linalg.norm(T):
        raise ConstructionFailed("template is not in the solution space")
    reverse = np.linalg.det(A) < 0
    tn = T / np.linalg.norm(T)
    # shape error is measured relative to the exterior angle of the template
    eps = tolerance * math.sin(math.pi / N)
    par = P @ tn
    perp = P - np.outer(par, tn)
    intl = Emb[:, 2 * N :]

    size = 1.0
    for _ in range(max_doublings):
        size *= 2
        Q = np.outer(par, par) / size**2 + perp @ perp.T / (eps * size) ** 2
        if a:
            Q = Q + intl @ intl.T / (internal_radius**2 * N)
        cands = _fincke_pohst(Q, 1.0, limit=20000)
        best = None
        for c in cands:
            e = c @ Emb
            ph = e[: 2 * N] @ tn
            if ph <= 0:
                continue
            if a and np.abs(e[2 * N :]).max() > internal_radius:
                continue
            xy = e[: 2 * N].reshape(N, 2)
            if reverse:
                xy = xy[::-1]
            if not _float_convex(xy):
                continue
            if best is None or ph < best[0]:
                best = (ph, c)
        if best is None:
            continue
        c = [int(x) for x in best[1]]
        vec = [sum(ci * ints[k][t] for k, ci in enumerate(c)) for t in range(N * phi)]
        order = range(N - 1, -1, -1) if reverse else range(N)
        verts = [CycNum(n, vec[i * phi : (i + 1) * phi]) for i in order]
        if len(set(verts)) != N or not is_convex_polygon(verts):
            continue
        P_out = UPolygon(n, tuple(verts), frame.directions)
        if is_upolygon(P_out):
            return P_out
    raise ConstructionFailed(f"no integral U-polygon found after {max_doublings} doublings")


# -- coloring and ghost pairs --------------------------------------------------


def two_coloring(P: UPolygon) -> tuple[list[CycNum], list[CycNum]]:
    """Split the vertices so each U-line carries one black and one grey vertex."""
    verts = list(P.vertices)
    N = len(verts)
    adj: list[list[int]] = [[] for _ in range(N)]
    for u in P.U:
        for ix in _line_partners(verts, u).values():
            if len(ix) != 2:
                raise NotColorable(f"a line in direction {u} meets {len(ix)} vertices")
            a, b = ix
            adj[a].append(b)
            adj[b].append(a)
    color = [-1] * N
    for s in range(N):
        if color[s] >= 0:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if color[y] < 0:
                    color[y] = 1 - color[x]
                    stack.append(y)
                elif color[y] == color[x]:
                    raise NotColorable("the pairing graph has an odd cycle")
    black = [v for v, c in zip(verts, color) if c == 0]
    grey = [v for v, c in zip(verts, color) if c == 1]
    return black, grey


@dataclass(frozen=True)
class GhostPair:
    n: int
    common: tuple[LatticePoint, ...]
    black: tuple[LatticePoint, ...]
    grey: tuple[LatticePoint, ...]
    U: tuple[Direction, ...]
    spec: ModelSetSpec
    polygon: tuple[LatticePoint, ...] = ()

    @property
    def first(self) -> list[LatticePoint]:
        return list(self.common) + list(self.black)

    @property
    def second(self) -> list[LatticePoint]:
        return list(self.common) + list(self.grey)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "spec": self.spec.to_json(),
            "directions": [u.to_json() for u in self.U],
            "polygon": [p.to_json() for p in self.polygon],
            "common": [p.to_json() for p in self.common],
            "black": [p.to_json() for p in self.black],
            "grey": [p.to_json() for p in self.grey],
        }

    @classmethod
    def from_json(cls, obj: dict) -> GhostPair:
        n = int(obj["n"])
        pts = lambda key: tuple(LatticePoint.from_json(p, n) for p in obj.get(key, []))  # noqa: E731
        return cls(
            n,
            pts("common"),
            pts("black"),
            pts("grey"),
            tuple(Direction(n, d) for d in obj["directions"]),
            ModelSetSpec.from_json(obj["spec"]),
            pts("polygon"),
        )


def ghost_pair(P: UPolygon, spec: ModelSetSpec, *, check: bool = True) -> GhostPair:
    """Embed P in the model set and return its verified ghost pair."""
    n = spec.n
    if P.n != n:
        raise EmbeddingFailed(f"polygon over Q(zeta_{P.n}) but spec has n = {n}")
    try:
        h = find_homothety(list(P.vertices), spec)
    except Exception as exc:
        raise EmbeddingFailed(str(exc)) from exc
    images = [h.apply(v) for v in P.vertices]
    black0, grey0 = two_coloring(P)
    bset = set(black0)
    black = tuple(img for v, img in zip(P.vertices, images) if v in bset)
    grey = tuple(img for v, img in zip(P.vertices, images) if v not in bset)
    pts = [img.embed() for img in images]
    R = 0
    for p in pts:
        x, y, e = p.approx()
        R = max(R, math.ceil(math.hypot(x, y) + e) + 1)
    patch = generate_patch(spec, R)
    hull = convex_hull(pts)
    vset = set(pts)
    common = tuple(q for q in patch.points if q.embed() not in vset and in_hull(q.embed(), hull))
    gp = GhostPair(n, common, black, grey, P.U, spec, tuple(images))
    if check:
        F, G = gp.first, gp.second
        if set(F) == set(G):
            raise VerificationFailed("the two sets coincide")
        if not xrays_equal(F, G, P.U):
            raise VerificationFailed("X-rays differ")
        if not (is_convex_subset(F, spec, patch) and is_convex_subset(G, spec, patch)):
            raise VerificationFailed("a color class is not a convex subset")
    return gp


# -- affinely regular polygons -------------------------------------------------


def affinely_regular_exists(k: int, n: int) -> bool:
    """Q(zeta_k)^+ is contained in Q(zeta_n)^+."""
    if k < 3:
        raise ValueError("k must be at least 3")
    c = CycNum.zeta(k) + CycNum.zeta(k, k - 1)
    if c.is_rational():
        return True
    if totient(k) // 2 > max(1, totient(n) // 2) or (totient(n) // 2) % (totient(k) // 2):
        return False
    try:
        to_order(c, n)
    except Exception:
        return False
    return True
