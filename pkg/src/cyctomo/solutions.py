"""Solutions of f_m(d) in a real quadratic field, and obstruction sets.

D_m is the set of quadruples d = (k1, k2, k3, k4) with
k3 < k1 <= k2 < k4 <= m - 1 and k1 + k2 = k3 + k4, and

    f_m(d) = (1 - z^k1)(1 - z^k2) / ((1 - z^k3)(1 - z^k4)),  z = zeta_m.

Two infinite families take the value 2 (m = 2s):

    XII(s, k)  = (2k, s, k, k + s),  1 <= k <= s/2
    XIII(s, k) = (s, 2k, k, k + s),  s/2 <= k < s

Membership of f_m(d) in Q(sqrt(D)) is screened in bulk by a Galois
invariance test, then confirmed by exact evaluation.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterator

import numpy as np

from . import _kernels
from .cyclotomic import (
    CycNum,
    QuadraticSurd,
    _reduce,
    parse_rational,
    quadratic_conductor,
    reduction_matrix,
    sqrt_embedding,
    sqrt_in_field,
    to_quadratic,
    units,
)
from .errors import MalformedReference, OrderTooSmall, SubfieldAbsent, UnsupportedField

# real subfield Q(zeta_n)^+ as Q(sqrt(D)) where it is rational or quadratic
REAL_SUBFIELD_D = {1: 1, 2: 1, 3: 1, 4: 1, 6: 1, 5: 5, 10: 5, 8: 2, 12: 3}


@dataclass(frozen=True, order=True)
class Quadruple:
    m: int
    k: tuple[int, int, int, int]

    def __post_init__(self):
        k1, k2, k3, k4 = self.k
        if self.m < 4:
            raise OrderTooSmall(f"m = {self.m} < 4")
        if not (0 < k3 < k1 <= k2 < k4 <= self.m - 1 and k1 + k2 == k3 + k4):
            raise ValueError(f"{self.k} is not in D_{self.m}")

    @property
    def content(self) -> int:
        return math.gcd(self.m, *self.k)

    @property
    def is_primitive(self) -> bool:
        return self.content == 1

    def primitive(self) -> Quadruple:
        g = self.content
        if g == 1:
            return self
        return Quadruple(self.m // g, tuple(x // g for x in self.k))

    def scaled(self, t: int) -> Quadruple:
        return Quadruple(self.m * t, tuple(x * t for x in self.k))

    def __str__(self) -> str:
        return f"{self.m}:({', '.join(map(str, self.k))})"


@dataclass(frozen=True)
class Family:
    kind: str  # "XII" or "XIII"
    s: int
    k: int

    def to_json(self) -> dict:
        return {"type": self.kind, "s": self.s, "k": self.k}


@dataclass(frozen=True)
class SolutionRecord:
    quadruple: Quadruple
    value: QuadraticSurd
    family: Family | None
    primitive: bool

    @property
    def sporadic(self) -> bool:
        return self.family is None

    def to_json(self) -> dict:
        return {
            "m": self.quadruple.m,
            "d": list(self.quadruple.k),
            "q": self.value.to_json(),
            "family": self.family.to_json() if self.family else None,
            "primitive": self.primitive,
        }

    @classmethod
    def from_json(cls, obj: dict) -> SolutionRecord:
        q = Quadruple(int(obj["m"]), tuple(int(x) for x in obj["d"]))
        fam = obj.get("family")
        family = Family(fam["type"], int(fam["s"]), int(fam["k"])) if fam else None
        return cls(q, QuadraticSurd.from_json(obj["q"]), family, bool(obj["primitive"]))


@dataclass(frozen=True)
class ObstructionSet:
    n: int
    m_used: int
    values: frozenset
    D: int | None = None

    def sorted_values(self) -> list:
        if self.D is None:
            return sorted(self.values, key=lambda v: v.to_complex().real)
        return sorted(self.values, key=lambda v: (float(v), v.a, v.b))

    def __contains__(self, x) -> bool:
        if self.D is None:
            return CycNum.coerce(x) in self.values
        if isinstance(x, CycNum):
            if not x.is_real():
                return False
            x = to_quadratic(x.promote(math.lcm(x.m, quadratic_conductor(self.D))), self.D)
            if x is None:
                return False
        return x in self.values

    def __len__(self) -> int:
        return len(self.values)


# -- enumeration -------------------------------------------------------------------


def enum_quadruples(m: int) -> Iterator[Quadruple]:
    """D_m in lexicographic order."""
    if m < 4:
        raise OrderTooSmall(f"m = {m} < 4")
    for k1 in range(2, m - 1):
        for k2 in range(k1, m - 1):
            for k3 in range(max(1, k1 + k2 - m + 1), k1):
                yield Quadruple(m, (k1, k2, k3, k1 + k2 - k3))


@lru_cache(maxsize=64)
def quadruple_array(m: int) -> np.ndarray:
    if m < 4:
        raise OrderTooSmall(f"m = {m} < 4")
    rows = [
        (k1, k2, k3, k1 + k2 - k3)
        for k1 in range(2, m - 1)
        for k2 in range(k1, m - 1)
        for k3 in range(max(1, k1 + k2 - m + 1), k1)
    ]
    arr = np.array(rows, dtype=np.int64).reshape(-1, 4)
    arr.setflags(write=False)
    return arr


def _f_group_ring(m: int, k: tuple[int, int, int, int]) -> tuple[list[int], int]:
    # M3*M4*f as an element of Z[x]/(x^m - 1), via 1/(1-w) = -(1/M) sum j w^j
    k1, k2, k3, k4 = k
    acc = [0] * m
    acc[0] += 1
    acc[k1 % m] -= 1
    acc[k2 % m] -= 1
    acc[(k1 + k2) % m] += 1
    den = 1
    for kk in (k3, k4):
        M = m // math.gcd(kk, m)
        den *= M
        nxt = [0] * m
        for i, a in enumerate(acc):
            if a:
                for j in range(1, M):
                    nxt[(i + j * kk) % m] -= j * a
        acc = nxt
    return acc, den


def eval_f(q: Quadruple) -> CycNum:
    """Exact value of f_m at q."""
    acc, den = _f_group_ring(q.m, q.k)
    return CycNum(q.m, _reduce(q.m, acc), den)


def eval_f_direct(q: Quadruple) -> CycNum:
    """f_m from its defining quotient (reference path, slower)."""
    z = CycNum.zeta
    k1, k2, k3, k4 = q.k
    m = q.m
    return (1 - z(m, k1)) * (1 - z(m, k2)) / ((1 - z(m, k3)) * (1 - z(m, k4)))


def classify_family(q: Quadruple) -> Family | None:
    p = q.primitive()
    if p.m % 2:
        return None
    s = p.m // 2
    k1, k2, k3, k4 = p.k
    if k2 == s and k1 == 2 * k3 and k4 == k3 + s and 1 <= k3 and 2 * k3 <= s:
        return Family("XII", s, k3)
    if k1 == s and k2 == 2 * k3 and k4 == k3 + s and s <= 2 * k3 < 2 * s:
        return Family("XIII", s, k3)
    return None


# -- solving -----------------------------------------------------------------------


@lru_cache(maxsize=None)
def _fixing_units(m: int, D: int) -> tuple[int, ...]:
    if D == 1:
        return tuple(a for a in units(m) if a != 1)
    s = sqrt_embedding(D).promote(m)
    return tuple(a for a in units(m) if a != 1 and s.galois(a) == s)


@lru_cache(maxsize=None)
def _subfield_units(m: int, n: int) -> tuple[int, ...]:
    # Gal(Q(zeta_m)/Q(zeta_n)^+) for n | m
    return tuple(a for a in units(m) if a != 1 and (a % n in (1, n - 1)))


def _screen(quads: np.ndarray, m: int, autos: tuple[int, ...], workers: int) -> np.ndarray:
    red = reduction_matrix(m)
    autos_arr = np.array(autos, dtype=np.int64)
    if workers <= 1 or len(quads) < 2 * workers:
        return _kernels.galois_screen(quads, m, red, autos_arr)
    chunks = np.array_split(quads, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: _kernels.galois_screen(c, m, red, autos_arr), chunks))
    return np.concatenate(parts)


def _values_exact(quads: np.ndarray, m: int) -> list[CycNum]:
    nums, dens = _kernels.f_numerators(quads, m, reduction_matrix(m))
    return [CycNum(m, [int(c) for c in row], int(d)) for row, d in zip(nums, dens)]


def solve_in_field(m: int, D: int, *, screen: bool = True, workers: int = 1) -> list[SolutionRecord]:
    """All d in D_m with f_m(d) in Q(sqrt(D)), in lexicographic order."""
    if m < 4:
        raise OrderTooSmall(f"m = {m} < 4")
    if D != 1 and not sqrt_in_field(D, m):
        raise SubfieldAbsent(f"sqrt({D}) is not in Q(zeta_{m})")
    quads = quadruple_array(m)
    if screen:
        keep = _screen(quads, m, _fixing_units(m, D), workers)
        cand = quads[keep]
        values = _values_exact(cand, m)
    else:
        cand = quads
        values = [eval_f(Quadruple(m, tuple(int(x) for x in row))) for row in quads]
    out = []
    for row, v in zip(cand, values):
        q = Quadruple(m, tuple(int(x) for x in row))
        qs = to_quadratic(v, D)
        if qs is None:
            if screen:
                raise ArithmeticError(f"screen passed {q} but f is not in Q(sqrt({D}))")
            continue
        out.append(SolutionRecord(q, qs, classify_family(q), q.is_primitive))
    out.sort(key=lambda r: r.quadruple.k)
    return out


def obstruction_order(n: int) -> int:
    return math.lcm(2 * n, 12)


def obstruction_set(n: int, *, general: bool = False, workers: int = 1) -> ObstructionSet:
    """Values of f_m in Q(zeta_n)^+ for m = lcm(2n, 12)."""
    if n < 3:
        raise ValueError("n must be at least 3")
    m = obstruction_order(n)
    D = REAL_SUBFIELD_D.get(n)
    if D is not None:
        recs = solve_in_field(m, D, workers=workers)
        return ObstructionSet(n, m, frozenset(r.value for r in recs), D)
    if not general:
        raise UnsupportedField(f"Q(zeta_{n})^+ is neither rational nor real quadratic")
    quads = quadruple_array(m)
    keep = _screen(quads, m, _subfield_units(m, n), workers)
    vals = frozenset(v.demote(n) for v in _values_exact(quads[keep], m))
    return ObstructionSet(n, m, vals, None)


# -- reference tables ----------------------------------------------------------


@dataclass(frozen=True)
class ReferenceTable:
    name: str
    m: int
    D: int
    entries: tuple[tuple[int, Quadruple], ...]


@dataclass
class DiffReport:
    table: str
    m: int
    matched: int = 0
    missing_from_reference: list = field(default_factory=list)
    missing_from_computation: list = field(default_factory=list)
    family_entries: list = field(default_factory=list)
    duplicate_entries: list = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (
            self.missing_from_reference
            or self.missing_from_computation
            or self.family_entries
            or self.duplicate_entries
        )

    def to_json(self) -> dict:
        return {
            "table": self.table,
            "m": self.m,
            "matched": self.matched,
            "empty": self.empty,
            "missing_from_reference": [list(q.k) for q in self.missing_from_reference],
            "missing_from_computation": [
                {"entry": e, "d": list(q.k)} for e, q in self.missing_from_computation
            ],
            "family_entries": [{"entry": e, "d": list(q.k)} for e, q in self.family_entries],
            "duplicate_entries": [{"entry": e, "d": list(q.k)} for e, q in self.duplicate_entries],
        }

    def lines(self) -> list[str]:
        out = [f"table {self.table} (m = {self.m}): {self.matched} matched"]
        for q in self.missing_from_reference:
            out.append(f"  computed, not in table: {q.k}")
        for e, q in self.missing_from_computation:
            out.append(f"  entry {e} {q.k}: not a sporadic solution")
        for e, q in self.family_entries:
            out.append(f"  entry {e} {q.k}: reduces to a family form")
        for e, q in self.duplicate_entries:
            out.append(f"  entry {e} {q.k}: duplicate")
        return out


REFERENCE_NAMES = ("a", "b", "c")


def parse_reference(obj: dict, name: str | None = None) -> ReferenceTable:
    try:
        m = int(obj["m"])
        D = int(obj["D"])
        entries = []
        for item in obj["entries"]:
            e = int(item["entry"])
            d = tuple(int(x) for x in item["d"])
            if len(d) != 4:
                raise ValueError(f"entry {e} does not have four components")
            entries.append((e, Quadruple(m, d)))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedReference(str(exc)) from exc
    nums = [e for e, _ in entries]
    if len(set(nums)) != len(nums):
        raise MalformedReference("repeated entry numbers")
    return ReferenceTable(name or str(obj.get("table", "?")), m, D, tuple(entries))


def load_reference(name: str) -> ReferenceTable:
    if name not in REFERENCE_NAMES:
        raise MalformedReference(f"unknown reference table {name!r}")
    raw = resources.files("cyctomo.data").joinpath(f"table_{name}.json").read_text()
    return parse_reference(json.loads(raw), name)


def load_value_sets() -> dict[int, frozenset]:
    raw = json.loads(resources.files("cyctomo.data").joinpath("value_sets.json").read_text())
    out = {}
    for n, spec in raw["sets"].items():
        D = int(spec["D"])
        out[int(n)] = frozenset(
            QuadraticSurd(parse_rational(a), parse_rational(b), D) for a, b in spec["values"]
        )
    return out


def reconcile_with_reference(records: list[SolutionRecord], reference: ReferenceTable) -> DiffReport:
    """Compare sporadic records with a reference table at the same m."""
    report = DiffReport(reference.name, reference.m)
    computed = {r.quadruple for r in records if r.sporadic and r.quadruple.m == reference.m}
    seen = set()
    for e, q in reference.entries:
        if q in seen:
            report.duplicate_entries.append((e, q))
            continue
        seen.add(q)
        if classify_family(q) is not None:
            report.family_entries.append((e, q))
        elif q in computed:
            report.matched += 1
        else:
            report.missing_from_computation.append((e, q))
    report.missing_from_reference = sorted(computed - seen, key=lambda q: q.k)
    return report


def records_to_csv(records: list[SolutionRecord]) -> str:
    lines = ["m,k1,k2,k3,k4,a,b,D,family,s,k,primitive"]
    for r in records:
        fam = r.family
        lines.append(
            ",".join(
                [str(r.quadruple.m), *map(str, r.quadruple.k)]
                + [str(Fraction(r.value.a)), str(Fraction(r.value.b)), str(r.value.D)]
                + [fam.kind if fam else "", str(fam.s) if fam else "", str(fam.k) if fam else ""]
                + [str(r.primitive).lower()]
            )
        )
    return "\n".join(lines) + "\n"
