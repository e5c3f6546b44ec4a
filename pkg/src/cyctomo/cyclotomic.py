"""Exact arithmetic in cyclotomic fields.

Elements of Q(zeta_m) are stored in the power basis 1, zeta_m, ...,
zeta_m^(phi(m)-1) as an integer numerator vector over one positive common
denominator.  Binary operations promote both operands to the lcm of their
orders; equality and hashing are order independent.

Signs of real elements are decided from integer dyadic enclosures of the
cosines cos(2 pi j / m), with exact zero detected up front.
"""

from __future__ import annotations

import math
import os
import random
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from mpmath.libmp import from_rational, mpf_cos_pi, mpf_shift, mpf_sin_pi, to_int

from .errors import (
    DivisionByZero,
    NotADivisor,
    NotAUnit,
    NotInSubfield,
    NotReal,
    PrecisionExhausted,
    SubfieldAbsent,
)

__all__ = [
    "CycNum",
    "QuadraticSurd",
    "RealInterval",
    "cyc_make",
    "cyc_add",
    "cyc_mul",
    "cyc_neg",
    "cyc_inv",
    "galois_apply",
    "is_real",
    "real_sign",
    "re_sign",
    "im_sign",
    "to_quadratic",
    "promote_order",
    "demote_order",
    "sqrt_embedding",
    "cyclotomic_poly",
    "totient",
    "units",
    "parse_rational",
    "format_rational",
    "precision_cap_bits",
]

DEFAULT_CAP_BITS = 4096
START_BITS = 64


def precision_cap_bits() -> int:
    raw = os.environ.get("DT_PRECISION_CAP_BITS")
    if not raw:
        return DEFAULT_CAP_BITS
    try:
        cap = int(raw)
    except ValueError:
        return DEFAULT_CAP_BITS
    return max(cap, START_BITS)


# -- elementary number theory -------------------------------------------------


@lru_cache(maxsize=None)
def totient(m: int) -> int:
    result, k, p = m, m, 2
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            result -= result // p
        p += 1
    if k > 1:
        result -= result // k
    return result


@lru_cache(maxsize=None)
def units(m: int) -> tuple[int, ...]:
    if m == 1:
        return (0,)
    return tuple(a for a in range(1, m) if math.gcd(a, m) == 1)


def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _prime_factors(m: int) -> list[int]:
    out, p = [], 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def _polydiv_exact(num: list[int], den: Sequence[int]) -> list[int]:
    # den monic; coefficients low to high
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dn]
        out[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    if any(num[:dn]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, constant term first."""
    poly = [-1] + [0] * (m - 1) + [1]
    for d in _divisors(m)[:-1]:
        poly = _polydiv_exact(poly, cyclotomic_poly(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _reduction_rows(m: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    # sparse rows of x^j mod Phi_m for phi(m) <= j < m
    phi = totient(m)
    poly = cyclotomic_poly(m)
    rows = []
    cur = [0] * phi
    if phi < m:
        # x^phi = -(Phi_m - x^phi)
        cur = [-c for c in poly[:phi]]
        rows.append(cur)
        for _ in range(phi + 1, m):
            top = cur[-1]
            nxt = [0] + cur[:-1]
            if top:
                nxt = [a - top * c for a, c in zip(nxt, poly[:phi])]
            cur = nxt
            rows.append(cur)
    return tuple(tuple((i, c) for i, c in enumerate(r) if c) for r in rows)


def reduction_matrix(m: int):
    """Dense integer matrix R with R[j] = x^j mod Phi_m for 0 <= j < m."""
    import numpy as np

    phi = totient(m)
    mat = np.zeros((m, phi), dtype=np.int64)
    for j in range(phi):
        mat[j, j] = 1
    for off, row in enumerate(_reduction_rows(m)):
        for i, c in row:
            mat[phi + off, i] = c
    return mat


def _reduce(m: int, acc: list[int]) -> list[int]:
    phi = totient(m)
    out = acc[:phi]
    for off, row in enumerate(_reduction_rows(m)):
        c = acc[phi + off]
        if c:
            for i, r in row:
                out[i] += c * r
    return out


# -- rationals ----------------------------------------------------------------


def parse_rational(s) -> Fraction:
    if isinstance(s, bool):
        raise ValueError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, Fraction):
        return s
    if not isinstance(s, str):
        raise ValueError(f"not a rational: {s!r}")
    txt = s.strip()
    head, _, tail = txt.partition("/")
    try:
        num = int(head)
        den = int(tail) if tail else 1
    except ValueError:
        raise ValueError(f"not an exact rational string: {s!r}") from None
    if den == 0:
        raise ValueError(f"zero denominator: {s!r}")
    return Fraction(num, den)


def format_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


# -- hashing ------------------------------------------------------------------
# Elements are hashed by their image in F_p under zeta_m -> g^(L/m), where
# p = 1 mod L.  This map is a ring homomorphism on Z[zeta_L], so the value does
# not depend on the order used to represent the element.

_HASH_L = 1
for _k in range(2, 129):
    _HASH_L = _lcm(_HASH_L, _k)


def _probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(12345)
    for _ in range(24):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _hash_field() -> tuple[int, int]:
    k = 1
    while not _probable_prime(k * _HASH_L + 1):
        k += 1
    p = k * _HASH_L + 1
    qs = _prime_factors(_HASH_L)
    a = 2
    while True:
        g = pow(a, (p - 1) // _HASH_L, p)
        if all(pow(g, _HASH_L // q, p) != 1 for q in qs):
            return p, g
        a += 1


_HASH_P, _HASH_G = _hash_field()


@lru_cache(maxsize=None)
def _hash_powers(m: int) -> tuple[int, ...]:
    z = pow(_HASH_G, _HASH_L // m, _HASH_P)
    return tuple(pow(z, j, _HASH_P) for j in range(totient(m)))


# -- the field element ----------------------------------------------------------


class CycNum:
    """Immutable element of Q(zeta_m)."""

    __slots__ = ("m", "num", "den", "_h", "_a")

    def __init__(self, m: int, num: Sequence[int], den: int = 1):
        if m < 1:
            raise ValueError("order must be positive")
        if len(num) != totient(m):
            raise ValueError(f"expected {totient(m)} coefficients, got {len(num)}")
        if den == 0:
            raise DivisionByZero("zero denominator")
        g = den
        for c in num:
            if c:
                g = math.gcd(g, c)
                if g == 1:
                    break
        if den < 0:
            g = -g
        if g != 1:
            num = [c // g for c in num]
            den //= g
        self.m = m
        self.num = tuple(num)
        self.den = den
        self._h = None
        self._a = None

    # construction

    @classmethod
    def from_coeffs(cls, m: int, coeffs: Iterable) -> CycNum:
        qs = [Fraction(c) for c in coeffs]
        den = 1
        for q in qs:
            den = _lcm(den, q.denominator)
        return cls(m, [q.numerator * (den // q.denominator) for q in qs], den)

    @classmethod
    def rational(cls, q, m: int = 1) -> CycNum:
        q = Fraction(q)
        num = [0] * totient(m)
        num[0] = q.numerator
        return cls(m, num, q.denominator)

    @classmethod
    def zeta(cls, m: int, k: int = 1) -> CycNum:
        acc = [0] * m
        acc[k % m] = 1
        return cls(m, _reduce(m, acc))

    @classmethod
    def coerce(cls, x) -> CycNum:
        if isinstance(x, CycNum):
            return x
        if isinstance(x, QuadraticSurd):
            return x.to_cyc()
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return cls.rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to CycNum")

    # views

    @property
    def order(self) -> int:
        return self.m

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self.num[0], self.den)

    def __bool__(self) -> bool:
        return not self.is_zero()

    # order changes

    def promote(self, m2: int) -> CycNum:
        if m2 == self.m:
            return self
        if m2 % self.m:
            raise NotADivisor(f"{self.m} does not divide {m2}")
        t = m2 // self.m
        acc = [0] * m2
        for j, c in enumerate(self.num):
            acc[j * t] = c
        return CycNum(m2, _reduce(m2, acc), self.den)

    def _group_ring(self, m2: int) -> list[int]:
        t = m2 // self.m
        acc = [0] * m2
        for j, c in enumerate(self.num):
            acc[j * t] = c
        return acc

    def demote(self, d: int) -> CycNum:
        """Represent the element at order d, or raise NotInSubfield."""
        if d == self.m:
            return self
        if self.is_rational():
            return CycNum.rational(self.to_fraction(), d)
        L = _lcm(self.m, d)
        target = self.promote(L)
        phi_d = totient(d)
        basis = [CycNum.zeta(d, i).promote(L) for i in range(phi_d)]
        sol = _solve_rational([b.coeffs for b in basis], target.coeffs)
        if sol is None:
            raise NotInSubfield(f"element is not in Q(zeta_{d})")
        return CycNum.from_coeffs(d, sol)

    def conductor(self) -> int:
        """Smallest d with the element in Q(zeta_d)."""
        m = self.m
        for d in _divisors(m):
            if d % 4 == 2:
                continue
            if all(self.galois(a) == self for a in units(m) if a % d == 1 and a != 1):
                return d
        return m

    # arithmetic

    @staticmethod
    def _align(x: CycNum, y) -> tuple[CycNum, CycNum]:
        if not isinstance(y, CycNum):
            y = CycNum.coerce(y)
        if x.m == y.m:
            return x, y
        L = _lcm(x.m, y.m)
        return x.promote(L), y.promote(L)

    def __add__(self, other) -> CycNum:
        try:
            x, y = CycNum._align(self, other)
        except TypeError:
            return NotImplemented
        if x.den == y.den:
            return CycNum(x.m, [a + b for a, b in zip(x.num, y.num)], x.den)
        return CycNum(x.m, [a * y.den + b * x.den for a, b in zip(x.num, y.num)], x.den * y.den)

    __radd__ = __add__

    def __neg__(self) -> CycNum:
        return CycNum(self.m, [-c for c in self.num], self.den)

    def __sub__(self, other) -> CycNum:
        try:
            x, y = CycNum._align(self, other)
        except TypeError:
            return NotImplemented
        return x + (-y)

    def __rsub__(self, other) -> CycNum:
        return (-self) + other

    def __mul__(self, other) -> CycNum:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            q = Fraction(other)
            return CycNum(self.m, [c * q.numerator for c in self.num], self.den * q.denominator)
        try:
            x, y = CycNum._align(self, other)
        except TypeError:
            return NotImplemented
        if x.is_rational():
            q0 = x.num[0]
            return CycNum(x.m, [c * q0 for c in y.num], x.den * y.den)
        if y.is_rational():
            q0 = y.num[0]
            return CycNum(x.m, [c * q0 for c in x.num], x.den * y.den)
        m = x.m
        acc = [0] * m
        ynz = [(j, b) for j, b in enumerate(y.num) if b]
        for i, a in enumerate(x.num):
            if a:
                for j, b in ynz:
                    k = i + j
                    if k >= m:
                        k -= m
                    acc[k] += a * b
        return CycNum(m, _reduce(m, acc), x.den * y.den)

    __rmul__ = __mul__

    def inverse(self) -> CycNum:
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.is_rational():
            return CycNum.rational(Fraction(self.den, self.num[0]), self.m)
        # product of the other conjugates, divided by the norm
        acc = CycNum.rational(1, self.m)
        for a in units(self.m)[1:]:
            acc = acc * self.galois(a)
        norm = (acc * self).to_fraction()
        return acc * (1 / norm)

    def __truediv__(self, other) -> CycNum:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise DivisionByZero("division by zero")
            return self * (1 / Fraction(other))
        try:
            other = CycNum.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> CycNum:
        return CycNum.coerce(other) * self.inverse()

    def __pow__(self, e: int) -> CycNum:
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        out = CycNum.rational(1, self.m)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def galois(self, a: int) -> CycNum:
        m = self.m
        if m <= 2:
            return self
        if math.gcd(a, m) != 1:
            raise NotAUnit(f"gcd({a}, {m}) != 1")
        a %= m
        if a == 1:
            return self
        acc = [0] * m
        for j, c in enumerate(self.num):
            if c:
                acc[(a * j) % m] += c
        return CycNum(m, _reduce(m, acc), self.den)

    def conj(self) -> CycNum:
        return self.galois(self.m - 1) if self.m > 2 else self

    def abs2(self) -> CycNum:
        return self * self.conj()

    def is_real(self) -> bool:
        return self.m <= 2 or self.conj() == self

    # comparisons

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycNum):
            if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
                return self.is_rational() and Fraction(self.num[0], self.den) == other
            if isinstance(other, QuadraticSurd):
                other = other.to_cyc()
            else:
                return NotImplemented
        if self.m == other.m:
            return self.den == other.den and self.num == other.num
        x, y = CycNum._align(self, other)
        return x.den == y.den and x.num == y.num

    def __hash__(self) -> int:
        h = self._h
        if h is None:
            h = self._compute_hash()
            self._h = h
        return h

    def _compute_hash(self) -> int:
        if self.is_rational():
            return hash(Fraction(self.num[0], self.den))
        x = self
        if _HASH_L % x.m:
            d = x.conductor()
            x = x.demote(d)
            if _HASH_L % d:
                return hash(("cyc", d, x.num, x.den))
        if x.den % _HASH_P == 0:
            return hash(("cyc-bad-den", x.conductor()))
        pw = _hash_powers(x.m)
        s = sum(c * w for c, w in zip(x.num, pw)) % _HASH_P
        return hash((s * pow(x.den, -1, _HASH_P)) % _HASH_P)

    def _cmp(self, other) -> int:
        return real_sign(self - other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # numerics

    def to_complex(self) -> complex:
        m = self.m
        re = sum(c * math.cos(2 * math.pi * j / m) for j, c in enumerate(self.num))
        im = sum(c * math.sin(2 * math.pi * j / m) for j, c in enumerate(self.num))
        return complex(re / self.den, im / self.den)

    def approx(self) -> tuple[float, float, float]:
        """(re, im, err): float parts with an absolute error bound."""
        a = self._a
        if a is None:
            m = self.m
            table = _float_table(m)
            re = im = 0.0
            mag = 0.0
            for c, (cs, sn) in zip(self.num, table):
                if c:
                    cf = float(c)
                    re += cf * cs
                    im += cf * sn
                    mag += abs(cf)
            d = float(self.den)
            err = 1e-15 * (len(table) + 4) * (mag / d + 1e-300)
            a = (re / d, im / d, err)
            self._a = a
        return a

    def __float__(self) -> float:
        return self.to_complex().real

    def __complex__(self) -> complex:
        return self.to_complex()

    # serialization

    def to_json(self) -> dict:
        return {"m": self.m, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> CycNum:
        try:
            m = int(obj["m"])
            coeffs = [parse_rational(c) for c in obj["coeffs"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed CycNum: {obj!r}") from exc
        return cls.from_coeffs(m, coeffs)

    def __repr__(self) -> str:
        return f"CycNum({self.m}, [{', '.join(str(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        terms = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            if j == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(f"z{self.m}^{j}")
            else:
                terms.append(f"{c}*z{self.m}^{j}")
        return " + ".join(terms) if terms else "0"

    def __reduce__(self):
        return (CycNum, (self.m, self.num, self.den))


@lru_cache(maxsize=None)
def _float_table(m: int) -> tuple[tuple[float, float], ...]:
    return tuple(
        (math.cos(2 * math.pi * j / m), math.sin(2 * math.pi * j / m)) for j in range(totient(m))
    )


def _solve_rational(columns: list[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Solve sum x_i columns[i] = rhs exactly; None if inconsistent."""
    k = len(columns)
    rows = [[Fraction(col[r]) for col in columns] + [Fraction(rhs[r])] for r in range(len(rhs))]
    piv_cols = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(row[k] for row in rows[r:]):
        return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][k]
    return sol


# -- functional surface -----------------------------------------------------------


def cyc_make(m: int, monomials: Iterable[tuple[int, object]]) -> CycNum:
    terms = [(e, Fraction(c)) for e, c in monomials]
    den = 1
    for _, c in terms:
        den = _lcm(den, c.denominator)
    acc = [0] * m
    for e, c in terms:
        acc[e % m] += c.numerator * (den // c.denominator)
    return CycNum(m, _reduce(m, acc), den)


def cyc_add(x: CycNum, y: CycNum) -> CycNum:
    return x + y


def cyc_mul(x: CycNum, y: CycNum) -> CycNum:
    return x * y


def cyc_neg(x: CycNum) -> CycNum:
    return -x


def cyc_inv(x: CycNum) -> CycNum:
    return x.inverse()


def galois_apply(x: CycNum, a: int) -> CycNum:
    return x.galois(a)


def is_real(x: CycNum) -> bool:
    return x.is_real()


def promote_order(x: CycNum, m2: int) -> CycNum:
    return x.promote(m2)


def demote_order(x: CycNum, d: int) -> CycNum:
    return x.demote(d)


# -- signs --------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _trig_table(m: int, bits: int, kind: str) -> tuple[int, ...]:
    # round(cos or sin of 2 pi j / m times 2^bits); error below one unit
    fn = mpf_cos_pi if kind == "cos" else mpf_sin_pi
    out = []
    for j in range(totient(m)):
        v = fn(from_rational(2 * j, m, bits + 16), bits + 16)
        out.append(to_int(mpf_shift(v, bits), "n"))
    return tuple(out)


def _combo_sign(m: int, num: Sequence[int], kind: str) -> int:
    err = sum(abs(c) for c in num)
    cap = precision_cap_bits()
    bits = START_BITS
    while True:
        table = _trig_table(m, bits, kind)
        s = sum(c * a for c, a in zip(num, table) if c)
        if s > err:
            return 1
        if s < -err:
            return -1
        if bits >= cap:
            raise PrecisionExhausted(f"sign undecided at {bits} bits")
        bits = min(2 * bits, cap)


def real_sign(x: CycNum) -> int:
    """Sign of a real element."""
    if x.is_zero():
        return 0
    if x.is_rational():
        return 1 if x.num[0] > 0 else -1
    if not x.is_real():
        raise NotReal("real_sign of a non-real element")
    return _combo_sign(x.m, x.num, "cos")


def re_sign(x: CycNum) -> int:
    """Sign of the real part."""
    if x.is_rational():
        return (x.num[0] > 0) - (x.num[0] < 0)
    if (x + x.conj()).is_zero():
        return 0
    return _combo_sign(x.m, x.num, "cos")


def im_sign(x: CycNum) -> int:
    """Sign of the imaginary part."""
    if x.is_real():
        return 0
    return _combo_sign(x.m, x.num, "sin")


class RealInterval:
    """Closed dyadic enclosure [lo, hi] of a real number."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Fraction, hi: Fraction):
        if lo > hi:
            raise ValueError("empty interval")
        self.lo = lo
        self.hi = hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi

    def __repr__(self) -> str:
        return f"RealInterval({float(self.lo)!r}, {float(self.hi)!r})"


def real_interval(x: CycNum, bits: int = START_BITS, part: str = "re") -> RealInterval:
    """Enclosure of the real (or imaginary) part of x."""
    table = _trig_table(x.m, bits, "cos" if part == "re" else "sin")
    s = sum(c * a for c, a in zip(x.num, table))
    err = sum(abs(c) for c in x.num)
    scale = x.den << bits
    return RealInterval(Fraction(s - err, scale), Fraction(s + err, scale))


# -- quadratic subfields ------------------------------------------------------


def _squarefree(D: int) -> bool:
    if D < 1:
        return False
    p = 2
    while p * p <= D:
        if D % (p * p) == 0:
            return False
        p += 1
    return True


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def quadratic_conductor(D: int) -> int:
    """Smallest m with sqrt(D) in Q(zeta_m)."""
    if D == 1:
        return 1
    return D if D % 4 == 1 else 4 * D


@lru_cache(maxsize=None)
def sqrt_embedding(D: int) -> CycNum:
    """The positive square root of a squarefree D as a cyclotomic element."""
    if not _squarefree(D):
        raise ValueError(f"{D} is not squarefree")
    out = CycNum.rational(1)
    for p in _prime_factors(D):
        if p == 2:
            r = CycNum.zeta(8, 1) + CycNum.zeta(8, 7)
        else:
            g = cyc_make(p, [(a, _legendre(a, p)) for a in range(1, p)])
            r = g if p % 4 == 1 else g * CycNum.zeta(4, 3)
        out = out * r
    out = out.demote(quadratic_conductor(D)) if D > 1 else out
    if out * out != D:
        raise ArithmeticError("square root embedding failed")
    if real_sign(out) < 0:
        out = -out
    return out


def sqrt_in_field(D: int, m: int) -> bool:
    return m % quadratic_conductor(D) == 0


@lru_cache(maxsize=None)
def _sqrt_data(D: int, m: int) -> tuple[int, CycNum, int]:
    # working order, embedding there, and one unit sending sqrt(D) to -sqrt(D)
    L = _lcm(m, quadratic_conductor(D))
    s = sqrt_embedding(D).promote(L)
    flip = next(a for a in units(L) if s.galois(a) == -s)
    return L, s, flip


def to_quadratic(x: CycNum, D: int):
    """Write a real x as a + b*sqrt(D); None when x is not in Q(sqrt(D))."""
    if not x.is_real():
        raise NotReal("to_quadratic of a non-real element")
    if D == 1:
        return QuadraticSurd(x.to_fraction()) if x.is_rational() else None
    if not sqrt_in_field(D, x.m):
        raise SubfieldAbsent(f"sqrt({D}) is not in Q(zeta_{x.m})")
    if x.is_rational():
        return QuadraticSurd(x.to_fraction(), 0, D)
    L, s, flip = _sqrt_data(D, x.m)
    xl = x.promote(L)
    fixing = _fixing_group(D, L)
    for a in fixing:
        if xl.galois(a) != xl:
            return None
    y = xl.galois(flip)
    a = (xl + y) * Fraction(1, 2)
    b = (xl - y) * s * Fraction(1, 2 * D)
    return QuadraticSurd(a.to_fraction(), b.to_fraction(), D)


@lru_cache(maxsize=None)
def _fixing_group(D: int, L: int) -> tuple[int, ...]:
    s = sqrt_embedding(D).promote(L)
    return tuple(a for a in units(L) if a != 1 and s.galois(a) == s)


class QuadraticSurd:
    """Exact real number a + b*sqrt(D) with D squarefree."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a=0, b=0, D: int = 1):
        a, b = Fraction(a), Fraction(b)
        if not _squarefree(D):
            raise ValueError(f"{D} is not squarefree")
        if D == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            D = 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "D", D)

    def __setattr__(self, key, value):
        raise AttributeError("QuadraticSurd is immutable")

    def __reduce__(self):
        return (QuadraticSurd, (self.a, self.b, self.D))

    def _join(self, other) -> int:
        if self.D == 1:
            return other.D
        if other.D in (1, self.D):
            return self.D
        raise ValueError(f"mixed radicals sqrt({self.D}) and sqrt({other.D})")

    @staticmethod
    def coerce(x) -> QuadraticSurd:
        if isinstance(x, QuadraticSurd):
            return x
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return QuadraticSurd(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to QuadraticSurd")

    def __add__(self, other):
        try:
            o = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadraticSurd(self.a + o.a, self.b + o.b, self._join(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.D)

    def __sub__(self, other):
        try:
            o = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return QuadraticSurd.coerce(other) - self

    def __mul__(self, other):
        try:
            o = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        D = self._join(o)
        return QuadraticSurd(self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a, D)

    __rmul__ = __mul__

    def conjugate(self) -> QuadraticSurd:
        return QuadraticSurd(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.D

    def inverse(self) -> QuadraticSurd:
        n = self.norm()
        if n == 0:
            raise DivisionByZero("inverse of zero")
        return QuadraticSurd(self.a / n, -self.b / n, self.D)

    def __truediv__(self, other):
        try:
            o = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return QuadraticSurd.coerce(other) * self.inverse()

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa or sb
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with b^2 D
        d = self.a * self.a - self.b * self.b * self.D
        return sa if d > 0 else sb

    def __eq__(self, other):
        if isinstance(other, QuadraticSurd):
            return (self.a, self.b, self.D) == (other.a, other.b, other.D)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.b == 0 and self.a == other
        if isinstance(other, CycNum):
            return self.to_cyc() == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def is_rational(self) -> bool:
        return self.b == 0

    def to_cyc(self, m: int | None = None) -> CycNum:
        out = CycNum.rational(self.a)
        if self.b:
            out = out + sqrt_embedding(self.D) * self.b
        return out.promote(m) if m is not None else out

    def to_json(self) -> dict:
        return {"a": format_rational(self.a), "b": format_rational(self.b), "D": self.D}

    @classmethod
    def from_json(cls, obj: dict) -> QuadraticSurd:
        try:
            return cls(parse_rational(obj["a"]), parse_rational(obj["b"]), int(obj["D"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed QuadraticSurd: {obj!r}") from exc

    def __repr__(self) -> str:
        if self.b == 0:
            return f"QuadraticSurd({self.a})"
        return f"QuadraticSurd({self.a}, {self.b}, {self.D})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        rad = f"sqrt({self.D})"
        b = "" if self.b == 1 else ("-" if self.b == -1 else f"{self.b}*")
        if self.a == 0:
            return f"{b}{rad}"
        sign = "+" if self.b > 0 else "-"
        babs = abs(self.b)
        bstr = "" if babs == 1 else f"{babs}*"
        return f"{self.a} {sign} {bstr}{rad}"


def random_element(rng: random.Random, m: int, height: int = 5, real: bool = False) -> CycNum:
    """Random element with small coefficients, used by property tests."""
    phi = totient(m)
    coeffs = [Fraction(rng.randint(-height, height), rng.randint(1, height)) for _ in range(phi)]
    x = CycNum.from_coeffs(m, coeffs)
    return x + x.conj() if real else x


def all_small_elements(m: int, bound: int = 1) -> Iterable[CycNum]:
    for coeffs in product(range(-bound, bound + 1), repeat=totient(m)):
        yield CycNum(m, list(coeffs))
