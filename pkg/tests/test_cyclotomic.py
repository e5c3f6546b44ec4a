import math
import random
from fractions import Fraction

import pytest

from cyctomo.cyclotomic import (
    CycNum,
    QuadraticSurd,
    cyc_add,
    cyc_inv,
    cyc_make,
    cyc_mul,
    cyc_neg,
    demote_order,
    galois_apply,
    is_real,
    promote_order,
    random_element,
    real_interval,
    real_sign,
    sqrt_embedding,
    to_quadratic,
)
from cyctomo.errors import DivisionByZero, NotADivisor, NotAUnit, NotReal, PrecisionExhausted, SubfieldAbsent
from cyctomo.solutions import Quadruple, eval_f

Z = CycNum.zeta


def test_make_reduces_powers():
    assert cyc_make(4, [(2, 1)]) == CycNum.rational(-1)
    assert cyc_make(5, [(k, 1) for k in range(5)]).is_zero()
    assert cyc_make(8, [(1, 1), (7, 1)]) == sqrt_embedding(2)
    assert cyc_make(12, [(6, 1)]) == CycNum.rational(-1)


def test_add_mul_neg():
    assert cyc_add(CycNum.rational(1), cyc_neg(Z(12, 6))) == CycNum.rational(2)
    assert cyc_mul(Z(8), Z(8, 7)) == CycNum.rational(1)
    prod = CycNum.rational(1)
    for k in range(1, 5):
        prod = prod * (1 - Z(5, k))
    assert prod == CycNum.rational(5)


def test_inverse():
    assert cyc_inv(CycNum.rational(2)) == CycNum.rational(Fraction(1, 2))
    assert cyc_inv(Z(8)) == Z(8, 7)
    x = 1 - Z(12)
    assert cyc_inv(x) * x == CycNum.rational(1)
    with pytest.raises(DivisionByZero):
        cyc_inv(CycNum.rational(0, 7))


def test_galois():
    assert galois_apply(Z(8), 3) == Z(8, 3)
    s2 = Z(8) + Z(8, 7)
    assert galois_apply(s2, 3) == -s2
    x = 2 * Z(12) - Z(12, 5) + Fraction(1, 3)
    assert galois_apply(x, 11) == x.conj()
    assert galois_apply(x, 1) == x
    with pytest.raises(NotAUnit):
        galois_apply(Z(12), 4)


def test_is_real_and_sign():
    assert is_real(Z(8) + Z(8, 7))
    assert not is_real(Z(8))
    assert real_sign(CycNum.rational(0, 8)) == 0
    assert real_sign(Z(8) + Z(8, 7)) == 1
    assert real_sign(eval_f(Quadruple(12, (6, 6, 4, 8))) - 1) == 1
    with pytest.raises(NotReal):
        real_sign(Z(8))


def test_sign_of_tiny_difference():
    # phi^20 + phi^-20 - L_20 = 0 exactly; phi^-20 alone is tiny but positive
    phi = (1 + sqrt_embedding(5)) / 2
    small = (phi - 1) ** 20
    assert real_sign(small) == 1
    assert real_sign(phi**20 + small - 15127) == 0
    assert real_sign(phi**20 - 15127) == -1


def test_precision_cap(monkeypatch):
    monkeypatch.setenv("DT_PRECISION_CAP_BITS", "64")
    phi = (1 + sqrt_embedding(5)) / 2
    with pytest.raises(PrecisionExhausted):
        real_sign((phi - 1) ** 60)


def test_to_quadratic():
    assert to_quadratic(Z(8) + Z(8, 7), 2) == QuadraticSurd(0, 1, 2)
    assert to_quadratic(eval_f(Quadruple(12, (6, 6, 4, 8))), 1) == QuadraticSurd(Fraction(4, 3))
    assert to_quadratic(eval_f(Quadruple(48, (6, 18, 4, 20))), 2) == QuadraticSurd(0, 1, 2)
    assert to_quadratic(Z(24, 2) + Z(24, 22), 2) is None
    with pytest.raises(SubfieldAbsent):
        to_quadratic(Z(5) + Z(5, 4), 3)


def test_promote_demote():
    assert promote_order(CycNum.rational(-1, 2), 4) == Z(4, 2)
    assert promote_order(Z(5), 60).num == Z(60, 12).num
    x = Z(5, 2) - 3
    assert demote_order(promote_order(x, 60), 5) == x
    with pytest.raises(NotADivisor):
        promote_order(Z(5), 12)


def test_field_axioms_random():
    rng = random.Random(7)
    for m in (5, 8, 12, 15):
        for _ in range(20):
            x, y, z = (random_element(rng, m) for _ in range(3))
            assert (x * y) * z == x * (y * z)
            assert x * (y + z) == x * y + x * z
            if not x.is_zero():
                assert x * x.inverse() == 1
            assert galois_apply(galois_apply(x, m - 1), m - 1) == x
            a = next(a for a in (7, 11, 13) if math.gcd(a, m) == 1)
            assert galois_apply(x * y, a) == galois_apply(x, a) * galois_apply(y, a)
            assert galois_apply(x + y, a) == galois_apply(x, a) + galois_apply(y, a)


def test_to_quadratic_roundtrip():
    rng = random.Random(3)
    for D, m in ((2, 8), (3, 12), (5, 5)):
        for _ in range(10):
            q = QuadraticSurd(Fraction(rng.randint(-9, 9), rng.randint(1, 5)), Fraction(rng.randint(-9, 9), 7), D)
            x = q.to_cyc(m)
            assert to_quadratic(x, D) == q
            assert to_quadratic(x, D).to_cyc(m) == x


def test_sign_agrees_with_intervals():
    rng = random.Random(11)
    seen = 0
    for _ in range(1000):
        m = rng.choice((5, 7, 8, 12, 15, 24))
        x = random_element(rng, m, height=4, real=True)
        if x.is_zero():
            continue
        s = real_sign(x)
        assert s != 0
        for bits in (64, 128, 256):
            iv = real_interval(x, bits)
            if iv.lo > 0 or iv.hi < 0:
                assert (1 if iv.lo > 0 else -1) == s
                seen += 1
    assert seen > 2500


def test_json_roundtrip():
    x = Fraction(2, 3) * Z(12) - Z(12, 3)
    obj = x.to_json()
    assert obj["m"] == 12 and all(isinstance(c, str) for c in obj["coeffs"])
    assert CycNum.from_json(obj) == x
    q = QuadraticSurd(Fraction(1, 2), Fraction(-3, 4), 5)
    assert QuadraticSurd.from_json(q.to_json()) == q


def test_hash_consistent_across_orders():
    x = Z(5, 2)
    assert hash(x) == hash(x.promote(60))
    assert x == x.promote(60)
