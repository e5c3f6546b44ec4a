import random
from fractions import Fraction

import pytest

from cyctomo.cyclotomic import CycNum, real_sign
from cyctomo.geometry import area2
from cyctomo.errors import NoInternalSpace, OrderMismatch, SearchExhausted, WindowDegenerate
from cyctomo.modelset import (
    LatticePoint,
    ModelSetSpec,
    Patch,
    find_homothety,
    generate_patch,
    in_window,
    membership,
    parse_window,
    pv_unit,
    regular_window,
    star_map,
    verify_delone,
)

Z = CycNum.zeta


def lp(n, *c):
    return LatticePoint(n, c)


def test_star_map_examples():
    s8 = ModelSetSpec.default(8)
    assert star_map(lp(8, 0, 1, 0, 0), s8) == Z(8, 3)
    assert star_map(lp(4, 3, -2), ModelSetSpec.default(4)).is_zero()
    s5 = ModelSetSpec.default(5)
    z = LatticePoint.from_cyc(Z(5) + Z(5, 4), 5)
    assert star_map(z, s5) == Z(5, 2) + Z(5, 3)
    with pytest.raises(OrderMismatch):
        star_map(lp(4, 1, 0), s8)


def test_star_map_is_a_ring_map():
    rng = random.Random(5)
    for n in (5, 8, 12):
        spec = ModelSetSpec.default(n)
        for _ in range(20):
            x = lp(n, *(rng.randint(-4, 4) for _ in range(4)))
            y = lp(n, *(rng.randint(-4, 4) for _ in range(4)))
            xy = LatticePoint.from_cyc(x.embed() * y.embed(), n)
            assert star_map(x + y, spec) == star_map(x, spec) + star_map(y, spec)
            assert star_map(xy, spec) == star_map(x, spec) * star_map(y, spec)


def test_membership_examples():
    for n in (5, 8, 12):
        spec = ModelSetSpec.default(n)
        assert membership(lp(n, 0, 0, 0, 0), spec)
    # a window vertex is not interior
    spec = ModelSetSpec(8, 3, (Z(8, 0) * 2, Z(8, 2) * 2, Z(8, 4) * 2, Z(8, 6) * 2))
    pre = LatticePoint.from_cyc(Z(8, 0).galois(3) * 2, 8)
    assert star_map(pre, spec) == 2
    assert not membership(pre, spec)
    assert membership(lp(3, 7, -9), ModelSetSpec.default(3))


def test_spec_validation():
    with pytest.raises(ValueError):
        ModelSetSpec(8, 1, regular_window(8, 8))
    with pytest.raises(ValueError):
        ModelSetSpec(8, 2, regular_window(8, 8))
    with pytest.raises(WindowDegenerate):
        ModelSetSpec(8, 3, (Z(8, 0), Z(8, 4), CycNum.rational(0, 8)))
    cw = tuple(reversed(regular_window(8, 8)))
    fixed = ModelSetSpec(8, 3, cw).window
    assert set(fixed) == set(cw) and real_sign(area2(fixed)) == 1
    assert parse_window("octagon:1", 8) == regular_window(8, 8, 1)


def test_spec_json_roundtrip():
    spec = ModelSetSpec(12, 5, regular_window(12, 12, 2), Fraction(1, 7) * Z(12))
    assert ModelSetSpec.from_json(spec.to_json()) == spec


def test_square_patch():
    patch = generate_patch(ModelSetSpec.default(4), Fraction(3, 2))
    got = {p.coeffs for p in patch.points}
    assert got == {(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)}


@pytest.mark.parametrize("n", [3, 4])
def test_lattice_patch_matches_direct_loop(n):
    R = Fraction(7, 2)
    patch = generate_patch(ModelSetSpec.default(n), R)
    direct = set()
    for a in range(-8, 9):
        for b in range(-8, 9):
            x, y, _ = CycNum(n, [a, b]).approx()
            if x * x + y * y <= R * R - 1e-9:
                direct.add((a, b))
    assert {p.coeffs for p in patch.points} == direct


def test_octagonal_patch_is_symmetric():
    spec = ModelSetSpec.default(8)
    patch = generate_patch(spec, 4)
    pts = set(patch.cycs())
    assert len(pts) == 25
    assert {p * Z(8) for p in pts} == pts
    for p in patch.points:
        assert membership(p, spec)


def test_window_monotone():
    small = generate_patch(ModelSetSpec(12, 5, regular_window(12, 12, 1)), 5)
    big = generate_patch(ModelSetSpec(12, 5, regular_window(12, 12, 2)), 5)
    assert set(small.cycs()) < set(big.cycs())


def test_patch_json_roundtrip():
    patch = generate_patch(ModelSetSpec.default(5), 3)
    obj = patch.to_json()
    assert obj["n"] == 5 and isinstance(obj["points"][0], list)
    assert Patch.from_json(obj).points == patch.points


def test_differences_are_ring_elements():
    patch = generate_patch(ModelSetSpec.default(12), 3)
    pts = patch.points
    for a in pts[:10]:
        for b in pts[:10]:
            assert (a - b).embed().den == 1


@pytest.mark.parametrize(
    "n, expect",
    [(5, (1 + (Z(5) + Z(5, 4)))), (8, 1 + Z(8) + Z(8, 7)), (12, 2 + Z(12) + Z(12, 11))],
)
def test_pv_unit(n, expect):
    lam = pv_unit(n)
    assert lam == expect
    star = lam.galois({5: 2, 8: 3, 12: 5}[n])
    assert real_sign(lam - 1) == 1
    assert real_sign(1 - star.abs2()) == 1


def test_pv_unit_lattice():
    with pytest.raises(NoInternalSpace):
        pv_unit(4)


def test_find_homothety_trivial_and_random():
    spec = ModelSetSpec.default(8)
    h = find_homothety([CycNum.rational(0, 8)], spec)
    assert h.k == 0 and h.scale == 1 and membership(h.apply(CycNum.rational(0, 8)), spec)
    rng = random.Random(2)
    F = [CycNum.from_coeffs(8, [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(4)]) for _ in range(6)]
    h = find_homothety(F, spec)
    assert all(membership(h.apply(f), spec) for f in F)


def test_find_homothety_exhausts():
    spec = ModelSetSpec.default(12)
    F = [CycNum.from_coeffs(12, [100, 0, 0, 0]), CycNum.from_coeffs(12, [0, 0, 0, 100])]
    with pytest.raises(SearchExhausted):
        find_homothety(F, spec, max_power=1)


def test_delone_audit():
    sq = generate_patch(ModelSetSpec.default(4), 6)
    assert verify_delone(sq, Fraction(1, 2), 1).passed
    ab = [verify_delone(generate_patch(ModelSetSpec.default(8), R), Fraction(1, 10), 2) for R in (5, 7)]
    assert ab[0].min_distance > 0 and abs(ab[0].min_distance - ab[1].min_distance) < 1e-9
    dup = Patch(sq.spec, sq.radius, sq.points + [sq.points[0]])
    assert not verify_delone(dup, Fraction(1, 2), 1).passed


def test_in_window_strict():
    spec = ModelSetSpec.default(12)
    assert in_window(CycNum.rational(0, 12), spec)
    assert not in_window(spec.window[0], spec)
