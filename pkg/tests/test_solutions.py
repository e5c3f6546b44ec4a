import json
from fractions import Fraction

import pytest

from cyctomo.cyclotomic import QuadraticSurd, real_sign
from cyctomo.errors import MalformedReference, OrderTooSmall, SubfieldAbsent, UnsupportedField
from cyctomo.solutions import (
    Family,
    Quadruple,
    classify_family,
    enum_quadruples,
    eval_f,
    eval_f_direct,
    load_reference,
    load_value_sets,
    obstruction_set,
    parse_reference,
    reconcile_with_reference,
    records_to_csv,
    solve_in_field,
)

# the eleven sporadic rational solutions at m = 12 with their values
RATIONAL_SPORADIC = {
    (6, 6, 4, 8): Fraction(4, 3), (6, 6, 2, 10): 4, (4, 8, 3, 9): Fraction(3, 2), (4, 8, 2, 10): 3,
    (4, 4, 2, 6): Fraction(3, 2), (8, 8, 6, 10): Fraction(3, 2), (4, 4, 1, 7): 3, (8, 8, 5, 11): 3,
    (3, 9, 2, 10): 2, (3, 3, 1, 5): 2, (9, 9, 7, 11): 2,
}


def Q(m, *k):
    return Quadruple(m, k)


def test_enum_small():
    assert list(enum_quadruples(4)) == [Q(4, 2, 2, 1, 3)]
    assert list(enum_quadruples(5)) == [Q(5, 2, 2, 1, 3), Q(5, 2, 3, 1, 4), Q(5, 3, 3, 2, 4)]
    for q in enum_quadruples(13):
        k1, k2, k3, k4 = q.k
        assert k1 + k2 == k3 + k4 and k3 < k1 <= k2 < k4 <= 12
    with pytest.raises(OrderTooSmall):
        list(enum_quadruples(3))


def test_invalid_quadruple():
    with pytest.raises(ValueError):
        Q(12, 1, 2, 3, 4)


@pytest.mark.parametrize(
    "q, value",
    [(Q(12, 6, 6, 4, 8), Fraction(4, 3)), (Q(12, 3, 9, 2, 10), 2), (Q(4, 2, 2, 1, 3), 2)],
)
def test_eval_f_examples(q, value):
    assert eval_f(q) == value
    assert eval_f_direct(q) == value


def test_classify_family():
    assert classify_family(Q(4, 2, 2, 1, 3)) == Family("XII", 2, 1)
    assert classify_family(Q(60, 12, 30, 6, 36)) == Family("XII", 5, 1)
    assert classify_family(Q(12, 4, 8, 3, 9)) is None


def test_families_evaluate_to_two():
    for m in range(4, 25, 2):
        for q in enum_quadruples(m):
            if classify_family(q) is not None:
                assert eval_f(q) == 2


def test_rational_case():
    recs = solve_in_field(12, 1)
    spor = {r.quadruple.k: r.value for r in recs if r.sporadic}
    assert spor == {k: QuadraticSurd(v) for k, v in RATIONAL_SPORADIC.items()}
    assert {r.value for r in recs} == {QuadraticSurd(v) for v in (Fraction(4, 3), Fraction(3, 2), 2, 3, 4)}


def test_table_sizes():
    assert sum(r.sporadic for r in solve_in_field(60, 5)) == 181
    spor48 = [r for r in solve_in_field(48, 2) if r.sporadic]
    assert len(spor48) == 82 and Q(48, 6, 18, 4, 20) in {r.quadruple for r in spor48}


def test_subfield_absent():
    with pytest.raises(SubfieldAbsent):
        solve_in_field(12, 5)


def test_obstruction_examples():
    assert set(obstruction_set(4).values) == {QuadraticSurd(v) for v in (Fraction(4, 3), Fraction(3, 2), 2, 3, 4)}
    o8 = obstruction_set(8)
    assert len(o8) == 17
    for v in (QuadraticSurd(0, 1, 2), QuadraticSurd(1, 1, 2), QuadraticSurd(4, 3, 2)):
        assert v in o8
    o5 = obstruction_set(5)
    assert len(o5) == 33
    assert QuadraticSurd(Fraction(1, 2), Fraction(1, 2), 5) in o5
    assert QuadraticSurd(6, 2, 5) in o5
    with pytest.raises(UnsupportedField):
        obstruction_set(7)


def test_obstruction_general_field():
    o7 = obstruction_set(7, general=True)
    assert o7.m_used == 84 and len(o7) >= 5
    assert all(real_sign(v - 1) == 1 for v in o7.values)


def test_printed_value_sets_match_where_complete():
    printed = load_value_sets()
    for n in (4, 5, 8):
        assert printed[n] == set(obstruction_set(n).values)


def test_scaling_invariance():
    for m in range(4, 11):
        for q in enum_quadruples(m):
            v = eval_f(q)
            for t in (2, 3):
                assert eval_f(q.scaled(t)) == v


def test_monotone_inclusion():
    c12 = {r.value for r in solve_in_field(12, 1)}
    c24 = {r.value for r in solve_in_field(24, 1)}
    assert c12 <= c24


def test_reconcile_tables_a_b():
    for name, (m, D) in {"a": (60, 5), "b": (48, 2)}.items():
        rep = reconcile_with_reference(solve_in_field(m, D), load_reference(name))
        assert rep.empty, rep.lines()


def test_reconcile_reports_injected_fault():
    ref = load_reference("a")
    raw = {"table": "a", "m": ref.m, "D": ref.D,
           "entries": [{"entry": e, "d": list(q.k)} for e, q in ref.entries[1:]]}
    rep = reconcile_with_reference(solve_in_field(60, 5), parse_reference(raw))
    assert rep.missing_from_reference == [ref.entries[0][1]]
    assert not rep.missing_from_computation


def test_reconcile_flags_bad_entries():
    raw = {"table": "x", "m": 12, "D": 1, "entries": [
        {"entry": 1, "d": [6, 6, 4, 8]}, {"entry": 2, "d": [6, 6, 4, 8]},
        {"entry": 3, "d": [2, 6, 1, 7]}, {"entry": 4, "d": [2, 3, 1, 4]}, {"entry": 5, "d": [4, 6, 3, 7]},
    ]}
    rep = reconcile_with_reference(solve_in_field(12, 1), parse_reference(raw))
    assert [e for e, _ in rep.duplicate_entries] == [2]
    assert [e for e, _ in rep.family_entries] == [3]
    assert [e for e, _ in rep.missing_from_computation] == [4, 5]


def test_malformed_reference():
    with pytest.raises(MalformedReference):
        parse_reference({"m": 12, "D": 1, "entries": [{"entry": 1, "d": [1, 2]}]})
    with pytest.raises(MalformedReference):
        load_reference("z")


def test_record_json_and_csv():
    recs = solve_in_field(60, 5)
    r = next(r for r in recs if r.quadruple.k == (12, 36, 6, 42))
    obj = json.loads(json.dumps(r.to_json()))
    assert obj["m"] == 60 and obj["d"] == [12, 36, 6, 42] and obj["family"] is None
    assert obj["primitive"] is False and set(obj["q"]) == {"a", "b", "D"}
    assert type(r).from_json(obj) == r
    csv = records_to_csv(recs[:3])
    assert csv.splitlines()[0].startswith("m,k1,k2,k3,k4")
    assert len(csv.splitlines()) == 4


def test_parallel_matches_serial():
    a = solve_in_field(48, 2, workers=1)
    b = solve_in_field(48, 2, workers=4)
    assert a == b
