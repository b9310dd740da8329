import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ffcircle.config import count_limit
from ffcircle.errors import CountLimitError, FieldMismatchError
from ffcircle.ffpoly import (NEG_INF, FieldParams, Poly, enumerate_degree_lt, enumerate_monic,
                             field_trace, gcd_monic, lcm_monic, parse_poly)

F2 = FieldParams(2)
F3 = FieldParams(3)
F4 = FieldParams(2, 2, (1, 1, 1))


def P(field, text):
    return parse_poly(field, text)


def polys(field, max_deg=6):
    return st.lists(st.integers(0, field.q - 1), max_size=max_deg + 1).map(lambda c: Poly(field, c))


def test_square_in_char_2():
    assert P(F2, "t+1") * P(F2, "t+1") == P(F2, "t^2+1")


def test_long_division_by_hand():
    # (t+1)(t^2+t+1) = t^3+1 over F_2, so t^3+t leaves t+1
    q, r = divmod(P(F2, "t^3+t"), P(F2, "t^2+t+1"))
    assert (q, r) == (P(F2, "t+1"), P(F2, "t+1"))
    q, r = divmod(P(F2, "t^3"), P(F2, "t^2+t+1"))
    assert (q, r) == (P(F2, "t+1"), P(F2, "1"))


def test_zero_is_additive_identity():
    a = P(F3, "2t^2+t+1")
    assert a + Poly(F3) == a


def test_zero_degree_is_sentinel():
    assert Poly(F2).deg == NEG_INF
    assert Poly(F2, [0, 0]).is_zero()


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        divmod(P(F2, "t"), Poly(F2))


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        P(F2, "t") + P(F3, "t")


@pytest.mark.parametrize("items,expected", [
    (["t^2+t", "t"], "t"),
    (["t^2+t+1", "1"], "1"),
    (["0", "t+1"], "t+1"),
])
def test_gcd_examples(items, expected):
    assert gcd_monic([P(F2, x) for x in items]) == P(F2, expected)


def test_gcd_all_zero_rejected():
    with pytest.raises(ValueError):
        gcd_monic([Poly(F2), Poly(F2)])


def test_lcm_examples():
    assert lcm_monic([P(F2, "t"), P(F2, "t")]) == P(F2, "t")
    assert lcm_monic([P(F2, "t"), P(F2, "t+1")]) == P(F2, "t^2+t")
    a = P(F3, "2t+1")
    assert lcm_monic([a, Poly.one(F3)]) == a.monic()
    with pytest.raises(ValueError):
        lcm_monic([Poly(F2), P(F2, "t")])


def test_enumerations():
    assert enumerate_degree_lt(F2, 0) == [Poly(F2)]
    assert enumerate_degree_lt(F2, 2) == [P(F2, x) for x in ("0", "1", "t", "t+1")]
    assert len(enumerate_degree_lt(F3, 1)) == 3
    assert enumerate_monic(F2, 0) == [Poly.one(F2)]
    assert enumerate_monic(F2, 1) == [P(F2, "t"), P(F2, "t+1")]
    assert len(enumerate_monic(F3, 2)) == 9
    assert all(h.is_monic() and h.deg == 2 for h in enumerate_monic(F3, 2))


def test_enumeration_distinct_and_bounded():
    for field in (F2, F3, F4):
        items = enumerate_degree_lt(field, 3)
        assert len(set(items)) == field.q**3
        assert all(x.deg < 3 for x in items)


def test_count_limit_is_an_error():
    with count_limit(10):
        with pytest.raises(CountLimitError):
            enumerate_degree_lt(F2, 4)


def test_trace_examples():
    assert all(field_trace(F3, x) == x for x in range(3))
    assert field_trace(F4, 0) == 0
    assert field_trace(F4, 2) == 1  # x + x^2 = 1 mod x^2+x+1


@pytest.mark.parametrize("field", [F4, FieldParams(3, 2, (2, 2, 1)), FieldParams(2, 3, (1, 1, 0, 1))])
def test_trace_additive_exhaustive(field):
    for x, y in itertools.product(range(field.q), repeat=2):
        assert field.trace(field.add(x, y)) == (field.trace(x) + field.trace(y)) % field.p


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError):
        FieldParams(2, 2, (1, 0, 1))
    with pytest.raises(ValueError):
        FieldParams(4)


def test_field_axioms_small():
    for field in (F4, FieldParams(5)):
        for x in range(1, field.q):
            assert field.mul(x, field.inv(x)) == 1
        for x, y, z in itertools.product(range(field.q), repeat=3):
            assert field.mul(x, field.add(y, z)) == field.add(field.mul(x, y), field.mul(x, z))


def test_parse_and_format_round_trip():
    for text in ("t^3+t+1", "2t^2+1", "0", "t"):
        assert str(P(F3, text)) == text


def test_json_round_trip():
    a = P(F3, "2t^4+t+1")
    assert Poly.from_json(F3, a.to_json()) == a


def test_index_is_canonical_order():
    for i, f in enumerate(enumerate_degree_lt(F3, 3)):
        assert f.index == i
        assert Poly.from_index(F3, i) == f


@settings(max_examples=60, deadline=None)
@given(polys(F3), polys(F3), polys(F3))
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a - a == Poly(F3)


@settings(max_examples=60, deadline=None)
@given(polys(F4, 7), polys(F4, 4))
def test_divmod_reconstruction(a, b):
    if b.is_zero():
        return
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.deg < b.deg


@settings(max_examples=40, deadline=None)
@given(polys(F2, 6), polys(F2, 6))
def test_gcd_properties(a, b):
    if a.is_zero() and b.is_zero():
        return
    g = gcd_monic([a, b])
    assert g.is_monic()
    assert (a % g).is_zero() and (b % g).is_zero()
    # any common divisor divides g: test against every monic divisor of small degree
    for d in range(1, 3):
        for h in enumerate_monic(F2, d):
            if (a % h).is_zero() and (b % h).is_zero():
                assert (g % h).is_zero()
