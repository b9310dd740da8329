import itertools

import pytest

from ffcircle.errors import PrecisionError
from ffcircle.ffpoly import FieldParams, Poly, parse_poly
from ffcircle.torus import (RationalTail, TailSeries, character, expand_rational, mul_poly_tail, ord_of,
                            parse_tail, random_tail, residue, scalar_mul, tail_add)

F2 = FieldParams(2)
F3 = FieldParams(3)
F4 = FieldParams(2, 2, (1, 1, 1))


def P(field, text):
    return parse_poly(field, text)


def test_expand_examples():
    assert expand_rational(P(F2, "1"), P(F2, "t"), 4).digits == (1, 0, 0, 0)
    assert expand_rational(P(F2, "1"), P(F2, "t+1"), 4).digits == (1, 1, 1, 1)
    assert expand_rational(Poly(F2), P(F2, "t^2+1"), 5).is_zero()


def test_expand_drops_integral_part():
    # (t^2+1)/t = t + 1/t
    assert expand_rational(P(F2, "t^2+1"), P(F2, "t"), 3).digits == (1, 0, 0)


def test_expand_refinement_consistent():
    for a, h in [("t+1", "t^3+t+1"), ("2t", "t^2+1")]:
        field = F3 if "2" in a else F2
        long = expand_rational(P(field, a), P(field, h), 20)
        for n in range(1, 20):
            assert expand_rational(P(field, a), P(field, h), n).digits == long.digits[:n]


def test_expand_matches_division():
    # h * (a/h) = a is a polynomial, so the fractional part vanishes and the integral part is a
    h = P(F3, "t^2+2t+2")
    a = P(F3, "t+2")
    integral, frac = mul_poly_tail(h, expand_rational(a, h, 12))
    assert frac.is_zero()
    assert integral == a


def test_ord_examples():
    assert ord_of(parse_tail(F2, "t^-3")) == -3
    z = TailSeries(F2, 5)
    o = ord_of(z)
    assert o == float("-inf") and o.precision == 5
    assert ord_of(parse_tail(F2, "t^-1+t^-4")) == -1


def test_residue_examples():
    assert residue(parse_tail(F2, "t^-1")) == 1
    assert residue(parse_tail(F2, "t^-2")) == 0
    assert residue(expand_rational(P(F2, "1"), P(F2, "t+1"), 3)) == 1
    assert residue(RationalTail(P(F2, "1"), P(F2, "t+1"))) == 1


def test_character_examples():
    assert character(TailSeries(F2, 3)).exponent == 0
    e = character(parse_tail(F2, "t^-1"))
    assert e.exponent == 1 and e.value == -1
    assert character(parse_tail(F3, "2t^-1")).exponent == 2


def test_character_multiplicative_exhaustive():
    for field in (F2, F3, F4):
        for a, b in itertools.product(itertools.product(range(field.q), repeat=2), repeat=2):
            x, y = TailSeries(field, 2, a), TailSeries(field, 2, b)
            assert character(x + y) == character(x) * character(y)


def test_scalar_mul_examples():
    a = parse_tail(F2, "t^-1+t^-3")
    assert scalar_mul(Poly.one(F2), a) == a
    assert scalar_mul(P(F2, "t"), parse_tail(F2, "t^-2")).digits[0] == 1
    out = scalar_mul(P(F2, "t+1"), parse_tail(F2, "t^-1+t^-3", 3))
    assert out.precision == 2 and out.digits == (1, 1)


def test_scalar_mul_needs_precision():
    with pytest.raises(PrecisionError):
        scalar_mul(P(F2, "t^3"), parse_tail(F2, "t^-1", 3))


def test_scalar_mul_distributes(rng):
    for _ in range(50):
        f = Poly.from_index(F3, int(rng.integers(27)))
        a, b = random_tail(F3, 10, rng), random_tail(F3, 8, rng)
        assert scalar_mul(f, tail_add(a, b)) == tail_add(scalar_mul(f, a), scalar_mul(f, b))


def test_tail_add_examples():
    a = parse_tail(F2, "t^-1+t^-2", 4)
    assert a + TailSeries(F2, 4) == a
    assert (parse_tail(F2, "t^-1") + parse_tail(F2, "t^-1")).is_zero()
    assert (TailSeries(F2, 3) + TailSeries(F2, 5)).precision == 3


def test_parse_round_trip_and_json():
    a = parse_tail(F3, "t^-1+2t^-3", 6)
    assert TailSeries.from_json(F3, a.to_json()) == a
    assert a.to_json() == {"precision": 6, "terms": [[-1, 1], [-3, 2]]}


def test_rational_tail_exact_arithmetic():
    x = RationalTail(P(F2, "1"), P(F2, "t"))
    y = RationalTail(P(F2, "1"), P(F2, "t+1"))
    s = x + y  # 1/t + 1/(t+1) = 1/(t^2+t)
    assert s == RationalTail(P(F2, "1"), P(F2, "t^2+t"))
    assert (x - x).ord() == float("-inf")


def test_random_tail_exact_order(rng):
    for o in range(-1, -10, -1):
        assert ord_of(random_tail(F3, 12, rng, exact_ord=o)) == o
