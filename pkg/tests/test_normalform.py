import pytest

from ffcircle.ergodic import build_translation_system
from ffcircle.ffpoly import FieldParams, Poly, parse_poly
from ffcircle.normalform import (PolySpec, p_free_part, parse_specs, reduce_to_normal_form,
                                 verify_normal_form)

F2 = FieldParams(2)
F3 = FieldParams(3)


def one(field=F2):
    return Poly.one(field)


def test_p_free_part_examples():
    assert p_free_part(12, 2) == (3, 2)
    assert p_free_part(5, 5) == (1, 1)
    assert p_free_part(7, 3) == (7, 0)
    with pytest.raises(ValueError):
        p_free_part(0, 2)


def test_normal_form_examples():
    nf = reduce_to_normal_form([PolySpec(0, ((one(), 3), (one(), 6)))], F2)
    assert nf.exponents == (3,)
    assert [(c.action, c.coeff, c.p_power) for c in nf.classes[0].components] == [(0, one(), 1), (0, one(), 2)]
    nf = reduce_to_normal_form([PolySpec(0, ((one(), 2),))], F2)
    assert nf.exponents == (1,) and nf.classes[0].components[0].p_power == 2
    nf = reduce_to_normal_form([PolySpec(0, ((one(F3), 1),)), PolySpec(1, ((one(F3), 2),))], F3)
    assert nf.exponents == (1, 2)
    assert all(len(c.components) == 1 for c in nf.classes)


def test_counts_and_exponents_preserved():
    t = parse_poly(F2, "t")
    specs = [PolySpec(0, ((one(), 1), (t, 2), (one(), 12), (t, 24))), PolySpec(1, ((one(), 3), (t, 4)))]
    nf = reduce_to_normal_form(specs, F2)
    assert sum(len(c.components) for c in nf.classes) == 6
    for cls in nf.classes:
        assert cls.r % 2 == 1
    assert sorted(e for _, _, e in nf.terms()) == [1, 2, 3, 4, 12, 24]


def test_constants_split_off():
    c = parse_poly(F2, "t+1")
    nf = reduce_to_normal_form([PolySpec(0, ((c, 0), (one(), 3)))], F2)
    assert nf.constants == {0: c}
    with pytest.raises(ValueError):
        reduce_to_normal_form([PolySpec(0, ((c, 0),))], F2)
    assert reduce_to_normal_form([PolySpec(0, ((c, 0),))], F2, allow_empty=True).classes == []


def test_verify_examples():
    X = build_translation_system(parse_poly(F2, "t^3+t+1"))
    ident = [PolySpec(0, ((one(), 1),))]
    assert verify_normal_form(reduce_to_normal_form(ident, F2), ident, X).passed
    spec = [PolySpec(0, ((one(), 3), (one(), 6)))]
    rep = verify_normal_form(reduce_to_normal_form(spec, F2), spec, X, samples=50)
    assert rep.passed and rep.checked == 50
    const = [PolySpec(0, ((parse_poly(F2, "t"), 0),))]
    assert verify_normal_form(reduce_to_normal_form(const, F2, allow_empty=True), const, X).passed


def test_verify_two_actions_char_3():
    X = build_translation_system(parse_poly(F3, "t^2+1"), d=2)
    t = parse_poly(F3, "t")
    specs = [PolySpec(0, ((one(F3), 3), (t, 6), (one(F3), 9))), PolySpec(1, ((t, 2), (one(F3), 18)))]
    rep = verify_normal_form(reduce_to_normal_form(specs, F3), specs, X, samples=30)
    assert rep.passed and rep.additivity_checked > 0


def test_parse_specs():
    specs = parse_specs(F2, {"actions": 1, "polys": [[["1", 3], ["t+1", 6]]]})
    assert specs[0].terms == ((one(), 3), (parse_poly(F2, "t+1"), 6))
    with pytest.raises(ValueError):
        parse_specs(F2, {"actions": 2, "polys": [[["1", 3]]]})


def test_json_form():
    nf = reduce_to_normal_form([PolySpec(0, ((one(), 6),))], F2)
    assert nf.to_json() == {"classes": [{"r": 3, "components": [{"action": 0, "coeff": "1", "pPower": 2}]}],
                            "constants": {}}
