from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ffcircle.config import NONCONFORMING, Overrides
from ffcircle.errors import RangeError
from ffcircle.expsum import ExponentSystem
from ffcircle.ffpoly import FieldParams, Poly, enumerate_degree_lt, parse_poly
from ffcircle.functionals import (CutPoints, _in_subgroup, dyadic_maximal_check, hl_maximal, maximal_sup, oscillation,
                                  oscillation_norm, pointwise_oscillation, translates_disjoint,
                                  vitali_select, weak_11_check)
from ffcircle.operators import GridFunction, OperatorParams, apply_D, apply_L, random_grid

F2 = FieldParams(2)
F3 = FieldParams(3)
K1 = ExponentSystem((1,), F2)
RELAX = Overrides(relax_ranges=True)

seqs = st.lists(st.floats(-10, 10, allow_nan=False), min_size=6, max_size=6)


def test_oscillation_examples():
    assert oscillation([3, 3, 3, 3], (1, 2, 4)) == 0
    assert oscillation([1, 0, 0], (1, 3)) == 1
    with pytest.raises(ValueError):
        CutPoints((2, 2))
    with pytest.raises(RangeError):
        oscillation([1, 2], (1, 3))


@settings(max_examples=80, deadline=None)
@given(seqs, seqs, st.sets(st.integers(1, 6), min_size=2))
def test_oscillation_subadditive(a, b, cuts):
    cuts = sorted(cuts)
    s = [x + y for x, y in zip(a, b)]
    assert oscillation(s, cuts) <= oscillation(a, cuts) + oscillation(b, cuts) + 1e-9


@settings(max_examples=50, deadline=None)
@given(seqs, st.floats(-5, 5, allow_nan=False))
def test_oscillation_homogeneous_and_bounded(a, c):
    cuts = [1, 6]
    assert abs(oscillation([c * x for x in a], cuts) - abs(c) * oscillation(a, cuts)) < 1e-6
    assert oscillation(a, cuts) <= 2 * max(abs(x) for x in a) + 1e-9


def test_grid_oscillation_examples(rng):
    g = random_grid(F2, (3,), rng)
    assert oscillation_norm([g, g, g], (1, 3)) == 0
    seq = [GridFunction.delta(F2, (2,)) * v for v in (1, 0, 0)]
    assert pointwise_oscillation(seq, (1, 3)).values[0] == 1
    assert oscillation_norm(seq, (1, 3)) == 1
    assert abs(oscillation_norm([x * 3 for x in seq], (1, 3)) - 3) < 1e-12


def test_maximal_sup_examples(rng):
    g = random_grid(F2, (3,), rng)
    assert np.allclose(maximal_sup([g]).values, np.abs(g.values))
    a = GridFunction.delta(F2, (2,)) * 2
    b = GridFunction.delta(F2, (2,), [parse_poly(F2, "t")]) * 5
    m = maximal_sup([a, b])
    assert m.values[0] == 2 and m.values[2] == 5
    seq = [random_grid(F2, (3,), rng) for _ in range(4)]
    m = maximal_sup(seq)
    assert all(np.all(np.abs(x.values) <= m.values.real + 1e-12) for x in seq)


def test_hl_delta_closed_form():
    res = hl_maximal(GridFunction.delta(F2, (1,)), OperatorParams(K1, 0), n_max=8)
    for x in enumerate_degree_lt(F2, 8):
        want = 2.0 ** -max(1, x.deg + 1 if not x.is_zero() else 1)
        assert res.values.values[x.index] == pytest.approx(want)


def test_hl_constant_and_zero():
    F = GridFunction(F2, (8,), np.full(256, 3.0, dtype=complex))
    res = hl_maximal(F, OperatorParams(K1, 0), n_max=8)
    assert res.values.values[0] == pytest.approx(3)
    assert hl_maximal(GridFunction.zeros(F2, (3,)), OperatorParams(K1, 0)).values.norm() == 0


def test_hl_matches_direct_supremum(rng):
    params = OperatorParams(K1, 1, overrides=RELAX)
    F = random_grid(F2, (4,), rng, nonnegative=True)
    res = hl_maximal(F, params, n_max=9)
    direct = np.zeros(res.values.values.shape)
    for n in range(res.n_min, res.n_max + 1):
        out = apply_L(F.abs(), params.at(n)).embed(res.values.box)
        direct = np.maximum(direct, out.values.real)
    assert np.allclose(res.values.values.real, direct)
    assert res.stamp == NONCONFORMING


def test_hl_refuses_below_range():
    with pytest.raises(RangeError):
        hl_maximal(GridFunction.delta(F2, (2,)), OperatorParams(K1, 1), n_min=4)


def test_weak_examples():
    F = GridFunction.delta(F2, (1,))
    rep = weak_11_check(F, OperatorParams(K1, 0), [Fraction(1, 4)])
    assert rep.rows[0].count == 2 and rep.rows[0].bound == 4 and rep.passed and rep.exact
    rep = weak_11_check(F, OperatorParams(K1, 0), [Fraction(2)])
    assert rep.rows[0].count == 0
    with pytest.raises(ValueError):
        weak_11_check(F, OperatorParams(K1, 0), [0])


def test_weak_random_exhaustive(rng):
    for params in (OperatorParams(K1, 0), OperatorParams(K1, 1, overrides=RELAX),
                   OperatorParams(ExponentSystem((1,), F3), 0)):
        for _ in range(10):
            F = random_grid(params.field, (3,), rng, density=0.4, integer=True)
            if F.l1() == 0:
                continue
            alphas = [Fraction(j, 5) for j in range(1, 12)]
            assert weak_11_check(F, params, alphas).passed


def test_weak_report_forms():
    rep = weak_11_check(GridFunction.delta(F2, (1,)), OperatorParams(K1, 0), [Fraction(1, 4)])
    assert rep.to_csv().splitlines()[0] == "alpha,count,bound"
    assert rep.to_json()["pass"] is True


def test_vitali_examples():
    params = OperatorParams(K1, 0)
    x0 = (parse_poly(F2, "t"),)
    assert vitali_select([(x0, 3)], params) == [(x0, 3)]
    # t+1 lies in the translate 0 + {deg u < 3}
    nested = vitali_select([((Poly(F2),), 3), ((parse_poly(F2, "t+1"),), 1)], params)
    assert nested == [((Poly(F2),), 3)]
    apart = [((parse_poly(F2, "t^4"),), 2), ((Poly(F2),), 2)]
    assert len(vitali_select(apart, params)) == 2


def test_vitali_disjoint_and_covering(rng):
    params = OperatorParams(K1, 1, overrides=RELAX)
    for _ in range(10):
        reqs = [((Poly.from_index(F2, int(rng.integers(256))),), int(rng.integers(2, 7)))
                for _ in range(15)]
        chosen = vitali_select(reqs, params)
        assert translates_disjoint(chosen, params)
        for x, n in reqs:
            assert any(_in_subgroup([a - b for a, b in zip(x, c)], params, m) for c, m in chosen)


def test_dyadic_examples(rng):
    params = OperatorParams(K1, 0)
    g = random_grid(F2, (6,), rng)
    rep = dyadic_maximal_check(g, params, n_range=(1, 5))
    assert rep.passed and rep.L == 4 and rep.M == 2
    assert rep.ratio <= (rep.M + 1) ** 2
    zero = dyadic_maximal_check(GridFunction.zeros(F2, (3,)), params, n_range=(1, 5))
    assert zero.lhs == 0 and zero.passed
    P = apply_D(g, params.at(3))
    const = dyadic_maximal_check(g, params, n_range=(1, 5), projections=[P] * 4)
    assert const.passed and const.lhs == pytest.approx(P.norm() ** 2)


def test_dyadic_override_s1(rng):
    params = OperatorParams(K1, 1, overrides=Overrides(rho=Fraction(1, 2)))
    g = random_grid(F2, (6,), rng)
    rep = dyadic_maximal_check(g, params, n_range=(3, 11))
    assert rep.passed and rep.frequency_max <= 1 and rep.stamp == NONCONFORMING


def test_monotone_projection_oscillation_chain(rng):
    # oscillation of D_n g is dominated by three times the maximal function at s = 0
    params = OperatorParams(K1, 0)
    for _ in range(5):
        g = random_grid(F2, (6,), rng)
        seq = [apply_D(g, params.at(n)) for n in range(1, 8)]
        dstar = maximal_sup(seq).norm()
        cuts = sorted(rng.choice(np.arange(1, 8), size=4, replace=False).tolist())
        assert oscillation_norm(seq, cuts) <= 3 * dstar + 1e-9
