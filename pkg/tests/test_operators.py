import itertools
from fractions import Fraction

import numpy as np
import pytest

from ffcircle.arcs import enumerate_centers
from ffcircle.config import CONFORMING, NONCONFORMING, Overrides
from ffcircle.errors import RangeError
from ffcircle.expsum import ExponentSystem, multiplier_M
from ffcircle.ffpoly import FieldParams, Poly, enumerate_degree_lt, parse_poly
from ffcircle.operators import (GridFunction, OperatorParams, apply_C, apply_C_piece, apply_D, apply_L,
                                apply_M, build_G, fourier_at, multiplier_D, plancherel_sides,
                                random_grid, verify_large_scale_identity)
from ffcircle.torus import RationalTail

from oracles import grid_shift_average

F2 = FieldParams(2)
F3 = FieldParams(3)
F4 = FieldParams(2, 2, (1, 1, 1))
K1 = ExponentSystem((1,), F2)


def P(text, field=F2):
    return parse_poly(field, text)


def test_M_examples():
    g = GridFunction.delta(F2, (1,))
    out = apply_M(g, K1, 1)
    assert np.allclose(out.values, [0.5, 0.5])
    assert np.array_equal(apply_M(g, K1, 0).values, g.values)
    ones = GridFunction(F2, (6,), np.ones(64, dtype=complex))
    assert apply_M(ones, K1, 2)[(Poly(F2),)] == 1


@pytest.mark.parametrize("field,r,n,B", [(F2, 1, 3, 4), (F2, 3, 2, 4), (F3, 2, 2, 3)])
def test_M_matches_direct_sum(field, r, n, B, rng):
    g = random_grid(field, (B,), rng)
    out = apply_M(g, ExponentSystem((r,), field), n)
    ref = grid_shift_average(g.values, field, B, n, r)
    for x, v in ref.items():
        assert abs(out.values[x] - v) < 1e-12


def test_fourier_examples():
    g = random_grid(F2, (3,), np.random.default_rng(1))
    assert abs(fourier_at(g, [RationalTail.zero(F2)]) - g.values.sum()) < 1e-12
    d = GridFunction.delta(F2, (3,))
    for c in enumerate_centers(2, K1):
        assert fourier_at(d, c) == 1
    two = GridFunction(F2, (1,), np.array([1, 1], dtype=complex))
    assert abs(fourier_at(two, [RationalTail(P("1"), P("t"))])) < 1e-12


@pytest.mark.parametrize("field,K", [(F2, (1,)), (F2, (1, 2)), (F3, (2,)), (F4, (1,))])
def test_M_multiplier_property(field, K, rng):
    system = ExponentSystem(K, field)
    g = random_grid(field, (2,) * system.k, rng)
    for n in (1, 2):
        Mg = apply_M(g, system, n)
        for s in range(0, 3 if field.q == 2 and system.k == 1 else 2):
            for c in enumerate_centers(s, system)[:12]:
                lhs = fourier_at(Mg, c)
                rhs = multiplier_M(c.coords(), system, n) * fourier_at(g, c)
                assert abs(lhs - rhs) < 1e-9


@pytest.mark.parametrize("field,box", [(F2, (5,)), (F3, (2,)), (F2, (2, 3)), (F4, (2,))])
def test_plancherel(field, box, rng):
    g = random_grid(field, box, rng)
    a, b = plancherel_sides(g)
    assert abs(a - b) < 1e-9 * max(1, a)


def test_D_s0_is_box_average(rng):
    g = random_grid(F2, (5,), rng)
    for n in (1, 2, 3):
        D = apply_D(g, OperatorParams(K1, 0, n))
        assert D.max_abs_diff(apply_M(g, K1, n)) < 1e-12


def test_D_is_projection_and_monotone(rng):
    for params in (OperatorParams(K1, 0, 1), OperatorParams(K1, 1, 1, Overrides(rho=Fraction(1, 2)))):
        g = random_grid(F2, (7,), rng)
        ns = range(params.Ns, params.Ns + 3)
        Ds = {n: apply_D(g, params.at(n)) for n in ns}
        for n in ns:
            assert apply_D(Ds[n], params.at(n)).max_abs_diff(Ds[n]) < 1e-9
        for n1, n2 in itertools.combinations(ns, 2):
            assert apply_D(Ds[n1], params.at(n2)).max_abs_diff(Ds[n2]) < 1e-9
        assert Ds[params.Ns].stamp == params.stamp


def test_D_fourier_side(rng):
    params = OperatorParams(K1, 1, 3, Overrides(rho=Fraction(1, 2)))
    g = random_grid(F2, (6,), rng)
    Dg = apply_D(g, params)
    for c in enumerate_centers(1, K1):
        assert multiplier_D(c, params) == 1
        assert abs(fourier_at(Dg, c) - fourier_at(g, c)) < 1e-9
    for c in enumerate_centers(0, K1) + enumerate_centers(2, K1):
        assert multiplier_D(c, params) == 0
        assert abs(fourier_at(Dg, c)) < 1e-9


def test_D_zero_when_inactive(rng):
    g = random_grid(F2, (4,), rng)
    params = OperatorParams(K1, 1, 3)  # 1 < 3/8 fails
    assert not params.active
    assert apply_D(g, params).norm() == 0


def test_norms_contract(rng):
    system = ExponentSystem((1, 2), F2)
    for _ in range(5):
        g = random_grid(F2, (3, 4), rng)
        assert apply_M(g, system, 2).norm() <= g.norm() + 1e-9
        assert apply_D(g, OperatorParams(system, 0, 2)).norm() <= g.norm() + 1e-9


def test_C_examples(rng):
    g = random_grid(F2, (5,), rng)
    assert apply_C_piece(g, OperatorParams(K1, 0, 2)).max_abs_diff(apply_D(g, OperatorParams(K1, 0, 2))) < 1e-12
    K3 = ExponentSystem((3,), F2)
    piece = apply_C_piece(g, OperatorParams(K3, 1, 3, Overrides(rho=Fraction(1, 2))))
    assert piece.norm() == 0
    h = random_grid(F2, (5,), rng)
    p = OperatorParams(K1, 1, 3, Overrides(rho=Fraction(1, 2)))
    assert apply_C_piece(g + h, p).max_abs_diff(apply_C_piece(g, p) + apply_C_piece(h, p)) < 1e-9
    assert apply_C(GridFunction.zeros(F2, (3,)), K1, 4).norm() == 0


def test_C_small_scale_is_box_average(rng):
    g = random_grid(F2, (4,), rng)
    # rho n <= 1 leaves only s = 0
    assert apply_C(g, K1, 8).max_abs_diff(apply_M(g, K1, 8)) < 1e-9


def test_C_truncation_is_stamped(rng):
    g = random_grid(F2, (3,), rng)
    assert apply_C(g, K1, 16, max_s=0).stamp == NONCONFORMING
    assert apply_C(g, K1, 16).stamp == CONFORMING


def test_M_equals_C_for_linear(rng):
    # for K = {1} the multiplier is a sum of exact indicator boxes, so M_n = C_n
    g = random_grid(F2, (6,), rng)
    for n in (9, 10):
        assert apply_M(g, K1, n).max_abs_diff(apply_C(g, K1, n)) < 1e-9


def test_params_derived_values():
    p = OperatorParams(K1, 1, 16)
    assert p.Ns == 9 and p.Rs == 2 and p.Hs == 16 and p.Qs == P("t^2+t")
    assert OperatorParams(K1, 0, 1).Qs == Poly.one(F2)


def test_L_delta_closed_form():
    params = OperatorParams(K1, 1, 16)
    out = apply_L(GridFunction.delta(F2, (4,)), params)
    Q = params.Qs
    mults = {(Q * u).index for u in enumerate_degree_lt(F2, 14)}
    expected = np.zeros(out.values.shape)
    expected[list(mults)] = 2.0 ** -14
    assert np.allclose(out.values, expected)


def test_L_s0_is_box_average(rng):
    g = random_grid(F2, (4,), rng)
    assert apply_L(g, OperatorParams(K1, 0, 3)).max_abs_diff(apply_M(g, K1, 3)) < 1e-12


def test_L_range_guard():
    with pytest.raises(RangeError):
        apply_L(GridFunction.delta(F2, (2,)), OperatorParams(K1, 1, 8))
    with pytest.raises(RangeError):
        apply_L(GridFunction.delta(F2, (2,)), OperatorParams(K1, 1, 1, Overrides(relax_ranges=True)))


def test_G_examples(rng):
    g = random_grid(F2, (5,), rng)
    assert build_G(g, OperatorParams(K1, 0, 1)).max_abs_diff(g) < 1e-12
    assert build_G(GridFunction.zeros(F2, (3,)), OperatorParams(K1, 1, 16)).norm() == 0
    for _ in range(5):
        g = random_grid(F2, (6,), rng)
        assert build_G(g, OperatorParams(K1, 1, 16)).norm() <= g.norm() + 1e-9


def test_large_scale_identity_conforming(rng):
    params = OperatorParams(K1, 1, 16)
    assert verify_large_scale_identity(GridFunction.delta(F2, (4,)), params).passed
    rep = verify_large_scale_identity(random_grid(F2, (8,), rng, density=0.05), params)
    assert rep.passed and rep.stamp == CONFORMING


@pytest.mark.parametrize("field,K,s,n", [(F3, (1,), 1, 4), (F4, (1,), 1, 6), (F2, (1, 2), 1, 2),
                                         (F2, (1,), 2, 8)])
def test_large_scale_identity_relaxed(field, K, s, n, rng):
    system = ExponentSystem(K, field)
    params = OperatorParams(system, s, n, Overrides(rho=Fraction(1), relax_ranges=True))
    g = random_grid(field, (2,) * system.k, rng)
    rep = verify_large_scale_identity(g, params)
    assert rep.passed and rep.stamp == NONCONFORMING


def test_grid_json_round_trip(rng):
    g = random_grid(F3, (2,), rng)
    h = GridFunction.from_json(F3, g.to_json())
    assert h.max_abs_diff(g) < 1e-15


def test_embed_refuses_to_drop_support():
    g = GridFunction.delta(F2, (3,), [P("t^2")])
    with pytest.raises(ValueError):
        g.embed((2,))
