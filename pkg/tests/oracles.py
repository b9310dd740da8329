"""Slow reference implementations built only on Poly and the torus primitives."""
import cmath
import math

from ffcircle.ffpoly import Poly, enumerate_degree_lt
from ffcircle.torus import character, scalar_mul


def brute_weyl(alphas, K, n, field):
    total = 0j
    for f in enumerate_degree_lt(field, n):
        e = 0
        for a, r in zip(alphas, K):
            e += character(scalar_mul(f**r, a)).exponent
        total += cmath.exp(2j * math.pi * e / field.p)
    return total


def brute_gauss(a, h, K):
    field = h.field
    from ffcircle.torus import RationalTail
    return brute_weyl([RationalTail(x, h) for x in a], K, h.deg, field) / field.q**h.deg


def grid_shift_average(values, field, B, n, r=1):
    """(M_n g)(x) = q^-n sum_{deg f < n} g(x + f^r) on a 1-d box, by direct Poly arithmetic."""
    out = {}
    N = max(B, r * (n - 1) + 1)
    for x in enumerate_degree_lt(field, N):
        acc = 0
        for f in enumerate_degree_lt(field, n):
            y = x + f**r
            if y.index < len(values):
                acc += values[y.index]
        out[x.index] = acc / field.q**n
    return out
