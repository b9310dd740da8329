"""Truncated arithmetic on the torus T = {sum_{j<=-1} a_j t^j} inside F_q((1/t)).

Two kinds of frequency live here.  A ``TailSeries`` stores the coefficients of
t^-1, ..., t^-N for an explicit precision N and is used for sampled,
genuinely free parameters.  A ``RationalTail`` is the fractional part of an
exact quotient a/h and never loses precision.  Operations on a TailSeries
report exactly how much output precision they guarantee and raise
``PrecisionError`` instead of truncating silently.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import FieldMismatchError, PrecisionError
from .ffpoly import NEG_INF, FieldParams, Poly, gcd_monic


class BelowPrecision(float):
    """The value -inf for a series that is zero to its stored precision.

    Compares like ``float('-inf')``; ``precision`` records that the true order
    is only known to be < -precision.
    """

    def __new__(cls, precision: int):
        obj = super().__new__(cls, "-inf")
        obj.precision = precision
        return obj

    def __repr__(self):
        return f"-inf(precision {self.precision})"

    __str__ = __repr__


class TailSeries:
    """Coefficients of t^-1 ... t^-N of an element of T (absent terms are zero)."""

    __slots__ = ("field", "precision", "digits")

    def __init__(self, field: FieldParams, precision: int, digits: Sequence[int] = ()):
        if precision < 1:
            raise ValueError("precision must be >= 1")
        ds = [int(d) for d in digits]
        if len(ds) > precision:
            raise ValueError("more digits than the declared precision")
        for d in ds:
            if not 0 <= d < field.q:
                raise ValueError(f"coefficient {d} is not an element of {field}")
        ds += [0] * (precision - len(ds))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "digits", tuple(ds))

    def __setattr__(self, name, value):
        raise AttributeError("TailSeries is immutable")

    @classmethod
    def zero(cls, field, precision):
        return cls(field, precision)

    @classmethod
    def from_terms(cls, field, precision: int, terms: Mapping[int, int]):
        """Build from {exponent: coeff} with exponents in [-precision, -1]."""
        ds = [0] * precision
        for e, c in terms.items():
            if not -precision <= e <= -1:
                raise ValueError(f"exponent {e} outside [-{precision}, -1]")
            ds[-e - 1] = field.add(ds[-e - 1], c)
        return cls(field, precision, ds)

    @classmethod
    def monomial(cls, field, exponent: int, precision: int | None = None, c: int = 1):
        """c * t^exponent, exponent <= -1; precision defaults to -exponent."""
        precision = -exponent if precision is None else precision
        return cls.from_terms(field, precision, {exponent: c})

    def coeff(self, exponent: int) -> int:
        if not -self.precision <= exponent <= -1:
            raise PrecisionError(f"t^{exponent} is outside the stored range")
        return self.digits[-exponent - 1]

    def terms(self) -> dict[int, int]:
        return {-(j + 1): c for j, c in enumerate(self.digits) if c}

    def truncate(self, precision: int) -> TailSeries:
        if precision > self.precision:
            raise PrecisionError(
                f"need precision {precision}, series only has {self.precision}")
        return TailSeries(self.field, precision, self.digits[:precision])

    def is_zero(self) -> bool:
        return not any(self.digits)

    def __eq__(self, other):
        if not isinstance(other, TailSeries):
            return NotImplemented
        return (self.field, self.precision, self.digits) == (other.field, other.precision, other.digits)

    def __hash__(self):
        return hash((self.field, self.precision, self.digits))

    def __repr__(self):
        return f"TailSeries({format_tail(self)!r}, precision={self.precision})"

    def __add__(self, other):
        return tail_add(self, other)

    def __neg__(self):
        f = self.field
        return TailSeries(f, self.precision, [f.neg(d) for d in self.digits])

    def __sub__(self, other):
        return tail_add(self, -other)

    def to_json(self) -> dict:
        return {"precision": self.precision,
                "terms": [[e, c] for e, c in sorted(self.terms().items(), reverse=True)]}

    @classmethod
    def from_json(cls, field, data: Mapping) -> TailSeries:
        return cls.from_terms(field, int(data["precision"]), {int(e): int(c) for e, c in data["terms"]})


class RationalTail:
    """The exact element {a/h} of T, stored in lowest terms with h monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if num.field != den.field:
            raise FieldMismatchError("numerator and denominator over different fields")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        inv = den.field.inv(den.lead)
        num, den = num.scale(inv) % den.scale(inv), den.scale(inv)
        if not num.is_zero():
            g = gcd_monic([num, den])
            if g.deg > 0:
                num, den = num // g, den // g
        else:
            den = Poly.one(den.field)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalTail is immutable")

    @classmethod
    def zero(cls, field):
        return cls(Poly(field), Poly.one(field))

    @property
    def field(self) -> FieldParams:
        return self.num.field

    def ord(self):
        if self.num.is_zero():
            return NEG_INF
        return self.num.deg - self.den.deg

    def residue(self) -> int:
        return self.num[self.den.deg - 1] if self.den.deg >= 1 else 0

    def expand(self, precision: int) -> TailSeries:
        return expand_rational(self.num, self.den, precision)

    def __add__(self, other):
        if not isinstance(other, RationalTail):
            return NotImplemented
        return RationalTail(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RationalTail(-self.num, self.den)

    def __sub__(self, other):
        if not isinstance(other, RationalTail):
            return NotImplemented
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, RationalTail):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalTail({self.num}/({self.den}))"


Frequency = Union[TailSeries, RationalTail]


@dataclass(frozen=True)
class CharValue:
    """The p-th root of unity exp(2*pi*i*exponent/p)."""

    exponent: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "exponent", self.exponent % self.p)

    def __mul__(self, other: CharValue) -> CharValue:
        if self.p != other.p:
            raise FieldMismatchError("characters of different characteristic")
        return CharValue(self.exponent + other.exponent, self.p)

    def conjugate(self) -> CharValue:
        return CharValue(-self.exponent, self.p)

    @property
    def value(self) -> complex:
        if self.exponent == 0:
            return 1 + 0j
        if self.p == 2:
            return -1 + 0j
        return cmath.exp(2j * math.pi * self.exponent / self.p)


def expand_rational(a: Poly, h: Poly, precision: int, normalize: bool = True) -> TailSeries:
    """Coefficients of t^-1..t^-N in the Laurent expansion of a/h (integral part dropped)."""
    if a.field != h.field:
        raise FieldMismatchError("a and h over different fields")
    if h.is_zero():
        raise ZeroDivisionError("expansion of a/0")
    if precision < 1:
        raise ValueError("precision must be >= 1")
    f = a.field
    if not h.is_monic():
        if not normalize:
            raise ValueError("denominator is not monic")
        inv = f.inv(h.lead)
        a, h = a.scale(inv), h.scale(inv)
    d = h.deg
    if d == 0:
        return TailSeries(f, precision)
    rem = list((a % h).coeffs) + [0] * d
    rem = rem[:d]
    hc = h.coeffs
    digits = []
    for _ in range(precision):
        # rem <- rem * t, then peel off the multiple of h
        c = rem[-1]
        rem = [0] + rem[:-1]
        if c:
            for i in range(d):
                if hc[i]:
                    rem[i] = f.sub(rem[i], f.mul(c, hc[i]))
        digits.append(c)
    return TailSeries(f, precision, digits)


def ord_of(alpha: Frequency):
    """Largest exponent with a nonzero coefficient; -inf (annotated) if none."""
    if isinstance(alpha, RationalTail):
        return alpha.ord()
    for j, c in enumerate(alpha.digits):
        if c:
            return -(j + 1)
    return BelowPrecision(alpha.precision)


def residue(alpha: Frequency) -> int:
    """Coefficient of t^-1."""
    if isinstance(alpha, RationalTail):
        return alpha.residue()
    return alpha.digits[0]


def character(alpha: Frequency) -> CharValue:
    """e(alpha) = exp(2 pi i Tr(res alpha) / p)."""
    f = alpha.field
    return CharValue(f.trace(residue(alpha)), f.p)


def mul_poly_tail(f: Poly, alpha: TailSeries) -> tuple[Poly, TailSeries]:
    """Integral and fractional parts of f*alpha; the fractional part has precision N - deg f."""
    if f.field != alpha.field:
        raise FieldMismatchError("f and alpha over different fields")
    F = f.field
    N = alpha.precision
    if f.is_zero():
        return Poly(F), TailSeries(F, N)
    d = f.deg
    if N - d < 1:
        raise PrecisionError(f"precision {N} cannot resolve the residue of a degree-{d} multiple")
    fc, ad = f.coeffs, alpha.digits
    integral = []
    for k in range(d):
        acc = 0
        for j in range(1, d - k + 1):
            c = fc[k + j]
            if c and ad[j - 1]:
                acc = F.add(acc, F.mul(c, ad[j - 1]))
        integral.append(acc)
    frac = []
    for l in range(1, N - d + 1):
        acc = 0
        for i, c in enumerate(fc):
            if c and ad[l + i - 1]:
                acc = F.add(acc, F.mul(c, ad[l + i - 1]))
        frac.append(acc)
    return Poly(F, integral), TailSeries(F, N - d, frac)


def scalar_mul(f: Poly, alpha: Frequency, precision: int | None = None) -> Frequency:
    """Fractional part of f*alpha, to output precision N - deg f (or the requested one)."""
    if isinstance(alpha, RationalTail):
        return RationalTail(f * alpha.num, alpha.den)
    _, frac = mul_poly_tail(f, alpha)
    if precision is not None:
        frac = frac.truncate(precision)
    return frac


def tail_add(alpha: TailSeries, beta: TailSeries) -> TailSeries:
    """Coefficientwise sum at precision min(N_alpha, N_beta)."""
    if alpha.field != beta.field:
        raise FieldMismatchError("series over different fields")
    f = alpha.field
    n = min(alpha.precision, beta.precision)
    return TailSeries(f, n, [f.add(x, y) for x, y in zip(alpha.digits[:n], beta.digits[:n])])


def as_tail(alpha: Frequency, precision: int) -> TailSeries:
    """The first ``precision`` digits of a frequency, exactly."""
    if isinstance(alpha, RationalTail):
        return alpha.expand(precision)
    return alpha.truncate(precision)


def freq_digits(alpha: Frequency, precision: int) -> np.ndarray:
    """Digits of t^-1..t^-precision as an int64 array (precision may be 0)."""
    if precision <= 0:
        return np.zeros(0, dtype=np.int64)
    return np.asarray(as_tail(alpha, precision).digits, dtype=np.int64)


def ord_diff(alpha: Frequency, center: RationalTail, needed: int | None = None):
    """ord(alpha - center).

    Exact when ``alpha`` is rational.  For a TailSeries the result is exact
    unless the difference vanishes to the stored precision, in which case a
    ``BelowPrecision`` is returned.
    """
    if isinstance(alpha, RationalTail):
        return (alpha - center).ord()
    return ord_of(alpha - center.expand(alpha.precision))


def add_frequency(alpha: Frequency, beta: Frequency) -> Frequency:
    if isinstance(alpha, RationalTail) and isinstance(beta, RationalTail):
        return alpha + beta
    n = min(x.precision for x in (alpha, beta) if isinstance(x, TailSeries))
    return tail_add(as_tail(alpha, n), as_tail(beta, n))


_TAIL_TERM = re.compile(r"^(?:(\d+)\*?)?t\^\(?-(\d+)\)?$")


def parse_tail(field: FieldParams, text: str, precision: int | None = None) -> TailSeries:
    """Parse ``"t^-1+t^-3"`` (coefficients as field codes, e.g. ``2t^-2``)."""
    s = text.replace(" ", "")
    terms: dict[int, int] = {}
    if s not in ("", "0"):
        for term in s.split("+"):
            m = _TAIL_TERM.match(term)
            if not m:
                raise ValueError(f"cannot parse tail term {term!r}")
            c = int(m.group(1)) if m.group(1) is not None else 1
            e = -int(m.group(2))
            if e > -1:
                raise ValueError("tail exponents must be <= -1")
            if not 0 <= c < field.q:
                raise ValueError(f"coefficient {c} is not an element of {field}")
            terms[e] = field.add(terms.get(e, 0), c)
    lowest = -min(terms) if terms else 1
    if precision is None:
        precision = lowest
    if precision < lowest:
        raise ValueError("precision smaller than the lowest stored exponent")
    return TailSeries.from_terms(field, precision, terms)


def format_tail(alpha: TailSeries) -> str:
    parts = []
    for e, c in sorted(alpha.terms().items(), reverse=True):
        parts.append(f"t^{e}" if c == 1 else f"{c}t^{e}")
    return "+".join(parts) if parts else "0"


def random_tail(field: FieldParams, precision: int, rng, top: int = 1,
                exact_ord: int | None = None) -> TailSeries:
    """Seeded random series with digits from t^-top down to t^-precision.

    ``exact_ord`` = -j forces a nonzero leading digit at t^-j (and zeros above).
    """
    if exact_ord is not None:
        top = -exact_ord
        if top < 1:
            raise ValueError("exact_ord must be <= -1")
    precision = max(precision, top)
    digits = [0] * precision
    for j in range(max(top, 1), precision + 1):
        digits[j - 1] = int(rng.integers(field.q))
    if exact_ord is not None:
        digits[top - 1] = int(rng.integers(1, field.q))
    return TailSeries(field, precision, digits)
