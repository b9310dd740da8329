"""Major-arc boxes, reduced rational centres and major/minor classification.

Every threshold is a rational number.  Since ord takes integer values, the
strict inequality ord < T is the same as ord <= ceil(T) - 1, so membership is
decided by integer comparisons only.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .config import CONFORMING, Overrides, stamp
from .errors import FieldMismatchError, PrecisionError
from .expsum import ExponentSystem, gauss_sum_exact, weyl_sum
from .ffpoly import Poly, enumerate_monic, gcd_monic, reduced_vectors
from .torus import (BelowPrecision, Frequency, RationalTail, TailSeries, add_frequency,
                    ord_diff)


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class RationalPoint:
    """A reduced vector a/h: h monic, deg a_i < deg h and gcd(a_1, ..., a_k, h) = 1."""

    a: tuple[Poly, ...]
    h: Poly

    def __post_init__(self):
        a = tuple(self.a)
        h = self.h
        if not a:
            raise ValueError("a rational point needs at least one coordinate")
        if any(x.field != h.field for x in a):
            raise FieldMismatchError("numerators and denominator over different fields")
        if h.is_zero() or not h.is_monic():
            raise ValueError("h must be monic")
        if any(not (x.deg < h.deg) for x in a):
            raise ValueError("numerators must satisfy deg a_i < deg h")
        if h.deg > 0 and gcd_monic(list(a) + [h]).deg > 0:
            raise ValueError("(a_1, ..., a_k, h) must be 1")
        object.__setattr__(self, "a", a)

    @classmethod
    def zero(cls, field, k: int) -> RationalPoint:
        return cls(tuple(Poly(field) for _ in range(k)), Poly.one(field))

    @property
    def field(self):
        return self.h.field

    @property
    def k(self) -> int:
        return len(self.a)

    def coords(self) -> tuple[RationalTail, ...]:
        return tuple(RationalTail(x, self.h) for x in self.a)

    def __str__(self):
        if self.k == 1:
            return f"{self.a[0]}/({self.h})"
        return "(" + ",".join(str(x) for x in self.a) + f")/({self.h})"

    def to_json(self) -> dict:
        return {"a": [x.to_json() for x in self.a], "h": self.h.to_json()}


@dataclass(frozen=True)
class ArcScale:
    """Scale-n geometry: the box exponent n/(4 r*^2) and the bound deg h < rho n.

    ``overrides`` may replace rho or the box exponent 1/(4 r*^2) for desk-scale
    runs; the scale then reports itself as nonconforming.
    """

    n: int
    system: ExponentSystem
    overrides: Overrides | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def rho(self) -> Fraction:
        if self.overrides and self.overrides.rho is not None:
            return self.overrides.rho
        return self.system.rho

    @property
    def box_exponent(self) -> Fraction:
        if self.overrides and self.overrides.box_exponent is not None:
            return self.overrides.box_exponent
        return Fraction(1, 4 * self.system.r_star**2)

    @property
    def thresholds(self) -> tuple[Fraction, ...]:
        """The rational right-hand sides -r_i n + n/(4 r*^2)."""
        return tuple(-r * self.n + self.n * self.box_exponent for r in self.system.exponents)

    @property
    def box_cutoffs(self) -> tuple[int, ...]:
        """Largest integer ord allowed in coordinate i."""
        return tuple(_ceil(T) - 1 for T in self.thresholds)

    @property
    def max_deg_h(self) -> int:
        """Largest deg h with deg h < rho n; -1 when no centre qualifies."""
        return _ceil(self.rho * self.n) - 1

    @property
    def b_cutoffs(self) -> tuple[int, ...]:
        """Largest ord allowed in B_n: ord beta_i < -r_i n."""
        return tuple(-r * self.n - 1 for r in self.system.exponents)

    @property
    def stamp(self) -> str:
        return stamp(self.overrides)


def _coords(alpha) -> list[Frequency]:
    if hasattr(alpha, "coords"):
        return list(alpha.coords())
    return list(alpha)


def _ord_at_most(alpha: Frequency, center: RationalTail, cutoff: int) -> bool:
    """Decide ord(alpha - center) <= cutoff, failing when precision is too short."""
    o = ord_diff(alpha, center)
    if isinstance(o, BelowPrecision):
        # only ord < -precision is known
        if cutoff >= -o.precision - 1:
            return True
        raise PrecisionError(
            f"precision {o.precision} cannot decide ord <= {cutoff}; need {-cutoff}")
    return o <= cutoff


def in_major_box(alpha, center: RationalPoint, scale: ArcScale) -> bool:
    """Whether alpha lies in N_n(a, h): ord(alpha_i - a_i/h) < -r_i n + n/(4 r*^2) for all i."""
    coords = _coords(alpha)
    if len(coords) != center.k or center.k != scale.system.k:
        raise ValueError("arity mismatch")
    return all(_ord_at_most(x, c, m)
               for x, c, m in zip(coords, center.coords(), scale.box_cutoffs))


def in_b_box(beta, scale: ArcScale) -> bool:
    """Whether beta lies in B_n: ord beta_i < -r_i n for all i."""
    coords = _coords(beta)
    zero = RationalTail.zero(scale.system.field)
    return all(_ord_at_most(x, zero, m) for x, m in zip(coords, scale.b_cutoffs))


def in_frame(alpha, center: RationalPoint, scale: ArcScale) -> bool:
    """Membership in N_n(a, h) minus (a/h + B_n), never materialised."""
    if not in_major_box(alpha, center, scale):
        return False
    coords = _coords(alpha)
    return not all(_ord_at_most(x, c, m)
                   for x, c, m in zip(coords, center.coords(), scale.b_cutoffs))


def enumerate_centers(s: int, K, k: int | None = None) -> list[RationalPoint]:
    """All reduced a/h with deg h = s.  ``K`` is an ExponentSystem (or a field with ``k``)."""
    if isinstance(K, ExponentSystem):
        field, k = K.field, K.k
    else:
        field = K
        if k is None:
            raise ValueError("k is required when a field is given")
    out = []
    for h in enumerate_monic(field, s):
        for a in reduced_vectors(h, k):
            out.append(RationalPoint(a, h))
    return out


def centers_up_to(scale: ArcScale) -> list[RationalPoint]:
    out = []
    for s in range(scale.max_deg_h + 1):
        out.extend(enumerate_centers(s, scale.system))
    return out


@dataclass(frozen=True)
class Verdict:
    major: bool
    center: RationalPoint | None = None

    def __str__(self):
        return f"Major({self.center})" if self.major else "Minor"


def classify(alpha, scale: ArcScale, centers: Sequence[RationalPoint] | None = None) -> Verdict:
    """Major(a/h) when alpha lies in a box with deg h < rho n, else Minor.

    Centres are scanned by increasing deg h; disjointness makes the first hit
    the only one at conforming scales.
    """
    for c in (centers if centers is not None else centers_up_to(scale)):
        if in_major_box(alpha, c, scale):
            return Verdict(True, c)
    return Verdict(False)


@dataclass
class DisjointnessReport:
    checked: int
    violations: list[tuple[RationalPoint, RationalPoint]] = dc_field(default_factory=list)
    stamp: str = CONFORMING

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"checked": self.checked,
                "violations": [[str(a), str(b)] for a, b in self.violations],
                "stamp": self.stamp}


def boxes_intersect(c1: RationalPoint, c2: RationalPoint, scale: ArcScale) -> bool:
    """Two ultrametric boxes meet iff each centre difference has ord <= the cutoff."""
    return all((x - y).ord() <= m
               for x, y, m in zip(c1.coords(), c2.coords(), scale.box_cutoffs))


def check_disjointness(scale: ArcScale, max_deg_h: int | None = None) -> DisjointnessReport:
    """Pairwise check of the boxes N_n(a, h) over all centres with deg h <= max_deg_h.

    ``max_deg_h`` defaults to the scale's own bound; passing a larger value is
    the corruption hook used to exhibit violations.
    """
    top = scale.max_deg_h if max_deg_h is None else max_deg_h
    centers = []
    for s in range(top + 1):
        centers.extend(enumerate_centers(s, scale.system))
    corrupted = max_deg_h is not None and max_deg_h > scale.max_deg_h
    report = DisjointnessReport(0, stamp=stamp(Overrides(relax_ranges=True)) if corrupted
                                else scale.stamp)
    for c1, c2 in itertools.combinations(centers, 2):
        report.checked += 1
        if boxes_intersect(c1, c2, scale):
            report.violations.append((c1, c2))
    return report


@dataclass
class IdentityReport:
    exact: bool
    max_abs_error: float
    lhs: complex
    rhs: complex
    stamp: str = CONFORMING

    @property
    def passed(self) -> bool:
        return self.exact and self.max_abs_error <= 1e-9

    def to_json(self) -> dict:
        return {"exact": self.exact, "maxAbsError": self.max_abs_error,
                "lhs": [self.lhs.real, self.lhs.imag], "rhs": [self.rhs.real, self.rhs.imag],
                "pass": self.passed, "stamp": self.stamp}


def verify_major_arc_identity(center: RationalPoint, beta: Sequence[Frequency],
                              scale: ArcScale) -> IdentityReport:
    """Check M_n(a/h + beta) = Lambda(a, h) M_n(beta) in Z[zeta_p] and numerically."""
    system = scale.system
    beta = _coords(beta)
    alpha = [add_frequency(c, b) for c, b in zip(center.coords(), beta)]
    if not in_major_box(alpha, center, scale):
        raise ValueError("a/h + beta is outside N_n(a, h)")
    n, q, d = scale.n, system.field.q, center.h.deg
    lhs = weyl_sum(alpha, system, n)
    lam = gauss_sum_exact(center.a, center.h, system)
    mb = weyl_sum(beta, system, n)
    # q^deg h * S(alpha) = (q^deg h Lambda) * S(beta)
    exact = (lhs * (q**d)).equals(lam * mb)
    lv = lhs.value / q**n
    rv = (lam.value / q**d) * (mb.value / q**n)
    return IdentityReport(exact, abs(lv - rv), lv, rv, scale.stamp)


def sample_beta_in_box(center: RationalPoint, scale: ArcScale, rng, precision: int | None = None,
                       inside_b: bool = False) -> list[TailSeries]:
    """Random beta with a/h + beta in N_n(a, h) (or beta in B_n when ``inside_b``)."""
    system = scale.system
    field = system.field
    if precision is None:
        precision = system.r_star * (scale.n - 1) + 1
    cut = scale.b_cutoffs if inside_b else scale.box_cutoffs
    out = []
    for m in cut:
        top = -m  # first allowed exponent is m, i.e. digit index -m
        digits = [0] * precision
        for j in range(max(top, 1), precision + 1):
            digits[j - 1] = int(rng.integers(field.q))
        out.append(TailSeries(field, precision, digits))
    return out


__all__ = ["RationalPoint", "ArcScale", "Verdict", "DisjointnessReport", "IdentityReport",
           "in_major_box", "in_b_box", "in_frame", "enumerate_centers", "centers_up_to",
           "classify", "boxes_intersect", "check_disjointness", "verify_major_arc_identity",
           "sample_beta_in_box"]
