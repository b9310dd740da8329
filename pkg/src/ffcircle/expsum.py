"""Weyl sums, the normalised multipliers M_n and the Gauss sums Lambda(a, h).

Every character sum is accumulated exactly as a ``CycloSum``: the number of
summands landing on each p-th root of unity.  Complex numbers appear only when
a caller asks for ``.value``.

The residue of alpha * f^r is F_p-linear in the coefficients of f^r, so a Weyl
sum over deg f < n reduces to one matrix-vector product against a cached table
of the coefficients of f^r (``ffpoly.power_table``).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .config import check_count
from .errors import FieldMismatchError
from .ffpoly import (FieldParams, Poly, enumerate_degree_lt, enumerate_monic, gcd_monic,
                     power_digits, power_table, reduced_vectors)
from .torus import Frequency, freq_digits

_TABLE_CACHE_ELEMENTS = 2**23
_CHUNK = 2**16


@dataclass(frozen=True)
class ExponentSystem:
    """The exponent set K = {r_1 < ... < r_k} over a fixed field.

    ``delta0`` is a reporting label for minor-arc decay plots only; the true
    constant is not known numerically.
    """

    exponents: tuple[int, ...]
    field: FieldParams
    delta0: float = 0.05

    def __post_init__(self):
        ks = tuple(int(r) for r in self.exponents)
        if not ks:
            raise ValueError("K must be nonempty")
        if any(r < 1 for r in ks):
            raise ValueError("exponents must be >= 1")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("exponents must be strictly increasing")
        object.__setattr__(self, "exponents", ks)

    @property
    def k(self) -> int:
        return len(self.exponents)

    @property
    def r_star(self) -> int:
        return self.exponents[-1]

    @property
    def rho(self) -> Fraction:
        return Fraction(1, 8 * self.r_star)

    @property
    def coprime_flags(self) -> tuple[bool, ...]:
        return tuple(math.gcd(r, self.field.p) == 1 for r in self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __len__(self):
        return len(self.exponents)


@dataclass(frozen=True)
class CycloSum:
    """sum_j counts[j] * zeta_p^j with nonnegative integer counts."""

    counts: tuple[int, ...]

    @classmethod
    def from_exponents(cls, exponents: np.ndarray, p: int) -> CycloSum:
        c = np.bincount(np.asarray(exponents, dtype=np.int64) % p, minlength=p)
        return cls(tuple(int(x) for x in c))

    @property
    def p(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def value(self) -> complex:
        p = self.p
        if p == 2:
            return complex(self.counts[0] - self.counts[1])
        re = sum(c * math.cos(2 * math.pi * j / p) for j, c in enumerate(self.counts))
        im = sum(c * math.sin(2 * math.pi * j / p) for j, c in enumerate(self.counts))
        # exact zero when all counts agree
        if len(set(self.counts)) == 1:
            return 0j
        return complex(re, im)

    def __abs__(self):
        return abs(self.value)

    def __add__(self, other: CycloSum) -> CycloSum:
        self._same_p(other)
        return CycloSum(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __mul__(self, other):
        if isinstance(other, int):
            if other < 0:
                raise ValueError("counts must stay nonnegative")
            return CycloSum(tuple(c * other for c in self.counts))
        self._same_p(other)
        p = self.p
        out = [0] * p
        for i, a in enumerate(self.counts):
            if a:
                for j, b in enumerate(other.counts):
                    out[(i + j) % p] += a * b
        return CycloSum(tuple(out))

    __rmul__ = __mul__

    def conjugate(self) -> CycloSum:
        p = self.p
        return CycloSum(tuple(self.counts[-j % p] for j in range(p)))

    def equals(self, other: CycloSum) -> bool:
        """Equality in Z[zeta_p]: the count vectors differ by a constant."""
        self._same_p(other)
        diff = {a - b for a, b in zip(self.counts, other.counts)}
        return len(diff) == 1

    def _same_p(self, other):
        if self.p != other.p:
            raise FieldMismatchError("cyclotomic sums of different characteristic")

    def to_json(self) -> dict:
        return {"p": self.p, "counts": list(self.counts)}


def _as_system(K, field: FieldParams | None = None) -> ExponentSystem:
    if isinstance(K, ExponentSystem):
        return K
    if field is None:
        raise ValueError("a field is required when K is a plain exponent list")
    return ExponentSystem(tuple(K), field)


def _coords(alphas) -> list[Frequency]:
    if hasattr(alphas, "coords"):
        return list(alphas.coords())
    return list(alphas)


def phase_exponents(alphas, system: ExponentSystem, n: int, idx: np.ndarray | None = None) -> np.ndarray:
    """Exponents Tr(res(sum_i alpha_i f^{r_i})) mod p for f with deg f < n.

    ``idx`` restricts to a subset of polynomial indices; by default all q^n.
    """
    field = system.field
    coords = _coords(alphas)
    if len(coords) != system.k:
        raise ValueError(f"expected {system.k} frequencies, got {len(coords)}")
    for a in coords:
        if a.field != field:
            raise FieldMismatchError("frequency over a different field")
    count = field.q**n
    check_count(count, "summands")
    if idx is None:
        idx = np.arange(count, dtype=np.int64)
    if n == 0:
        return np.zeros(idx.size, dtype=np.int64)
    out = np.zeros(idx.size, dtype=np.int64)
    for alpha, r in zip(coords, system.exponents):
        width = r * (n - 1) + 1
        digits = freq_digits(alpha, width)
        if not digits.any():
            continue
        if idx.size == count and count * width <= _TABLE_CACHE_ELEMENTS:
            out += field.trace_dot(power_table(field, n, r), digits)
        else:
            for start in range(0, idx.size, _CHUNK):
                block = idx[start:start + _CHUNK]
                out[start:start + _CHUNK] += field.trace_dot(power_digits(field, block, n, r), digits)
    return out % field.p


def weyl_sum(alphas, K, n: int, field: FieldParams | None = None) -> CycloSum:
    """Exact sum_{deg f < n} e(alpha_1 f^{r_1} + ... + alpha_k f^{r_k}).

    TailSeries coordinates need precision >= r_i (n - 1) + 1, so that every
    residue is determined; rational coordinates are expanded exactly.
    """
    system = _as_system(K, field)
    return CycloSum.from_exponents(phase_exponents(alphas, system, n), system.field.p)


def multiplier_M(alphas, K, n: int, field: FieldParams | None = None) -> complex:
    """The normalised Weyl sum q^-n * weyl_sum; |value| <= 1."""
    system = _as_system(K, field)
    return weyl_sum(alphas, system, n).value / system.field.q**n


def _validate_center(a: Sequence[Poly], h: Poly, system: ExponentSystem) -> None:
    if len(a) != system.k:
        raise ValueError(f"expected {system.k} numerators, got {len(a)}")
    if h.field != system.field or any(x.field != system.field for x in a):
        raise FieldMismatchError("numerators/denominator over a different field")
    if h.is_zero() or not h.is_monic():
        raise ValueError("h must be monic")
    if any(not (x.deg < h.deg) for x in a):
        raise ValueError("numerators must satisfy deg a_i < deg h")
    if h.deg > 0 and gcd_monic(list(a) + [h]).deg > 0:
        raise ValueError("(a_1, ..., a_k, h) must be 1")


def _power_residues(h: Poly, system: ExponentSystem) -> list[tuple[Poly, ...]]:
    return [tuple(f.pow_mod(r, h) for r in system.exponents)
            for f in enumerate_degree_lt(system.field, h.deg)]


def _gauss_from_residues(a, h, residues, field) -> CycloSum:
    d = h.deg
    exps = []
    for powers in residues:
        w = Poly(field)
        for ai, z in zip(a, powers):
            if not ai.is_zero():
                w = w + ai * z
        w = w % h
        # res(w/h) is the coefficient of t^(deg h - 1) since h is monic
        exps.append(field.trace(w[d - 1]) if d >= 1 else 0)
    return CycloSum.from_exponents(np.array(exps, dtype=np.int64), field.p)


def gauss_sum_exact(a: Sequence[Poly], h: Poly, K, field: FieldParams | None = None) -> CycloSum:
    """sum_{deg f < deg h} e((a_1 f^{r_1} + ... + a_k f^{r_k}) / h), via reduction mod h."""
    system = _as_system(K, field or h.field)
    a = tuple(a)
    _validate_center(a, h, system)
    return _gauss_from_residues(a, h, _power_residues(h, system), system.field)


def gauss_sum(a: Sequence[Poly], h: Poly, K, field: FieldParams | None = None) -> complex:
    """Lambda(a, h) = q^-deg h * gauss_sum_exact(a, h)."""
    system = _as_system(K, field or h.field)
    return gauss_sum_exact(a, h, system).value / system.field.q**h.deg


@dataclass(frozen=True)
class GaussRow:
    s: int
    h: Poly
    a: tuple[Poly, ...]
    exact: CycloSum

    @property
    def value(self) -> complex:
        return self.exact.value / self.h.field.q**self.s


@dataclass
class GaussTable:
    s: int
    system: ExponentSystem
    rows: list[GaussRow] = dc_field(default_factory=list)

    @property
    def max_abs(self) -> float:
        return max((abs(r.value) for r in self.rows), default=0.0)

    def lookup(self) -> dict[tuple[tuple[Poly, ...], Poly], complex]:
        return {(r.a, r.h): r.value for r in self.rows}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "h"] + [f"a{i + 1}" for i in range(self.system.k)] + ["re", "im", "abs"])
        for r in self.rows:
            v = r.value
            w.writerow([r.s, str(r.h)] + [str(x) for x in r.a]
                       + [f"{v.real:.15g}", f"{v.imag:.15g}", f"{abs(v):.15g}"])
        return buf.getvalue()


_TABLES: dict[tuple[ExponentSystem, int], GaussTable] = {}


def gauss_table(s: int, K, field: FieldParams | None = None, cache: bool = True) -> GaussTable:
    """Lambda(a, h) for every monic h of degree s and every a in A_h."""
    system = _as_system(K, field)
    key = (system, s)
    if cache and key in _TABLES:
        return _TABLES[key]
    q = system.field.q
    check_count(q**s * q**(system.k * s), "Gauss sums")
    table = GaussTable(s, system)
    for h in enumerate_monic(system.field, s):
        residues = _power_residues(h, system)
        for a in reduced_vectors(h, system.k):
            table.rows.append(GaussRow(s, h, a, _gauss_from_residues(a, h, residues, system.field)))
    if cache:
        _TABLES[key] = table
    return table


def fit_gauss_decay(tables: Iterable[GaussTable]) -> float:
    """Largest gamma with max_{deg h = s} |Lambda| <= q^(-gamma s) for every s >= 1 given.

    Infinite when every listed maximum vanishes.
    """
    gamma = math.inf
    for t in tables:
        if t.s < 1:
            continue
        m = t.max_abs
        if m <= 1e-12:
            continue
        q = t.system.field.q
        gamma = min(gamma, -math.log(m, q) / t.s + 0.0)
    return gamma



def fit_gauss_decay_with_constant(tables: Iterable[GaussTable]) -> tuple[float, float] | None:
    """(gamma, c) with max_{deg h = s} |Lambda| <= q^(c - gamma s) on every listed s >= 1.

    gamma is the least-squares slope of -log_q(max) against s over the nonzero
    maxima; c is the smallest offset making the bound hold on all of them.
    None when fewer than two distinct s have a nonzero maximum.
    """
    pts = []
    for t in tables:
        if t.s >= 1 and t.max_abs > 1e-12:
            pts.append((t.s, math.log(t.max_abs, t.system.field.q)))
    if len({s for s, _ in pts}) < 2:
        return None
    x = np.array([s for s, _ in pts], dtype=float)
    y = np.array([v for _, v in pts])
    gamma = -float(np.polyfit(x, y, 1)[0])
    c = float(np.max(y + gamma * x))
    return gamma, c
