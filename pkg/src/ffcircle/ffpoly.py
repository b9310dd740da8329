"""Exact arithmetic in F_q (q = p^m) and in the polynomial ring F_q[t].

Field elements are encoded as integers ``0 <= x < q``: the element
c_0 + c_1 x + ... + c_{m-1} x^{m-1} of F_p[x]/(modulus) is the integer
c_0 + c_1 p + ... + c_{m-1} p^{m-1}.  With this encoding, addition of field
elements is digitwise addition mod p of the base-p digits.

A polynomial of degree < n is likewise identified with the integer whose
base-q digits are its coefficients, constant term least significant.  This
*index* gives the canonical enumeration order of ``enumerate_degree_lt`` and is
how grid functions address points of F_q[t]^k.
"""
from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

from .config import check_count
from .errors import FieldMismatchError

NEG_INF = float("-inf")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _fp_polymod(a: list[int], b: list[int], p: int) -> list[int]:
    # remainder of a by monic-or-not b over F_p; lists low degree first, trimmed
    a = list(a)
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        while a and a[-1] == 0:
            a.pop()
    return a


def _fp_irreducible(mod: Sequence[int], p: int) -> bool:
    m = len(mod) - 1
    for d in range(1, m // 2 + 1):
        for low in range(p**d):
            cand = [(low // p**i) % p for i in range(d)] + [1]
            if not _fp_polymod(list(mod), cand, p):
                return False
    return True


@dataclass(frozen=True)
class FieldParams:
    """The finite field F_q, q = p^m, realised as F_p[x]/(modulus).

    ``modulus`` lists the coefficients of a monic irreducible polynomial of
    degree m over F_p, constant term first; it is required iff m > 1.
    """

    p: int
    m: int = 1
    modulus: tuple[int, ...] | None = None

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.m < 1:
            raise ValueError("extension degree must be >= 1")
        if self.m == 1:
            if self.modulus is not None:
                raise ValueError("modulus is only meaningful for m > 1")
            return
        if self.modulus is None:
            raise ValueError("m > 1 requires an irreducible modulus")
        mod = tuple(int(c) % self.p for c in self.modulus)
        object.__setattr__(self, "modulus", mod)
        if len(mod) != self.m + 1 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree m")
        if not _fp_irreducible(mod, self.p):
            raise ValueError(f"modulus {mod} is reducible over F_{self.p}")

    @property
    def q(self) -> int:
        return self.p**self.m

    def __str__(self):
        if self.m == 1:
            return f"F_{self.p}"
        return f"F_{self.q}[mod {list(self.modulus)}]"

    # -- element encoding -------------------------------------------------
    def coords(self, x: int) -> tuple[int, ...]:
        """Coordinates of ``x`` in the F_p-basis 1, x, ..., x^(m-1)."""
        self._check(x)
        return tuple((x // self.p**i) % self.p for i in range(self.m))

    def element(self, coords: Sequence[int]) -> int:
        if len(coords) != self.m:
            raise ValueError("wrong number of coordinates")
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(coords))

    def _check(self, x: int) -> None:
        if not 0 <= x < self.q:
            raise ValueError(f"{x} is not an element of {self}")

    # -- tables -----------------------------------------------------------
    @cached_property
    def add_table(self) -> np.ndarray:
        p, m, q = self.p, self.m, self.q
        codes = np.arange(q)
        digits = np.stack([(codes // p**i) % p for i in range(m)], axis=1)
        s = (digits[:, None, :] + digits[None, :, :]) % p
        return (s * (p ** np.arange(m))).sum(axis=2).astype(np.int64)

    @cached_property
    def mul_table(self) -> np.ndarray:
        p, m, q = self.p, self.m, self.q
        if m == 1:
            a = np.arange(q)
            return np.outer(a, a) % p
        table = np.zeros((q, q), dtype=np.int64)
        mod = list(self.modulus)
        for x in range(q):
            cx = self.coords(x)
            for y in range(x, q):
                cy = self.coords(y)
                prod = [0] * (2 * m - 1)
                for i, a in enumerate(cx):
                    for j, b in enumerate(cy):
                        prod[i + j] = (prod[i + j] + a * b) % p
                while prod and prod[-1] == 0:
                    prod.pop()
                r = _fp_polymod(prod, mod, p) if prod else []
                r = r + [0] * (m - len(r))
                table[x, y] = table[y, x] = self.element(r)
        return table

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.array([int(np.nonzero(self.add_table[x] == 0)[0][0]) for x in range(self.q)])

    @cached_property
    def inv_table(self) -> np.ndarray:
        inv = np.zeros(self.q, dtype=np.int64)
        for x in range(1, self.q):
            inv[x] = int(np.nonzero(self.mul_table[x] == 1)[0][0])
        return inv

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Tr_{F_q/F_p}(x) as a residue mod p, for every element code x."""
        mul = self.mul_table
        out = np.zeros(self.q, dtype=np.int64)
        for x in range(self.q):
            acc, power = 0, x
            for _ in range(self.m):
                acc = int(self.add_table[acc, power])
                # x^(p^(i+1)) = (x^(p^i))^p
                nxt = 1
                for _ in range(self.p):
                    nxt = int(mul[nxt, power])
                power = nxt
            if acc >= self.p:
                raise AssertionError("trace left the prime field")
            out[x] = acc
        return out

    @cached_property
    def _lists(self):
        return (self.add_table.tolist(), self.mul_table.tolist(),
                self.neg_table.tolist(), self.inv_table.tolist())

    # -- scalar operations --------------------------------------------------
    def add(self, x: int, y: int) -> int:
        if self.m == 1:
            return (x + y) % self.p
        return self._lists[0][x][y]

    def neg(self, x: int) -> int:
        if self.m == 1:
            return -x % self.p
        return self._lists[2][x]

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if self.m == 1:
            return x * y % self.p
        return self._lists[1][x][y]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.m == 1:
            return pow(x, self.p - 2, self.p)
        return self._lists[3][x]

    def trace(self, x: int) -> int:
        self._check(x)
        return int(self.trace_table[x])

    # -- vectorised operations ---------------------------------------------------
    def vadd(self, x, y):
        if self.m == 1:
            return (np.asarray(x) + np.asarray(y)) % self.p
        return self.add_table[x, y]

    def vmul(self, x, y):
        if self.m == 1:
            return (np.asarray(x) * np.asarray(y)) % self.p
        return self.mul_table[x, y]

    def trace_dot(self, digits: np.ndarray, coeffs: Sequence[int]) -> np.ndarray:
        """Exponents Tr(sum_j digits[..., j] * coeffs[j]) mod p, row by row.

        This evaluates the F_p-linear functional behind every character value
        e(.) in the package: ``digits`` are coefficient rows and ``coeffs`` the
        fixed dual vector.
        """
        digits = np.asarray(digits)
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if digits.shape[-1] != coeffs.shape[0]:
            raise ValueError("digit width does not match functional length")
        nz = np.nonzero(coeffs)[0]
        if nz.size == 0:
            return np.zeros(digits.shape[:-1], dtype=np.int64)
        if self.m == 1:
            sub = digits[..., nz].astype(np.int64)
            return (sub @ coeffs[nz]) % self.p
        out = np.zeros(digits.shape[:-1], dtype=np.int64)
        tr = self.trace_table
        for j in nz:
            out += tr[self.mul_table[digits[..., j], coeffs[j]]]
        return out % self.p


# Default configurations.
F2 = FieldParams(2)
F3 = FieldParams(3)
F5 = FieldParams(5)
F4 = FieldParams(2, 2, (1, 1, 1))


def field_trace(field: FieldParams, x: int) -> int:
    """Tr_{F_q/F_p}(x) = sum_{i<m} x^(p^i), returned as a residue mod p."""
    return field.trace(x)


class Poly:
    """An element of F_q[t]; coefficients are field codes, lowest degree first."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: FieldParams, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        q = field.q
        for c in cs:
            if not 0 <= c < q:
                raise ValueError(f"coefficient {c} is not an element of {field}")
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # constructors
    @classmethod
    def zero(cls, field):
        return cls(field)

    @classmethod
    def one(cls, field):
        return cls(field, (1,))

    @classmethod
    def t(cls, field):
        return cls(field, (0, 1))

    @classmethod
    def constant(cls, field, c: int):
        return cls(field, (c,))

    @classmethod
    def monomial(cls, field, degree: int, c: int = 1):
        return cls(field, [0] * degree + [c])

    @classmethod
    def from_index(cls, field, index: int):
        q, cs = field.q, []
        index = int(index)
        if index < 0:
            raise ValueError("negative index")
        while index:
            index, r = divmod(index, q)
            cs.append(r)
        return cls(field, cs)

    @classmethod
    def parse(cls, field, text: str):
        return parse_poly(field, text)

    # basic properties
    @property
    def deg(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.lead == 1

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    @property
    def index(self) -> int:
        q = self.field.q
        return sum(c * q**i for i, c in enumerate(self.coeffs))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == ((other,) if other else ())
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.field, self.coeffs)))
        return self._hash

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    def __bool__(self):
        return bool(self.coeffs)

    # arithmetic
    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, int):
            return Poly(self.field, (other % self.field.q,)) if self.field.m == 1 else Poly(self.field, (other,))
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        f = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = f.add(out[i], c)
        return Poly(f, out)

    __radd__ = __add__

    def __neg__(self):
        f = self.field
        return Poly(f, [f.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(self.field)
        f = self.field
        out = [0] * (len(a) + len(b) - 1)
        if f.m == 1:
            p = f.p
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        out[i + j] += x * y
            return Poly(f, [c % p for c in out])
        add, mul = f._lists[0], f._lists[1]
        for i, x in enumerate(a):
            if x:
                row = mul[x]
                for j, y in enumerate(b):
                    out[i + j] = add[out[i + j]][row[y]]
        return Poly(f, out)

    __rmul__ = __mul__

    def scale(self, c: int) -> Poly:
        f = self.field
        return Poly(f, [f.mul(c, x) for x in self.coeffs])

    def shift(self, k: int) -> Poly:
        """Multiply by t^k (k >= 0)."""
        if not self.coeffs:
            return self
        return Poly(self.field, (0,) * k + self.coeffs)

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        f = self.field
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        if len(rem) - 1 < db:
            return Poly(f), self
        inv_lead = f.inv(other.lead)
        quot = [0] * (len(rem) - db)
        b = other.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            c = f.mul(c, inv_lead)
            quot[k - db] = c
            for i, bi in enumerate(b):
                if bi:
                    rem[k - db + i] = f.sub(rem[k - db + i], f.mul(c, bi))
        return Poly(f, quot), Poly(f, rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result, base = Poly.one(self.field), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def pow_mod(self, e: int, h: Poly) -> Poly:
        """self^e mod h by binary exponentiation with early reduction."""
        result, base = Poly.one(self.field) % h, self % h
        while e:
            if e & 1:
                result = (result * base) % h
            e >>= 1
            if e:
                base = (base * base) % h
        return result

    def monic(self) -> Poly:
        if self.is_zero():
            raise ValueError("the zero polynomial has no monic associate")
        return self.scale(self.field.inv(self.lead))

    def to_json(self) -> list[int]:
        return list(self.coeffs)

    @classmethod
    def from_json(cls, field, data: Sequence[int]) -> Poly:
        return cls(field, data)


def _euclid(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a


def gcd_monic(items: Sequence[Poly]) -> Poly:
    """Monic gcd of the items; at least one must be nonzero."""
    items = list(items)
    if not items or all(x.is_zero() for x in items):
        raise ValueError("gcd of zero polynomials is undefined")
    return reduce(_euclid, items).monic()


def lcm_monic(items: Sequence[Poly]) -> Poly:
    items = list(items)
    if not items or any(x.is_zero() for x in items):
        raise ValueError("lcm requires nonzero polynomials")

    def lcm2(a, b):
        return ((a * b) // _euclid(a, b)).monic()

    return reduce(lcm2, items[1:], items[0].monic())


def enumerate_degree_lt(field: FieldParams, n: int) -> list[Poly]:
    """All q^n polynomials of degree < n in canonical (index) order."""
    if n < 0:
        raise ValueError("n must be >= 0")
    count = field.q**n
    check_count(count, "polynomials")
    return [Poly.from_index(field, i) for i in range(count)]


def enumerate_monic(field: FieldParams, s: int) -> list[Poly]:
    """All q^s monic polynomials of degree s; lower part in canonical order."""
    if s < 0:
        raise ValueError("s must be >= 0")
    count = field.q**s
    check_count(count, "monic polynomials")
    top = field.q**s
    return [Poly.from_index(field, top + i) for i in range(count)]


# -- vectorised index arithmetic -------------------------------------------------

def index_digits(field: FieldParams, idx, n: int) -> np.ndarray:
    """Base-q digits (coefficients) of polynomial indices, shape (..., n)."""
    idx = np.asarray(idx, dtype=np.int64)
    q = field.q
    if n == 0:
        return np.zeros(idx.shape + (0,), dtype=np.int64)
    powers = q ** np.arange(n, dtype=np.int64)
    return (idx[..., None] // powers) % q


def digits_to_index(field: FieldParams, digits) -> np.ndarray:
    digits = np.asarray(digits, dtype=np.int64)
    n = digits.shape[-1]
    return digits @ (field.q ** np.arange(n, dtype=np.int64))


def index_add(field: FieldParams, x, y, n: int) -> np.ndarray:
    """Index of the sum of the polynomials with indices x and y (degrees < n)."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if field.p == 2:
        return x ^ y
    p, width = field.p, n * field.m
    powers = p ** np.arange(width, dtype=np.int64)
    dx = (x[..., None] // powers) % p
    dy = (y[..., None] // powers) % p
    return ((dx + dy) % p) @ powers


def index_neg(field: FieldParams, x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    if field.p == 2:
        return x
    p, width = field.p, n * field.m
    powers = p ** np.arange(width, dtype=np.int64)
    return ((-((x[..., None] // powers) % p)) % p) @ powers


def vec_polymul(field: FieldParams, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise product of coefficient arrays of shapes (N, la) and (N, lb)."""
    n_rows, la = a.shape
    lb = b.shape[1]
    if la == 0 or lb == 0:
        return np.zeros((n_rows, 0), dtype=np.int64)
    out = np.zeros((n_rows, la + lb - 1), dtype=np.int64)
    if field.m == 1:
        p = field.p
        for i in range(la):
            ai = a[:, i:i + 1]
            if not ai.any():
                continue
            out[:, i:i + lb] += ai * b
            if field.p > 2 and i % 64 == 63:
                out %= p
        return out % p
    for i in range(la):
        for j in range(lb):
            out[:, i + j] = field.add_table[out[:, i + j], field.mul_table[a[:, i], b[:, j]]]
    return out


def power_digits(field: FieldParams, idx, n: int, r: int) -> np.ndarray:
    """Coefficients of f^r for the polynomials f with the given indices (deg f < n).

    Returns an array of shape (len(idx), r*(n-1)+1); for n = 0 the width is 1.
    """
    idx = np.asarray(idx, dtype=np.int64)
    if n == 0:
        out = np.zeros((idx.size, 1), dtype=np.int64)
        out[:, 0] = 1 if r == 0 else 0
        return out
    base = index_digits(field, idx, n)
    width = r * (n - 1) + 1
    result = np.zeros((idx.size, 1), dtype=np.int64)
    result[:, 0] = 1
    e = r
    while e:
        if e & 1:
            result = vec_polymul(field, result, base)
        e >>= 1
        if e:
            base = vec_polymul(field, base, base)
    if result.shape[1] < width:
        result = np.pad(result, ((0, 0), (0, width - result.shape[1])))
    return result[:, :width]


@functools.lru_cache(maxsize=16)
def power_table(field: FieldParams, n: int, r: int) -> np.ndarray:
    """Cached power_digits over every f with deg f < n, as a read-only int8/int64 array."""
    count = field.q**n
    check_count(count, "polynomials")
    table = power_digits(field, np.arange(count, dtype=np.int64), n, r)
    if field.q <= 127:
        table = table.astype(np.int8)
    table.setflags(write=False)
    return table


# -- text form --------------------------------------------------------------------

_TERM = re.compile(r"^(?:(\d+)\*?)?(t(?:\^(\d+))?)?$")


def parse_poly(field: FieldParams, text: str) -> Poly:
    """Parse the ASCII form ``"t^3+t+1"``; coefficients are field codes (``2t^2``)."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial string")
    if s == "0":
        return Poly(field)
    coeffs: dict[int, int] = {}
    for term in s.split("+"):
        m = _TERM.match(term)
        if not term or not m or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"cannot parse term {term!r}")
        c = int(m.group(1)) if m.group(1) is not None else 1
        if m.group(2) is None:
            e = 0
        else:
            e = int(m.group(3)) if m.group(3) is not None else 1
        if not 0 <= c < field.q:
            raise ValueError(f"coefficient {c} is not an element of {field}")
        coeffs[e] = field.add(coeffs.get(e, 0), c)
    top = max(coeffs)
    return Poly(field, [coeffs.get(i, 0) for i in range(top + 1)])


def format_poly(poly: Poly) -> str:
    if poly.is_zero():
        return "0"
    parts = []
    for e in range(len(poly.coeffs) - 1, -1, -1):
        c = poly.coeffs[e]
        if c == 0:
            continue
        if e == 0:
            parts.append(str(c))
            continue
        mono = "t" if e == 1 else f"t^{e}"
        parts.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(parts)


def reduced_vectors(h: Poly, k: int) -> list[tuple[Poly, ...]]:
    """The set A_h: k-tuples a with deg a_i < deg h and gcd(a_1, ..., a_k, h) = 1.

    For h = 1 this is the single zero vector (by the convention (0, 1) = 1).
    """
    if not h.is_monic():
        raise ValueError("h must be monic")
    field, d = h.field, h.deg
    if d == 0:
        return [tuple(Poly(field) for _ in range(k))]
    count = field.q ** (k * d)
    check_count(count, "numerator vectors")
    polys = [Poly.from_index(field, i) for i in range(field.q**d)]
    out = []
    for combo in _product(polys, k):
        if gcd_monic(list(combo) + [h]).deg == 0:
            out.append(combo)
    return out


def _product(polys, k):
    # the first coordinate varies fastest
    for combo in itertools.product(polys, repeat=k):
        yield tuple(reversed(combo))
