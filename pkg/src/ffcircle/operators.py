"""Operators on l^2(F_q[t]^k) computed from their spatial kernels.

A ``GridFunction`` stores its values as a dense array of shape
(q^B_1, ..., q^B_k): axis i is indexed by the polynomial index of x_i, so the
box deg x_i < B_i is a prefix of every axis and enlarging a box is zero
padding.  Splitting an index as high * q^w + low separates the coefficients of
degree >= w from those below, which turns every box average here into a sum
over the trailing axis of a reshape.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .arcs import RationalPoint, enumerate_centers
from .config import CONFORMING, NONCONFORMING, Overrides, check_count, stamp
from .errors import FieldMismatchError, RangeError
from .expsum import ExponentSystem, gauss_table
from .ffpoly import (FieldParams, Poly, digits_to_index, enumerate_monic, index_add,
                     index_digits, power_table)
from .torus import BelowPrecision, Frequency, freq_digits, ord_diff


@dataclass
class GridFunction:
    """A function on F_q[t]^k supported in the box deg x_i < box[i]."""

    field: FieldParams
    box: tuple[int, ...]
    values: np.ndarray
    stamp: str = CONFORMING

    def __post_init__(self):
        self.box = tuple(int(b) for b in self.box)
        if any(b < 0 for b in self.box):
            raise ValueError("box degrees must be >= 0")
        shape = tuple(self.field.q**b for b in self.box)
        check_count(math.prod(shape), "grid points")
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != shape:
            raise ValueError(f"values have shape {self.values.shape}, box needs {shape}")

    @property
    def k(self) -> int:
        return len(self.box)

    @classmethod
    def zeros(cls, field, box) -> GridFunction:
        box = tuple(box)
        return cls(field, box, np.zeros(tuple(field.q**b for b in box), dtype=complex))

    @classmethod
    def delta(cls, field, box, point: Sequence[Poly] | None = None) -> GridFunction:
        g = cls.zeros(field, box)
        idx = tuple(0 for _ in box) if point is None else tuple(p.index for p in point)
        g.values[idx] = 1
        return g

    @classmethod
    def from_dict(cls, field, box, entries: Mapping[tuple[Poly, ...], complex]) -> GridFunction:
        g = cls.zeros(field, box)
        for x, v in entries.items():
            idx = tuple(p.index for p in x)
            if any(p.deg >= b for p, b in zip(x, g.box)):
                raise ValueError(f"point {x} outside the box {g.box}")
            g.values[idx] = v
        return g

    def __getitem__(self, x: Sequence[Poly]) -> complex:
        if any(p.deg >= b for p, b in zip(x, self.box)):
            return 0j
        return complex(self.values[tuple(p.index for p in x)])

    def embed(self, box: Sequence[int]) -> GridFunction:
        """The same function on a box containing its support; never truncates nonzeros."""
        box = tuple(box)
        q = self.field.q
        pads = []
        vals = self.values
        for axis, (b_old, b_new) in enumerate(zip(self.box, box)):
            if b_new >= b_old:
                pads.append((0, q**b_new - q**b_old))
            else:
                tail = np.take(vals, range(q**b_new, q**b_old), axis=axis)
                if np.any(tail != 0):
                    raise ValueError("embedding would drop nonzero values")
                vals = np.take(vals, range(q**b_new), axis=axis)
                pads.append((0, 0))
        return GridFunction(self.field, box, np.pad(vals, pads), self.stamp)

    def _aligned(self, other: GridFunction):
        if other.field != self.field or other.k != self.k:
            raise FieldMismatchError("grid functions over different fields or arities")
        box = tuple(max(a, b) for a, b in zip(self.box, other.box))
        return self.embed(box), other.embed(box)

    def __add__(self, other: GridFunction) -> GridFunction:
        a, b = self._aligned(other)
        return GridFunction(self.field, a.box, a.values + b.values, _merge(self.stamp, other.stamp))

    def __sub__(self, other: GridFunction) -> GridFunction:
        a, b = self._aligned(other)
        return GridFunction(self.field, a.box, a.values - b.values, _merge(self.stamp, other.stamp))

    def __mul__(self, c) -> GridFunction:
        return GridFunction(self.field, self.box, self.values * c, self.stamp)

    __rmul__ = __mul__

    def abs(self) -> GridFunction:
        return GridFunction(self.field, self.box, np.abs(self.values), self.stamp)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))

    def l1(self) -> float:
        return float(np.sum(np.abs(self.values)))

    def max_abs_diff(self, other: GridFunction) -> float:
        a, b = self._aligned(other)
        return float(np.max(np.abs(a.values - b.values), initial=0.0))

    def support(self) -> list[tuple[Poly, ...]]:
        return [tuple(Poly.from_index(self.field, int(i)) for i in idx)
                for idx in zip(*np.nonzero(self.values))]

    def to_json(self) -> dict:
        entries = []
        for idx in zip(*np.nonzero(self.values)):
            v = self.values[idx]
            entries.append([[Poly.from_index(self.field, int(i)).to_json() for i in idx],
                            float(v.real), float(v.imag)])
        return {"k": self.k, "box": list(self.box), "entries": entries, "stamp": self.stamp}

    @classmethod
    def from_json(cls, field, data: Mapping) -> GridFunction:
        g = cls.zeros(field, data["box"])
        for x, re, im in data["entries"]:
            g.values[tuple(Poly.from_json(field, c).index for c in x)] = complex(re, im)
        g.stamp = data.get("stamp", CONFORMING)
        return g


def _merge(*stamps: str) -> str:
    return NONCONFORMING if NONCONFORMING in stamps else CONFORMING


def random_grid(field, box, rng, density: float = 1.0, complex_values: bool = True,
                nonnegative: bool = False, integer: bool = False) -> GridFunction:
    """A seeded random grid function; ``density`` < 1 gives sparse support."""
    shape = tuple(field.q**b for b in box)
    if integer:
        vals = rng.integers(0, 10, size=shape).astype(complex)
    elif nonnegative:
        vals = rng.random(shape).astype(complex)
    else:
        vals = rng.standard_normal(shape)
        if complex_values:
            vals = vals + 1j * rng.standard_normal(shape)
    if density < 1.0:
        vals = vals * (rng.random(shape) < density)
    return GridFunction(field, tuple(box), vals)


# -- parameters --------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorParams:
    """K, the degree piece s, the scale n and the derived N_s, Q_s, R_s."""

    system: ExponentSystem
    s: int = 0
    n: int = 1
    overrides: Overrides | None = None

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("s must be >= 0")
        if self.n < 0:
            raise ValueError("n must be >= 0")

    @property
    def field(self) -> FieldParams:
        return self.system.field

    @property
    def rho(self) -> Fraction:
        if self.overrides and self.overrides.rho is not None:
            return self.overrides.rho
        return self.system.rho

    @property
    def Ns(self) -> int:
        """min{n : s < rho n}."""
        r = self.rho
        return (self.s * r.denominator) // r.numerator + 1

    @property
    def Qs(self) -> Poly:
        return _q_product(self.field, self.s)

    @property
    def Rs(self) -> int:
        return self.s * self.field.q**self.s

    @property
    def Hs(self) -> int:
        return max(self.Ns, self.Rs**4)

    @property
    def active(self) -> bool:
        """s < rho n."""
        return self.s < self.rho * self.n

    @property
    def relaxed(self) -> bool:
        return bool(self.overrides and self.overrides.relax_ranges)

    @property
    def stamp(self) -> str:
        return stamp(self.overrides)

    def at(self, n: int) -> OperatorParams:
        return OperatorParams(self.system, self.s, n, self.overrides)


@functools.lru_cache(maxsize=32)
def _q_product(field: FieldParams, s: int) -> Poly:
    out = Poly.one(field)
    for h in enumerate_monic(field, s):
        out = out * h
    return out


# -- shift averages -------------------------------------------------------------------

def _shift_indices(field: FieldParams, n: int, r: int) -> np.ndarray:
    """Indices of u^r for every u with deg u < n, in canonical order."""
    if n == 0:
        return np.zeros(1, dtype=np.int64)
    return digits_to_index(field, np.asarray(power_table(field, n, r), dtype=np.int64))


def apply_M(g: GridFunction, K, n: int) -> GridFunction:
    """(M_n g)(x) = q^-n sum_{deg u < n} g(x_1 + u^r_1, ..., x_k + u^r_k).

    The output box is deg x_i < max(B_i, r_i (n - 1) + 1), outside of which
    every shifted point leaves the support of g.
    """
    system = K if isinstance(K, ExponentSystem) else ExponentSystem(tuple(K), g.field)
    if system.field != g.field:
        raise FieldMismatchError("K and g over different fields")
    if system.k != g.k:
        raise ValueError("arity mismatch between K and g")
    if n == 0:
        return GridFunction(g.field, g.box, g.values.copy(), g.stamp)
    field, q = g.field, g.field.q
    check_count(q**n * g.values.size, "shift-average terms")
    box = tuple(max(b, r * (n - 1) + 1) for b, r in zip(g.box, system.exponents))
    G = g.embed(box).values
    shifts = np.stack([_shift_indices(field, n, r) for r in system.exponents], axis=1)
    uniq, counts = np.unique(shifts, axis=0, return_counts=True)
    axes = [np.arange(q**b, dtype=np.int64) for b in box]
    out = np.zeros_like(G)
    for row, c in zip(uniq, counts):
        perm = [index_add(field, ax, int(v), b) for ax, v, b in zip(axes, row, box)]
        out += c * G[np.ix_(*perm)]
    return GridFunction(field, box, out / q**n, g.stamp)


# -- Fourier side -------------------------------------------------------------------

def _coords(alpha) -> list[Frequency]:
    if hasattr(alpha, "coords"):
        return list(alpha.coords())
    return list(alpha)


def _char_vector(field: FieldParams, alpha: Frequency, width: int, sign: int) -> np.ndarray:
    """e(sign * y * alpha) for every y with deg y < width, as complex numbers."""
    digits = freq_digits(alpha, width)
    y = np.arange(field.q**width, dtype=np.int64)
    if width == 0 or not digits.any():
        return np.ones(y.size, dtype=complex)
    e = field.trace_dot(index_digits(field, y, width), digits) * sign % field.p
    return np.exp(2j * np.pi * e / field.p)


def fourier_at(g: GridFunction, alpha) -> complex:
    """g^(alpha) = sum_x g(x) e(-x . alpha), summed exactly over the box."""
    coords = _coords(alpha)
    if len(coords) != g.k:
        raise ValueError("arity mismatch")
    out = g.values
    for a, b in zip(reversed(coords), reversed(g.box)):
        out = out @ _char_vector(g.field, a, b, -1)
    return complex(out)


def multiplier_D(alpha, params: OperatorParams) -> int:
    """D_{s,n}^(alpha): the number (0 or 1) of centres a/h, deg h = s, with alpha - a/h in B_n."""
    if not params.active:
        return 0
    coords = _coords(alpha)
    cut = [-r * params.n - 1 for r in params.system.exponents]
    total = 0
    for c in enumerate_centers(params.s, params.system):
        hit = True
        for x, cc, m in zip(coords, c.coords(), cut):
            o = ord_diff(x, cc)
            if isinstance(o, BelowPrecision):
                if m < -o.precision - 1:
                    raise ValueError("precision too small to evaluate the multiplier")
                continue
            if o > m:
                hit = False
                break
        total += hit
    return total


# -- modulated box averages -----------------------------------------------------------

def _split(values: np.ndarray, q: int, widths: Sequence[int]) -> np.ndarray:
    """Reshape axis i of size q^B into (q^(B - w_i), q^w_i): (high, low) digits."""
    shape = []
    for size, w in zip(values.shape, widths):
        shape += [size // q**w, q**w]
    return values.reshape(shape)


def _centre_average(g: GridFunction, widths: Sequence[int],
                    centres: Iterable[tuple[RationalPoint, complex]]) -> tuple[tuple[int, ...], np.ndarray]:
    """sum_c weight_c q^-sum(w) sum_{deg f_i < w_i} e(-f . a/h) g(x + f).

    With x = high + low and y = low + f the kernel factors as
    e(x_low . a/h) * sum_y e(-y . a/h) g(high, y), one contraction per centre.
    """
    field, q, k = g.field, g.field.q, g.k
    box = tuple(max(b, w) for b, w in zip(g.box, widths))
    check_count(math.prod(q**b for b in box), "grid points")
    V = _split(g.embed(box).values, q, widths)
    out = np.zeros_like(V)
    for centre, weight in centres:
        if weight == 0:
            continue
        chars = [_char_vector(field, a, w, -1) for a, w in zip(centre.coords(), widths)]
        S = V
        for i in reversed(range(k)):
            # contract the low axis of coordinate i (axis 2i + 1)
            S = np.tensordot(S, chars[i], axes=([2 * i + 1], [0]))
        term = S
        for i in range(k):
            term = np.multiply.outer(term, np.conj(chars[i]))
        # term axes: high_1..high_k, low_1..low_k; interleave back
        order = []
        for i in range(k):
            order += [i, k + i]
        out += weight * np.transpose(term, order)
    scale = float(q ** sum(widths))
    return box, out.reshape(tuple(q**b for b in box)) / scale


def _check_active(params: OperatorParams) -> None:
    if params.n < 1:
        raise ValueError("D_{s,n} is defined for n >= 1")


def apply_D(g: GridFunction, params: OperatorParams) -> GridFunction:
    """D_{s,n} g(x) = q^-sum(r_i n) sum_{deg h = s} sum_{a in A_h} sum_{deg f_i < r_i n} e(-f.a/h) g(x+f).

    Zero when s >= rho n.  The output box is deg x_i < max(B_i, r_i n).
    """
    _check_active(params)
    widths = [r * params.n for r in params.system.exponents]
    st = _merge(g.stamp, params.stamp)
    if not params.active:
        return GridFunction(g.field, g.box, np.zeros_like(g.values), st)
    centres = [(c, 1.0) for c in enumerate_centers(params.s, params.system)]
    box, vals = _centre_average(g, widths, centres)
    return GridFunction(g.field, box, vals, st)


def apply_C_piece(g: GridFunction, params: OperatorParams, table=None) -> GridFunction:
    """C_{s,n}: the D_{s,n} kernel with each centre weighted by Lambda(a, h)."""
    _check_active(params)
    widths = [r * params.n for r in params.system.exponents]
    st = _merge(g.stamp, params.stamp)
    if not params.active:
        return GridFunction(g.field, g.box, np.zeros_like(g.values), st)
    if table is None:
        table = gauss_table(params.s, params.system)
    lookup = table.lookup()
    centres = []
    for c in enumerate_centers(params.s, params.system):
        key = (c.a, c.h)
        if key not in lookup:
            raise KeyError(f"Gauss table has no row for {c}")
        centres.append((c, lookup[key]))
    box, vals = _centre_average(g, widths, centres)
    return GridFunction(g.field, box, vals, st)


def apply_C(g: GridFunction, K, n: int, max_s: int | None = None,
            overrides: Overrides | None = None) -> GridFunction:
    """C_n = sum over s < rho n of C_{s,n}; a smaller ``max_s`` truncates and stamps."""
    system = K if isinstance(K, ExponentSystem) else ExponentSystem(tuple(K), g.field)
    p0 = OperatorParams(system, 0, n, overrides)
    top = math.ceil(p0.rho * n) - 1
    truncated = max_s is not None and max_s < top
    last = top if max_s is None else min(max_s, top)
    out = GridFunction.zeros(g.field, g.box)
    for s in range(last + 1):
        out = out + apply_C_piece(g, OperatorParams(system, s, n, overrides))
    if truncated:
        out.stamp = NONCONFORMING
    return out


def build_G(g: GridFunction, params: OperatorParams) -> GridFunction:
    """G_s(x) = q^(-k R_s) sum_{deg b_i < R_s} sum_{deg h = s} sum_{a in A_h} e(-b.a/h) g(x+b)."""
    R = params.Rs
    centres = [(c, 1.0) for c in enumerate_centers(params.s, params.system)]
    box, vals = _centre_average(g, [R] * g.k, centres)
    return GridFunction(g.field, box, vals, _merge(g.stamp, params.stamp))


# -- L_{s,n} ----------------------------------------------------------------------------

@functools.lru_cache(maxsize=32)
def _residue_classes(field: FieldParams, Q: Poly, w: int) -> np.ndarray:
    """Index of (y mod Q) for every y with deg y < w; F_q-linear in the digits of y."""
    R = Q.deg
    count = field.q**w
    check_count(count, "residues")
    basis = np.zeros((w, R), dtype=np.int64)
    for j in range(w):
        c = list((Poly.monomial(field, j) % Q).coeffs)
        basis[j, :len(c)] = c
    digits = index_digits(field, np.arange(count, dtype=np.int64), w)
    if field.m == 1:
        res = (digits @ basis) % field.p
    else:
        res = np.zeros((count, R), dtype=np.int64)
        for j in range(w):
            res = field.add_table[res, field.mul_table[digits[:, j:j + 1], basis[j][None, :]]]
    return digits_to_index(field, res) if R > 0 else np.zeros(count, dtype=np.int64)


def _check_L_range(params: OperatorParams) -> None:
    R = params.Rs
    if any(r * params.n < R for r in params.system.exponents):
        raise RangeError(f"L_(s,n) needs r_i n >= R_s = {R}")
    if not params.relaxed and params.n < params.Hs:
        raise RangeError(f"n = {params.n} is below H_s = max(N_s, R_s^4) = {params.Hs}; "
                         "pass relax_ranges to override")


def _class_sums(values: np.ndarray, field: FieldParams, Q: Poly, widths: Sequence[int]):
    """Per point, the sum of ``values`` over the coset x + Q * {deg u_i < w_i - R}."""
    q, k = field.q, len(widths)
    V = _split(values, q, widths)
    nclass = q**Q.deg
    for i, w in enumerate(widths):
        cls = _residue_classes(field, Q, w)
        order = np.argsort(cls, kind="stable")
        axis = 2 * i + 1
        moved = np.moveaxis(V, axis, -1)
        grouped = moved[..., order].reshape(moved.shape[:-1] + (nclass, -1)).sum(axis=-1)
        V = np.moveaxis(grouped[..., cls], -1, axis)
    return V.reshape(values.shape)


def apply_L(F: GridFunction, params: OperatorParams) -> GridFunction:
    """L_{s,n} F(x) = q^(-sum(r_i n - R_s)) sum_{deg u_i < r_i n - R_s} F(x + Q_s u).

    Points congruent mod Q_s with equal digits above r_i n form the cosets;
    the output box is deg x_i < max(B_i, r_i n).
    """
    _check_L_range(params)
    field, q = F.field, F.field.q
    widths = [r * params.n for r in params.system.exponents]
    box = tuple(max(b, w) for b, w in zip(F.box, widths))
    check_count(math.prod(q**b for b in box), "grid points")
    vals = _class_sums(F.embed(box).values, field, params.Qs, widths)
    norm = float(q ** sum(w - params.Rs for w in widths))
    return GridFunction(field, box, vals / norm, _merge(F.stamp, params.stamp))


@dataclass
class LargeScaleReport:
    max_abs_error: float
    points: int
    stamp: str = CONFORMING

    @property
    def passed(self) -> bool:
        return self.max_abs_error <= 1e-9

    def to_json(self) -> dict:
        return {"maxAbsError": self.max_abs_error, "points": self.points,
                "pass": self.passed, "stamp": self.stamp}


def verify_large_scale_identity(g: GridFunction, params: OperatorParams) -> LargeScaleReport:
    """Pointwise D_{s,n} g = L_{s,n} G_s g on the union of both output boxes."""
    _check_L_range(params)
    lhs = apply_D(g, params)
    rhs = apply_L(build_G(g, params), params)
    a, b = lhs._aligned(rhs)
    return LargeScaleReport(float(np.max(np.abs(a.values - b.values), initial=0.0)),
                            int(a.values.size), _merge(lhs.stamp, rhs.stamp))


# -- checks shared by tests and the CLI ---------------------------------------------------

def plancherel_sides(g: GridFunction) -> tuple[float, float]:
    """(sum |g|^2, q^(-sum B) sum over {b / t^B} of |g^|^2) for g in its box."""
    field, q = g.field, g.field.q
    out = g.values
    # g^(b/t^B) = sum_x g(x) e(-res(x b / t^B)); res picks coefficient B-1 of x b
    for axis in range(g.k):
        mat = _lattice_matrix(field, g.box[axis])
        out = np.moveaxis(np.tensordot(out, mat, axes=([axis], [0])), -1, axis)
    return float(np.sum(np.abs(g.values) ** 2)), float(np.sum(np.abs(out) ** 2) / q ** sum(g.box))


@functools.lru_cache(maxsize=8)
def _lattice_matrix(field: FieldParams, B: int) -> np.ndarray:
    count = field.q**B
    check_count(count * count, "lattice characters")
    xs = index_digits(field, np.arange(count), B)
    mat = np.empty((count, count), dtype=complex)
    for b in range(count):
        # b / t^B has digit j (coefficient of t^-(j+1)) equal to b_{B-1-j}
        bd = index_digits(field, np.array([b]), B)[0][::-1]
        e = (-field.trace_dot(xs, bd)) % field.p
        mat[:, b] = np.exp(2j * np.pi * e / field.p)
    return mat


__all__ = ["GridFunction", "OperatorParams", "random_grid", "apply_M", "fourier_at",
           "multiplier_D", "apply_D", "apply_C_piece", "apply_C", "apply_L", "build_G",
           "verify_large_scale_identity", "LargeScaleReport", "plancherel_sides"]
