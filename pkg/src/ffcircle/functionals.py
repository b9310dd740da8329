"""Oscillation, maximal functions, the coset maximal operator L*_s and the dyadic bound.

Every supremum over an infinite range of n is replaced by a finite one.  For
the coset averages L_{s,n}|F| the range can be cut exactly: once r_i n >= B_i
the coset of x meets the whole support class of F, after which the sum is
constant and the normalisation only grows.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .arcs import RationalPoint, enumerate_centers
from .config import CONFORMING, NONCONFORMING, check_count
from .errors import RangeError
from .ffpoly import Poly
from .operators import (GridFunction, OperatorParams, _class_sums, _merge, apply_D,
                        multiplier_D)


@dataclass(frozen=True)
class CutPoints:
    """n_1 < ... < n_t0 with t0 >= 2."""

    points: tuple[int, ...]

    def __post_init__(self):
        pts = tuple(int(x) for x in self.points)
        if len(pts) < 2:
            raise ValueError("at least two cut points are needed")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("cut points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class ValueSequence:
    """Values a_n for n = start, start + 1, ..."""

    start: int
    values: tuple

    @classmethod
    def of(cls, data, start: int = 1) -> ValueSequence:
        if isinstance(data, ValueSequence):
            return data
        if isinstance(data, Mapping):
            lo, hi = min(data), max(data)
            missing = [n for n in range(lo, hi + 1) if n not in data]
            if missing:
                raise ValueError(f"sequence has gaps at {missing}")
            return cls(lo, tuple(data[n] for n in range(lo, hi + 1)))
        return cls(start, tuple(data))

    def __getitem__(self, n: int):
        return self.values[n - self.start]

    @property
    def stop(self) -> int:
        return self.start + len(self.values)


def _cuts(cuts) -> CutPoints:
    return cuts if isinstance(cuts, CutPoints) else CutPoints(tuple(cuts))


def oscillation(seq, cuts, start: int = 1) -> float:
    """(sum_j sup_{n_j <= n < n_{j+1}} |a_n - a_{n_{j+1}}|^2)^(1/2)."""
    seq = ValueSequence.of(seq, start)
    cuts = _cuts(cuts)
    if cuts.points[0] < seq.start or cuts.points[-1] >= seq.stop:
        raise RangeError("the sequence does not cover the cut range")
    total = 0.0
    pts = cuts.points
    for lo, hi in zip(pts, pts[1:]):
        end = seq[hi]
        total += max(abs(seq[n] - end) ** 2 for n in range(lo, hi))
    return math.sqrt(total)


def _stack(op_seq: Sequence[GridFunction]) -> tuple[GridFunction, np.ndarray]:
    if not op_seq:
        raise ValueError("empty operator sequence")
    first = op_seq[0]
    for g in op_seq[1:]:
        if g.k != first.k or g.field != first.field:
            raise ValueError("grid functions of different shapes")
    box = tuple(max(g.box[i] for g in op_seq) for i in range(first.k))
    return GridFunction.zeros(first.field, box), np.stack([g.embed(box).values for g in op_seq])


def pointwise_oscillation(op_seq: Sequence[GridFunction], cuts, start: int = 1) -> GridFunction:
    """O(A_n g)(x) at every point, for A_n g = op_seq[n - start]."""
    cuts = _cuts(cuts)
    shell, arr = _stack(op_seq)
    if cuts.points[0] < start or cuts.points[-1] >= start + len(op_seq):
        raise RangeError("the sequence does not cover the cut range")
    total = np.zeros(arr.shape[1:])
    pts = cuts.points
    for lo, hi in zip(pts, pts[1:]):
        diff = np.abs(arr[lo - start:hi - start] - arr[hi - start]) ** 2
        total += diff.max(axis=0)
    shell.values = np.sqrt(total).astype(complex)
    shell.stamp = _merge(*(g.stamp for g in op_seq))
    return shell


def oscillation_norm(op_seq: Sequence[GridFunction], cuts, start: int = 1) -> float:
    """l^2 norm over x of the pointwise oscillation."""
    return pointwise_oscillation(op_seq, cuts, start).norm()


def maximal_sup(op_seq: Sequence[GridFunction]) -> GridFunction:
    """Pointwise sup_n |A_n g| over the given finite range."""
    shell, arr = _stack(op_seq)
    shell.values = np.abs(arr).max(axis=0).astype(complex)
    shell.stamp = _merge(*(g.stamp for g in op_seq))
    return shell


# -- the coset maximal operator -------------------------------------------------------

@dataclass
class HLResult:
    """L*_s F on a finite box, with the bookkeeping that makes it exact there.

    ``tail_bound`` bounds every L_{s,n}|F| with n > n_max, anywhere; outside
    ``values.box`` nothing larger than ``tail_bound`` occurs.
    """

    values: GridFunction
    n_min: int
    n_max: int
    stabilization: int
    tail_bound: float
    stamp: str = CONFORMING


def _start(params: OperatorParams, n_min: int | None) -> int:
    R = params.Rs
    low = max(-(-R // r) if R else 1 for r in params.system.exponents)
    if n_min is None:
        n_min = params.Hs if not params.relaxed else low
    if n_min < params.Hs and not params.relaxed:
        raise RangeError(f"sup starts at H_s = {params.Hs}; pass relax_ranges to start at {n_min}")
    return max(n_min, low, 1)


def stabilization_index(F: GridFunction, params: OperatorParams, n_min: int) -> int:
    """Smallest n >= n_min with r_i n >= B_i for every i."""
    need = max(-(-b // r) for b, r in zip(F.box, params.system.exponents))
    return max(n_min, need)


def _level_sums(F: np.ndarray, box_in, params: OperatorParams, n: int, box_out) -> np.ndarray:
    field = params.field
    G = GridFunction(field, box_in, F).embed(box_out).values
    return _class_sums(G, field, params.Qs, [r * n for r in params.system.exponents])


def hl_maximal(F: GridFunction, params: OperatorParams, n_min: int | None = None,
               n_max: int | None = None) -> HLResult:
    """sup_{n >= H_s} L_{s,n}|F|(x), exact on the box deg x_i < max(B_i, r_i n_max).

    ``n_max`` defaults to the stabilization index, beyond which every average
    is a full class sum with a larger normalisation.
    """
    start = _start(params, n_min)
    stab = stabilization_index(F, params, start)
    top = max(stab, start) if n_max is None else max(n_max, stab)
    field, q = F.field, F.field.q
    K = params.system.exponents
    box = tuple(max(b, r * top) for b, r in zip(F.box, K))
    check_count(math.prod(q**b for b in box) * (top - start + 1), "maximal-function terms")
    absF = np.abs(F.values)
    best = np.zeros(tuple(q**b for b in box))
    for n in range(start, top + 1):
        sums = _level_sums(absF, F.box, params.at(n), n, box)
        best = np.maximum(best, sums / float(q ** sum(r * n - params.Rs for r in K)))
    tail = float(absF.sum()) / q ** sum(r * (top + 1) - params.Rs for r in K)
    st = _merge(F.stamp, params.stamp)
    return HLResult(GridFunction(field, box, best, st), start, top, stab, tail, st)


@dataclass
class WeakRow:
    alpha: Fraction | float
    count: int
    bound: Fraction | float
    passed: bool


@dataclass
class WeakReport:
    rows: list[WeakRow]
    n_min: int
    n_max: int
    stabilization: int
    exact: bool
    stamp: str = CONFORMING

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_json(self) -> dict:
        return {"rows": [{"alpha": str(r.alpha), "count": r.count, "bound": str(r.bound),
                          "pass": r.passed} for r in self.rows],
                "nMin": self.n_min, "nMax": self.n_max, "stabilization": self.stabilization,
                "exact": self.exact, "pass": self.passed, "stamp": self.stamp}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "count", "bound"])
        for r in self.rows:
            w.writerow([str(r.alpha), r.count, str(r.bound)])
        return buf.getvalue()


def weak_11_check(F: GridFunction, params: OperatorParams, alphas: Sequence,
                  n_min: int | None = None) -> WeakReport:
    """Count {x : L*_s F(x) > alpha} exactly and compare it with ||F||_1 / alpha.

    The range of n is extended until ||F||_1 q^(-sum(r_i(n+1) - R_s)) <= min alpha,
    so no scale outside it and no point outside its box can enter a level set.
    With integer-valued F and rational alpha every comparison is in integers.
    """
    if not alphas or any(a <= 0 for a in alphas):
        raise ValueError("alphas must be positive")
    start = _start(params, n_min)
    field, q = F.field, F.field.q
    K = params.system.exponents
    R = params.Rs
    absF = np.abs(F.values)
    exact = bool(np.all(absF == np.round(absF))) and all(
        isinstance(a, (int, Fraction)) for a in alphas)
    l1 = int(round(absF.sum())) if exact else float(absF.sum())
    a_min = min(alphas)
    top = stabilization_index(F, params, start)
    while l1 > a_min * q ** sum(r * (top + 1) - R for r in K):
        top += 1
    box = tuple(max(b, r * top) for b, r in zip(F.box, K))
    check_count(math.prod(q**b for b in box) * (top - start + 1), "maximal-function terms")
    hit = {a: np.zeros(tuple(q**b for b in box), dtype=bool) for a in alphas}
    data = np.round(absF).astype(np.int64) if exact else absF
    for n in range(start, top + 1):
        sums = _level_sums(data, F.box, params.at(n), n, box)
        size = q ** sum(r * n - R for r in K)
        for a in alphas:
            if exact:
                a = Fraction(a)
                # S > a * size  <=>  S > floor(a * size) for integer S
                thr = (a.numerator * size) // a.denominator
                hit[a] |= sums.real.astype(np.int64) > thr
            else:
                hit[a] |= sums.real > a * size
    rows = []
    for a in alphas:
        count = int(hit[a].sum())
        if exact:
            bound = Fraction(l1) / Fraction(a)
            ok = count <= bound
        else:
            bound = l1 / a
            ok = count <= bound * (1 + 1e-12)
        rows.append(WeakRow(a, count, bound, ok))
    st = _merge(F.stamp, params.stamp)
    return WeakReport(rows, start, top, stabilization_index(F, params, start), exact, st)


# -- Vitali selection ---------------------------------------------------------------------

def _in_subgroup(y: Sequence[Poly], params: OperatorParams, n: int) -> bool:
    """y in B_{Q_s,n} = {Q_s u : deg u_i < r_i n - R_s}."""
    Q = params.Qs
    return all((yi % Q).is_zero() and yi.deg < r * n for yi, r in zip(y, params.system.exponents))


def vitali_select(requests: Sequence[tuple[Sequence[Poly], int]],
                  params: OperatorParams) -> list[tuple[tuple[Poly, ...], int]]:
    """Greedy disjoint subfamily of the translates x + B_{Q_s,n_x} covering every x.

    Repeatedly take an uncovered request of largest n (ties: canonical point
    order).  Translates nest, so each one meeting a chosen one lies inside it.
    """
    reqs = [(tuple(x), int(n)) for x, n in requests]
    for _, n in reqs:
        if n < params.Hs and not params.relaxed:
            raise RangeError(f"scale {n} is below H_s = {params.Hs}")
    order = sorted(range(len(reqs)),
                   key=lambda i: (-reqs[i][1], tuple(p.index for p in reqs[i][0])))
    chosen: list[tuple[tuple[Poly, ...], int]] = []
    for i in order:
        x, n = reqs[i]
        covered = any(_in_subgroup([a - b for a, b in zip(x, c)], params, m) for c, m in chosen)
        if not covered:
            chosen.append((x, n))
    return chosen


def translates_disjoint(chosen, params: OperatorParams) -> bool:
    for i, (x1, n1) in enumerate(chosen):
        for x2, n2 in chosen[i + 1:]:
            if _in_subgroup([a - b for a, b in zip(x1, x2)], params, max(n1, n2)):
                return False
    return True


# -- dyadic (Rademacher-Menshov) bound ----------------------------------------------------

@dataclass
class DyadicReport:
    lhs: float
    middle: float
    bound: float
    norm_sq: float
    M: int
    L: int
    n_range: tuple[int, int]
    cap: int
    frequency_max: int
    frequencies: int
    stamp: str = CONFORMING

    @property
    def ratio(self) -> float:
        return self.lhs / self.norm_sq if self.norm_sq else 0.0

    @property
    def passed(self) -> bool:
        tol = 1e-9 * max(1.0, self.bound)
        return (self.lhs <= self.middle + tol and self.middle <= self.bound + tol
                and self.frequency_max <= 1)

    def to_json(self) -> dict:
        return {"bound": self.bound, "attained": self.lhs, "ratio": self.ratio,
                "ratioBound": (self.M + 1) ** 2, "dyadicSum": self.middle, "M": self.M,
                "L": self.L, "nRange": list(self.n_range), "cap": self.cap,
                "frequencyMax": self.frequency_max, "frequencies": self.frequencies,
                "pass": self.passed, "stamp": self.stamp}


def dyadic_maximal_check(g: GridFunction, params: OperatorParams,
                         n_range: tuple[int, int] | None = None, cap: int = 2**10,
                         frequencies: Sequence | None = None,
                         projections: Sequence[GridFunction] | None = None) -> DyadicReport:
    """Materialise P_m = D_{s,T-m} and check the two dyadic inequalities.

    ``n_range`` = [lo, T) defaults to [N_s, min(R_s^4, N_s + cap)).  Checked:
    sum_x sup_m |P_m g|^2 <= (M+1) sum_l sum_d ||(P_{(d+1)2^l} - P_{d 2^l}) g||^2
    <= (M+1)^2 ||g||^2, and, at each sampled frequency and level l,
    sum_d |P^_{(d+1)2^l} - P^_{d 2^l}|^2 <= 1 in exact integers.
    """
    lo, hi = n_range if n_range is not None else (params.Ns, min(params.Rs**4, params.Ns + cap))
    hi = min(hi, lo + cap)
    L = hi - lo
    st = _merge(g.stamp, params.stamp)
    if L <= 0:
        return DyadicReport(0.0, 0.0, 0.0, g.norm() ** 2, 0, 0, (lo, hi), cap, 0, 0, st)
    M = math.ceil(math.log2(L)) if L > 1 else 0
    if projections is None:
        projections = [apply_D(g, params.at(n)) for n in range(lo, hi)]
    if len(projections) != L:
        raise ValueError("need one projection per n in the range")
    shell, arr = _stack(list(projections) + [g])
    zero = np.zeros_like(arr[0])

    def P(m: int) -> np.ndarray:
        # P_0 = 0, P_m = D_{T-m} for m <= L, then constant D_{lo}
        if m == 0:
            return zero
        return arr[hi - max(1, min(m, L)) - lo] if m <= L else arr[0]

    lhs = float(np.sum(np.max(np.abs(arr[:L]) ** 2, axis=0)))
    dyadic = 0.0
    for l in range(M + 1):
        for d in range(2 ** (M - l)):
            dyadic += float(np.sum(np.abs(P((d + 1) * 2**l) - P(d * 2**l)) ** 2))
    norm_sq = g.norm() ** 2
    freq_max, nfreq = 0, 0
    if frequencies is None:
        frequencies = []
        for s in range(params.s + 2):
            frequencies.extend(enumerate_centers(s, params.system))
    for alpha in frequencies:
        nfreq += 1
        hats = {}

        def Ph(m: int) -> int:
            if m == 0:
                return 0
            n = hi - m if m <= L else lo
            if n not in hats:
                hats[n] = multiplier_D(alpha, params.at(n))
            return hats[n]

        for l in range(M + 1):
            total = sum((Ph((d + 1) * 2**l) - Ph(d * 2**l)) ** 2 for d in range(2 ** (M - l)))
            freq_max = max(freq_max, total)
    return DyadicReport(lhs, (M + 1) * dyadic, (M + 1) ** 2 * norm_sq, norm_sq, M, L,
                        (lo, hi), cap, freq_max, nfreq, st)


__all__ = ["CutPoints", "ValueSequence", "oscillation", "pointwise_oscillation",
           "oscillation_norm", "maximal_sup", "HLResult", "hl_maximal", "stabilization_index",
           "WeakRow", "WeakReport", "weak_11_check", "vitali_select", "translates_disjoint",
           "DyadicReport", "dyadic_maximal_check"]
