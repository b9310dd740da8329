"""Lucas order, shadows, brute-force rational approximation and empirical decay fits.

None of the fitted constants here is a theorem constant; they summarise what
the sampled sums did.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .arcs import ArcScale, classify
from .config import check_count
from .errors import PrecisionError
from .expsum import ExponentSystem, weyl_sum
from .ffpoly import NEG_INF, FieldParams, Poly
from .torus import TailSeries, expand_rational, mul_poly_tail, ord_of, random_tail


def _digits(x: int, p: int) -> list[int]:
    out = []
    while x:
        x, d = divmod(x, p)
        out.append(d)
    return out


def lucas_leq(j: int, r: int, p: int) -> bool:
    """j <=_p r: every base-p digit of j is at most the matching digit of r."""
    dj, dr = _digits(j, p), _digits(r, p)
    if len(dj) > len(dr):
        return False
    return all(a <= b for a, b in zip(dj, dr))


def binom_mod_p(r: int, j: int, p: int) -> int:
    """C(r, j) mod p as the product of digit binomials."""
    if j < 0 or j > r:
        return 0
    out = 1
    dr, dj = _digits(r, p), _digits(j, p)
    dj += [0] * (len(dr) - len(dj))
    for a, b in zip(dr, dj):
        if b > a:
            return 0
        out = out * math.comb(a, b) % p
    return out


def _check_K(K: Iterable[int]) -> list[int]:
    ks = sorted(set(int(r) for r in K))
    if not ks:
        raise ValueError("K must be nonempty")
    if ks[0] < 1:
        raise ValueError("exponents must be >= 1")
    return ks


def shadow(K: Iterable[int], p: int, method: str = "digits") -> set[int]:
    """S(K) = {j >= 1 : j <=_p r for some r in K}."""
    ks = _check_K(K)
    out: set[int] = set()
    if method == "digits":
        for r in ks:
            dr = _digits(r, p)
            for combo in product(*(range(d + 1) for d in dr)):
                j = sum(c * p**i for i, c in enumerate(combo))
                if j:
                    out.add(j)
    elif method == "binomial":
        for r in ks:
            out.update(j for j in range(1, r + 1) if binom_mod_p(r, j, p))
    else:
        raise ValueError(f"unknown method {method!r}")
    return out


def k_star(K: Iterable[int], p: int, method: str = "digits") -> set[int]:
    """K* = {k in K : p does not divide k and p^nu k is outside S(K) for all nu >= 1}."""
    ks = _check_K(K)
    S = shadow(ks, p, method)
    top = max(S)
    out = set()
    for k in ks:
        if k % p == 0:
            continue
        m = k * p
        ok = True
        while m <= top:
            if m in S:
                ok = False
                break
            m *= p
        if ok:
            out.add(k)
    return out


def maximal_elements(K: Iterable[int], p: int) -> set[int]:
    ks = _check_K(K)
    return {r for r in ks if not any(r != s and lucas_leq(r, s, p) for s in ks)}


@dataclass(frozen=True)
class ShadowReport:
    K: frozenset
    p: int
    shadow: frozenset
    k_star: frozenset
    maximal: frozenset

    def to_json(self) -> dict:
        return {"K": sorted(self.K), "p": self.p, "shadow": sorted(self.shadow),
                "kStar": sorted(self.k_star), "maximal": sorted(self.maximal)}


def shadow_report(K: Iterable[int], p: int) -> ShadowReport:
    ks = _check_K(K)
    return ShadowReport(frozenset(ks), p, frozenset(shadow(ks, p)), frozenset(k_star(ks, p)),
                        frozenset(maximal_elements(ks, p)))


# -- rational approximation ---------------------------------------------------------------

@dataclass(frozen=True)
class ApproxWitness:
    i: int
    a: Poly
    g: Poly
    ord_gap: float
    deg_g: int

    def to_json(self) -> dict:
        return {"i": self.i, "a": str(self.a), "g": str(self.g),
                "ordGap": None if self.ord_gap == NEG_INF else int(self.ord_gap),
                "ordGapBelow": getattr(self.ord_gap, "precision", None),
                "degG": self.deg_g}


def _frac_orders(alpha: TailSeries, d: int) -> np.ndarray:
    """ord of the fractional part of g * alpha for every monic g of degree d.

    Digit l (coefficient of t^-l) of g * alpha is sum_i g_i alpha_{l+i}: a
    Hankel product.  Entries are -(first nonzero l), or 0 when every digit up
    to precision N - d vanishes.
    """
    field = alpha.field
    N = alpha.precision
    width = N - d
    if width < 1:
        raise PrecisionError(f"precision {N} too small for deg g = {d}")
    count = field.q**d
    check_count(count, "monic denominators")
    digs = alpha.digits
    q = field.q
    idx = np.arange(count, dtype=np.int64)
    first = np.zeros(count, dtype=np.int64)
    alive = idx
    # filter column by column: about 1/q of the candidates survive each step
    for l in range(1, width + 1):
        if alive.size == 0:
            break
        acc = np.full(alive.size, digs[l + d - 1], dtype=np.int64)
        for i in range(d):
            a = digs[l + i - 1]
            if not a:
                continue
            gi = (alive // q**i) % q
            if field.m == 1:
                acc = acc + gi * a
            else:
                acc = field.add_table[acc, field.mul_table[gi, a]]
        if field.m == 1:
            acc %= field.p
        hit = acc != 0
        first[alive[hit]] = l
        alive = alive[~hit]
    return -first


def best_rational_approx(alpha: TailSeries, rn: int = 0, max_deg: int = 1, i: int = 0) -> ApproxWitness:
    """Monic g with deg g <= max_deg minimising ord(g alpha - a), a the polynomial part.

    Ties go to smaller deg g, then to the canonical order.  A gap that vanishes
    to the available precision N - deg g is reported as BelowPrecision.
    """
    N = alpha.precision
    if N - max_deg < max(rn, 0) + 1:
        raise PrecisionError(f"precision {N} is too small for rn = {rn}, maxDeg = {max_deg}")
    best = None  # (key, d, j)
    for d in range(max_deg + 1):
        orders = _frac_orders(alpha, d)
        # vanishing to precision N - d means ord < -(N - d)
        keys = np.where(orders == 0, -(N - d) - 1, orders)
        j = int(np.argmin(keys))
        key = int(keys[j])
        if best is None or key < best[0]:
            best = (key, d, j)
    key, d, j = best
    g = Poly.from_index(alpha.field, alpha.field.q**d + j)
    a, frac = mul_poly_tail(g, alpha)
    gap = ord_of(frac)
    return ApproxWitness(i, a, g, gap, d)


def approx_need(alpha: TailSeries, rn: int, max_deg: int | None = None) -> tuple[int, ApproxWitness]:
    """Smallest B with some monic g, deg g <= B and ord(g alpha - a) < -rn + B.

    B <= rn always (g = 1), so the search stops once deg g reaches the best B.
    """
    N = alpha.precision
    best_need, best_w = None, None
    top = rn if max_deg is None else min(rn, max_deg)
    for d in range(top + 1):
        if best_need is not None and d >= best_need:
            break
        if N - d < 1:
            break
        orders = _frac_orders(alpha, d)
        gaps = np.where(orders == 0, -(N - d) - 1, orders)
        need = np.maximum(d, gaps + rn + 1)
        j = int(np.argmin(need))
        if best_need is None or int(need[j]) < best_need:
            best_need = int(need[j])
            g = Poly.from_index(alpha.field, alpha.field.q**d + j)
            a, frac = mul_poly_tail(g, alpha)
            best_w = ApproxWitness(0, a, g, ord_of(frac), d)
    return best_need, best_w




def _coprime_system(K, field: FieldParams) -> ExponentSystem:
    system = K if isinstance(K, ExponentSystem) else ExponentSystem(tuple(K), field)
    if not all(system.coprime_flags):
        raise ValueError("every exponent must be coprime to p; restrict to K* for this mode")
    return system


# -- Weyl inverse verification ----------------------------------------------------------------

@dataclass
class InverseSample:
    eta: float
    needs: tuple[int, ...]
    witnesses: tuple[ApproxWitness, ...]
    kind: str


@dataclass
class InverseReport:
    samples: list[InverseSample]
    excluded_zero: int
    C_hat: float | None
    D_hat: float | None
    D_cover: float | None
    residuals: list[float] = dc_field(default_factory=list)

    @property
    def all_satisfied(self) -> bool:
        return all(all(n is not None for n in s.needs) for s in self.samples)

    def to_json(self) -> dict:
        return {"samples": len(self.samples), "excludedZero": self.excluded_zero,
                "C_hat": self.C_hat, "D_hat": self.D_hat, "D_cover": self.D_cover,
                "allSatisfied": self.all_satisfied,
                "frontier": [{"eta": s.eta, "need": list(s.needs), "kind": s.kind}
                             for s in self.samples]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eta", "need", "kind"])
        for s in self.samples:
            w.writerow([f"{s.eta:.12g}", max(s.needs), s.kind])
        return buf.getvalue()


def verify_weyl_inverse(K, field: FieldParams, n: int, trials: int = 200, eta_max: float | None = None,
                        seed: int = 0, rational_fraction: float = 0.5,
                        max_deg: int | None = None) -> InverseReport:
    """Measure eta = n - log_q |S| and the smallest approximation budget per sample.

    Half the samples (by default) are a/h + beta with small deg h and tiny beta;
    the rest are uniform.  Samples with S = 0 are excluded.  The frontier
    max_i need_i against eta is fitted by least squares (C_hat, D_hat); D_cover
    is the smallest D with need <= C_hat eta + D on every sample.
    """
    system = _coprime_system(K, field)
    rng = np.random.default_rng(seed)
    q = field.q
    prec = 2 * system.r_star * n + 2
    samples, excluded = [], 0
    eta_max = n if eta_max is None else eta_max
    for _ in range(trials):
        if rng.random() < rational_fraction:
            s = int(rng.integers(0, max(1, n // (2 * system.r_star)) + 1))
            h = Poly.from_index(field, q**s + int(rng.integers(q**s)))
            alphas = []
            for r in system.exponents:
                a = Poly.from_index(field, int(rng.integers(q**s))) if s else Poly(field)
                base = TailSeries(field, prec) if s == 0 else expand_rational(a, h, prec)
                beta = random_tail(field, prec, rng, top=r * n + 1)
                alphas.append(base + beta)
            kind = "rational"
        else:
            alphas = [random_tail(field, prec, rng) for _ in system.exponents]
            kind = "random"
        S = abs(weyl_sum(alphas, system, n).value)
        if S < 1e-9:
            excluded += 1
            continue
        eta = n - math.log(S, q)
        if eta > eta_max + 1e-12:
            continue
        needs, wits = [], []
        for i, (alpha, r) in enumerate(zip(alphas, system.exponents)):
            need, w = approx_need(alpha, r * n, max_deg)
            needs.append(need)
            wits.append(ApproxWitness(i, w.a, w.g, w.ord_gap, w.deg_g))
        samples.append(InverseSample(eta, tuple(needs), tuple(wits), kind))
    C_hat = D_hat = D_cover = None
    residuals: list[float] = []
    if len(samples) >= 2:
        x = np.array([s.eta for s in samples])
        y = np.array([max(s.needs) for s in samples], dtype=float)
        if np.ptp(x) > 0:
            C_hat, D_hat = (float(v) for v in np.polyfit(x, y, 1))
        else:
            C_hat, D_hat = 0.0, float(y.mean())
        residuals = list(y - (C_hat * x + D_hat))
        D_cover = float(np.max(y - C_hat * x))
    return InverseReport(samples, excluded, C_hat, D_hat, D_cover, residuals)


# -- decay profiles ------------------------------------------------------------------------------

@dataclass
class DecayRow:
    n: int
    delta: int
    max_abs: float | None
    samples: int
    flag: str = ""


@dataclass
class DecayProfile:
    rows: list[DecayRow]
    c_hat: float | None
    intercept: float | None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "delta", "max_abs", "samples", "flag"])
        for r in self.rows:
            w.writerow([r.n, r.delta, "" if r.max_abs is None else f"{r.max_abs:.15g}",
                        r.samples, r.flag])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"c_hat": self.c_hat, "intercept": self.intercept,
                "rows": [{"n": r.n, "delta": r.delta, "maxAbs": r.max_abs,
                          "samples": r.samples, "flag": r.flag} for r in self.rows]}


def decay_profile(K, field: FieldParams, i: int, n_range: Sequence[int], delta_range: Sequence[int],
                  samples: int = 50, seed: int = 0) -> DecayProfile:
    """max |M_n(beta)| over beta with ord beta_i = Delta - r_i n and ord beta_j <= Delta - r_j n.

    Rows with Delta <= 0 carry the trivial bound 1 and are flagged; rows with
    Delta >= n/2 are flagged and skipped.  c_hat is the least-squares slope of
    -log_q(max) against Delta over the computed rows with a nonzero maximum,
    so |M_n| ~ q^(intercept - c_hat Delta); None when no such row exists.
    """
    system = _coprime_system(K, field)
    if not 0 <= i < system.k:
        raise ValueError("coordinate index out of range")
    rng = np.random.default_rng(seed)
    q = field.q
    rows = []
    for n in n_range:
        prec = system.r_star * (n - 1) + 1
        for delta in delta_range:
            if delta <= 0:
                rows.append(DecayRow(n, delta, 1.0, 0, "trivial"))
                continue
            if 2 * delta >= n:
                rows.append(DecayRow(n, delta, None, 0, "out-of-range"))
                continue
            best = 0.0
            for _ in range(samples):
                beta = []
                for j, r in enumerate(system.exponents):
                    order = delta - r * n
                    p_j = max(prec, -order)
                    if j == i:
                        beta.append(random_tail(field, p_j, rng, exact_ord=order))
                    else:
                        beta.append(random_tail(field, p_j, rng, top=-order))
                best = max(best, abs(weyl_sum(beta, system, n).value) / q**n)
            rows.append(DecayRow(n, delta, best, samples))
    pts = [(r.delta, -math.log(r.max_abs, q)) for r in rows
           if r.flag == "" and r.max_abs is not None and r.max_abs > 1e-12]
    c_hat = intercept = None
    deltas = {d for d, _ in pts}
    if len(deltas) >= 2:
        x = np.array([d for d, _ in pts], dtype=float)
        y = np.array([v for _, v in pts])
        slope, icpt = np.polyfit(x, y, 1)
        c_hat, intercept = float(slope), float(-icpt)
    return DecayProfile(rows, c_hat, intercept)


def delta_increment(beta_ord: int, r: int, n: int) -> int:
    """Delta_n = ord beta + r n; Delta_{n+1} - Delta_n = r >= 1."""
    return beta_ord + r * n


# -- minor-arc scan ------------------------------------------------------------------------------

@dataclass
class MinorScan:
    rows: list[tuple[int, float, int]]  # (n, max |M_n|, minor samples)
    slope: float | None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "max_abs", "minor_samples"])
        for n, m, c in self.rows:
            w.writerow([n, f"{m:.15g}", c])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"slope": self.slope,
                "rows": [{"n": n, "maxAbs": m, "minorSamples": c} for n, m, c in self.rows]}


def minor_arc_scan(K, field: FieldParams, n_range: Sequence[int], samples: int = 200,
                   seed: int = 0, overrides=None) -> MinorScan:
    """Per n, max |M_n(alpha)| over seeded random alpha classified Minor at scale n.

    ``slope`` is the least-squares slope of log_q(max) against n.
    """
    system = K if isinstance(K, ExponentSystem) else ExponentSystem(tuple(K), field)
    rng = np.random.default_rng(seed)
    q = field.q
    rows = []
    for n in n_range:
        scale = ArcScale(n, system, overrides)
        prec = max(system.r_star * (n - 1) + 1, -min(scale.box_cutoffs) + 1)
        best, kept = 0.0, 0
        for _ in range(samples):
            alpha = [random_tail(field, prec, rng) for _ in system.exponents]
            if classify(alpha, scale).major:
                continue
            kept += 1
            best = max(best, abs(weyl_sum(alpha, system, n).value) / q**n)
        rows.append((n, best, kept))
    pts = [(n, math.log(m, q)) for n, m, c in rows if m > 0]
    slope = None
    if len(pts) >= 2:
        slope = float(np.polyfit([a for a, _ in pts], [b for _, b in pts], 1)[0])
    return MinorScan(rows, slope)


__all__ = ["lucas_leq", "binom_mod_p", "shadow", "k_star", "maximal_elements", "ShadowReport",
           "shadow_report", "ApproxWitness", "best_rational_approx", "approx_need",
           "InverseSample", "InverseReport", "verify_weyl_inverse", "DecayRow", "DecayProfile",
           "decay_profile", "delta_increment", "MinorScan", "minor_arc_scan"]
