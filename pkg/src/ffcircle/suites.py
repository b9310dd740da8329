"""Seeded verification suites behind ``ffcircle verify``.

Each suite returns a SuiteResult; ``passed`` is True iff every exact identity
held within tolerance.  Runs that would exceed the count limit are recorded
as skipped with the reason, and count as failures of the suite.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .arcs import ArcScale, check_disjointness, enumerate_centers, sample_beta_in_box, \
    verify_major_arc_identity
from .config import CONFORMING, NONCONFORMING, Overrides
from .errors import CountLimitError
from .ergodic import build_translation_system, convergence_probe, transference_check
from .expsum import CycloSum, ExponentSystem, weyl_sum
from .ffpoly import FieldParams, Poly, parse_poly
from .functionals import dyadic_maximal_check, weak_11_check
from .operators import GridFunction, OperatorParams, apply_D, random_grid, \
    verify_large_scale_identity
from .torus import random_tail

DEFAULT_SEED = 20240601


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list[str] = dc_field(default_factory=list)
    skipped: list[str] = dc_field(default_factory=list)
    details: dict = dc_field(default_factory=dict)
    stamp: str = CONFORMING

    @property
    def passed(self) -> bool:
        return not self.failures and not self.skipped

    def fail(self, msg: str) -> None:
        if len(self.failures) < 50:
            self.failures.append(msg)
        else:
            self.details["moreFailures"] = self.details.get("moreFailures", 0) + 1

    def to_json(self) -> dict:
        return {"suite": self.name, "pass": self.passed, "checked": self.checked,
                "failures": self.failures, "skipped": self.skipped,
                "details": self.details, "stamp": self.stamp}


def _merge(a: str, b: str) -> str:
    return NONCONFORMING if NONCONFORMING in (a, b) else CONFORMING


# -- orthogonality ----------------------------------------------------------------------

def orthogonality(primes: Sequence[int] = (2, 3), n_max: int = 8, samples: int = 500,
                  seed: int = DEFAULT_SEED, rational_deg: int = 2) -> SuiteResult:
    """sum_{deg f < n} e(f alpha) = q^n 1_{ord alpha < -n}, exactly in Z[zeta_p]."""
    res = SuiteResult("orthogonality")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p in primes:
        field = FieldParams(p)
        K = ExponentSystem((1,), field)
        alphas = []
        for _ in range(samples):
            o = -int(rng.integers(1, 13))
            alphas.append((random_tail(field, 12, rng, exact_ord=o), o))
        alphas.append((random_tail(field, 12, rng, top=13), float("-inf")))
        for s in range(1, rational_deg + 1):
            for c in enumerate_centers(s, K):
                alphas.append((c.coords()[0], c.coords()[0].ord()))
        for alpha, o in alphas:
            for n in range(0, n_max + 1):
                S = weyl_sum([alpha], K, n)
                want = field.q**n if o < -n else 0
                target = CycloSum((want,) + (0,) * (p - 1))
                res.checked += 1
                err = abs(S.value - want)
                worst = max(worst, err)
                if not S.equals(target) or err > 1e-9:
                    res.fail(f"q={p} n={n} alpha={alpha!r}")
    res.details["maxAbsError"] = worst
    return res


# -- major arcs -------------------------------------------------------------------------------

MAJOR_ARC_CASES = (((1,), 9), ((1, 2), 17))


def major_arc(cases=MAJOR_ARC_CASES, betas: int = 50, max_deg_h: int = 1,
              seed: int = DEFAULT_SEED, p: int = 2, overrides: Overrides | None = None) -> SuiteResult:
    """M_n(a/h + beta) = Lambda(a, h) M_n(beta) inside N_n(a, h), plus box disjointness."""
    res = SuiteResult("major-arc")
    rng = np.random.default_rng(seed)
    field = FieldParams(p)
    worst = 0.0
    for K, n in cases:
        system = ExponentSystem(tuple(K), field)
        scale = ArcScale(n, system, overrides)
        res.stamp = _merge(res.stamp, scale.stamp)
        for s in range(min(max_deg_h, scale.max_deg_h) + 1):
            for c in enumerate_centers(s, system):
                for _ in range(betas):
                    beta = sample_beta_in_box(c, scale, rng)
                    rep = verify_major_arc_identity(c, beta, scale)
                    res.checked += 1
                    worst = max(worst, rep.max_abs_error)
                    if not rep.passed:
                        res.fail(f"K={K} n={n} center={c}")
        disj = check_disjointness(scale)
        res.details[f"disjointness K={list(K)} n={n}"] = disj.to_json()
        res.checked += disj.checked
        for a, b in disj.violations:
            res.fail(f"boxes meet: {a} and {b} (K={K}, n={n})")
    res.details["maxAbsError"] = worst
    return res


# -- operators ----------------------------------------------------------------------------------

def large_scale(n: int = 16, s: int = 1, K=(1,), p: int = 2, sparse: int = 5, box: int = 10,
                seed: int = DEFAULT_SEED, overrides: Overrides | None = None) -> SuiteResult:
    """D_{s,n} g = L_{s,n} G_s g pointwise for delta_0 and sparse random g."""
    res = SuiteResult("large-scale")
    rng = np.random.default_rng(seed)
    field = FieldParams(p)
    system = ExponentSystem(tuple(K), field)
    params = OperatorParams(system, s, n, overrides)
    res.stamp = params.stamp
    gs = [GridFunction.delta(field, (box,) * system.k)]
    gs += [random_grid(field, (box,) * system.k, rng, density=0.01) for _ in range(sparse)]
    worst = 0.0
    for i, g in enumerate(gs):
        rep = verify_large_scale_identity(g, params)
        res.checked += rep.points
        worst = max(worst, rep.max_abs_error)
        if not rep.passed:
            res.fail(f"g#{i}: max error {rep.max_abs_error:.3g}")
    res.details["maxAbsError"] = worst
    return res


def projections(grids: int = 20, p: int = 2, K=(1,), box: int = 8, seed: int = DEFAULT_SEED,
                s_override=Fraction(1, 2), dyadic: bool = True) -> SuiteResult:
    """D^2 = D and D_{n2} D_{n1} = D_{n2} for n1 <= n2, at s = 0 and (override) s = 1.

    Also runs the dyadic square-function bound on a few of the grids.
    """
    res = SuiteResult("projections")
    rng = np.random.default_rng(seed)
    field = FieldParams(p)
    system = ExponentSystem(tuple(K), field)
    configs = [OperatorParams(system, 0, 1),
               OperatorParams(system, 1, 1, Overrides(rho=s_override, relax_ranges=True))]
    overall = 0.0
    for base in configs:
        worst = 0.0
        res.stamp = _merge(res.stamp, base.stamp)
        ns = list(range(base.Ns, base.Ns + 4))
        for _ in range(grids):
            g = random_grid(field, (box,) * system.k, rng)
            Ds = {n: apply_D(g, base.at(n)) for n in ns}
            for n in ns:
                twice = apply_D(Ds[n], base.at(n))
                worst = max(worst, twice.max_abs_diff(Ds[n]))
                res.checked += 1
            for n1, n2 in itertools.combinations(ns, 2):
                comp = apply_D(Ds[n1], base.at(n2))
                worst = max(worst, comp.max_abs_diff(Ds[n2]))
                res.checked += 1
        if worst > 1e-9:
            res.fail(f"s={base.s}: projection laws off by {worst:.3g}")
        overall = max(overall, worst)
        if dyadic:
            for _ in range(3):
                g = random_grid(field, (box,) * system.k, rng)
                rep = dyadic_maximal_check(g, base, n_range=(base.Ns, base.Ns + 6))
                res.checked += 1
                res.details.setdefault("dyadic", []).append(rep.to_json())
                if not rep.passed:
                    res.fail(f"s={base.s}: dyadic bound failed ({rep.to_json()})")
    res.details["maxAbsError"] = overall
    return res


def weak11(functions: int = 50, p: int = 2, K=(1,), max_box: int = 10, grid: int = 20,
           seed: int = DEFAULT_SEED) -> SuiteResult:
    """|{L*_s F > alpha}| <= ||F||_1 / alpha, integer-exact, s = 0 and (override) s = 1."""
    res = SuiteResult("weak11")
    rng = np.random.default_rng(seed)
    field = FieldParams(p)
    system = ExponentSystem(tuple(K), field)
    configs = [OperatorParams(system, 0, 1), OperatorParams(system, 1, 1, Overrides(relax_ranges=True))]
    for params in configs:
        res.stamp = _merge(res.stamp, params.stamp)
        for i in range(functions):
            b = int(rng.integers(1, max_box // system.k + 1))
            F = random_grid(field, (b,) * system.k, rng, density=0.3, integer=True)
            total = int(np.abs(F.values).sum())
            if total == 0:
                F = GridFunction.delta(field, F.box)
                total = 1
            # alpha grid spans the range where the level sets are nonempty
            alphas = [Fraction(total * (j + 1), 2 * grid * field.q ** b) + Fraction(1, 7)
                      for j in range(grid)]
            rep = weak_11_check(F, params, alphas)
            res.checked += len(rep.rows)
            if not rep.exact:
                res.fail(f"s={params.s} F#{i}: comparison was not exact")
            for row in rep.rows:
                if not row.passed:
                    res.fail(f"s={params.s} F#{i}: alpha={row.alpha} count={row.count} > {row.bound}")
    return res


# -- ergodic ------------------------------------------------------------------------------------

def transference(pairs: int = 20, p: int = 2, K=(1, 2), big_k: int = 3, modulus: str = "t^2+t+1",
                 seed: int = DEFAULT_SEED) -> SuiteResult:
    """A_n(S_a g)(x) = M_n Phi_{x,K}(a) on sampled (x, a), plus the norm identity."""
    res = SuiteResult("transference")
    rng = np.random.default_rng(seed)
    field = FieldParams(p)
    system = build_translation_system(parse_poly(field, modulus), d=len(K))
    g = rng.integers(0, 5, size=system.size)
    rep = transference_check(system, g, ExponentSystem(tuple(K), field), big_k, samples=pairs,
                             seed=seed)
    res.checked = rep.checked
    res.details = rep.to_json()
    if not rep.passed:
        res.fail(f"transference error {rep.max_abs_error:.3g}")
    return res


def stabilization(primes: Sequence[int] = (2, 3), max_deg: int = 3,
                  exponent_sets=((1,), (3,)), seed: int = DEFAULT_SEED) -> SuiteResult:
    """A_n g is constant for n >= deg h on every X = F_q[t]/h with deg h <= max_deg."""
    res = SuiteResult("stabilization")
    rng = np.random.default_rng(seed)
    for p in primes:
        field = FieldParams(p)
        for d in range(1, max_deg + 1):
            for idx in range(field.q**d, 2 * field.q**d):
                h = Poly.from_index(field, idx)
                system = build_translation_system(h)
                g = rng.integers(0, 7, size=system.size)
                for K in exponent_sets:
                    tr = convergence_probe(system, g, K, d + 3)
                    res.checked += 1
                    if tr.stabilization is None or tr.stabilization > d:
                        res.fail(f"q={p} h={h} K={K}: stabilizes at {tr.stabilization}")
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "orthogonality": orthogonality,
    "major-arc": major_arc,
    "large-scale": large_scale,
    "weak11": weak11,
    "transference": transference,
    "projections": projections,
}


def run_suite(name: str, seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    names = list(SUITES) if name == "all" else [name]
    out = []
    for nm in names:
        if nm not in SUITES:
            raise KeyError(nm)
        try:
            out.append(SUITES[nm](seed=seed))
        except CountLimitError as exc:
            r = SuiteResult(nm)
            r.skipped.append(str(exc))
            out.append(r)
    return out


__all__ = ["SuiteResult", "DEFAULT_SEED", "SUITES", "run_suite", "orthogonality", "major_arc",
           "large_scale", "projections", "weak11", "transference", "stabilization"]
