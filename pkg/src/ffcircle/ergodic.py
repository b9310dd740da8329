"""Translation systems on (F_q[t]/h)^d and their polynomial ergodic averages.

A point of X is stored as an integer: the polynomial indices of its d
residues concatenated in base q^(deg h).  Translations are then digitwise
additions of indices, the same primitive the grid operators use.

Because x + c f^e v mod h only depends on f mod h, writing f = h y + z shows
that for n >= deg h every residue z is hit exactly q^(n - deg h) times.  The
normalised averages therefore stop changing at n = deg h; the probe below
certifies this exactly rather than estimating a limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import check_count
from .errors import FieldMismatchError
from .expsum import ExponentSystem
from .ffpoly import FieldParams, Poly, enumerate_degree_lt, index_add
from .normalform import NormalForm
from .operators import GridFunction, apply_M


@dataclass(frozen=True)
class FiniteSystem:
    """X = (F_q[t]/h)^d with l commuting translation actions T^(j)_a x = x + a v_j."""

    h: Poly
    d: int
    directions: tuple[tuple[Poly, ...], ...]

    def __post_init__(self):
        if self.h.is_zero() or not self.h.is_monic() or self.h.deg < 1:
            raise ValueError("h must be monic of degree >= 1")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        dirs = tuple(tuple(v % self.h for v in vec) for vec in self.directions)
        if not dirs:
            raise ValueError("at least one action is needed")
        if any(len(v) != self.d for v in dirs):
            raise ValueError("every direction needs d components")
        if any(c.field != self.h.field for v in dirs for c in v):
            raise FieldMismatchError("directions over a different field")
        check_count(self.h.field.q ** (self.h.deg * self.d), "system points")
        object.__setattr__(self, "directions", dirs)

    @property
    def field(self) -> FieldParams:
        return self.h.field

    @property
    def n_actions(self) -> int:
        return len(self.directions)

    @property
    def width(self) -> int:
        """Total number of base-q digits of a point index."""
        return self.h.deg * self.d

    @property
    def size(self) -> int:
        return self.field.q ** self.width

    def encode(self, residues: Sequence[Poly]) -> int:
        D, q = self.h.deg, self.field.q
        return sum((r % self.h).index * q ** (D * i) for i, r in enumerate(residues))

    def decode(self, x: int) -> tuple[Poly, ...]:
        D, q = self.h.deg, self.field.q
        return tuple(Poly.from_index(self.field, (x // q ** (D * i)) % q**D) for i in range(self.d))

    def zero_shift(self) -> int:
        return 0

    def action_shift(self, j: int, a: Poly) -> int:
        """Index of a * v_j mod h."""
        return self.encode([a * c for c in self.directions[j]])

    def add_shift(self, u: int, v: int) -> int:
        return int(index_add(self.field, u, v, self.width))

    def translate(self, x, shift: int):
        """x + shift, for a point index or an array of them."""
        out = index_add(self.field, x, shift, self.width)
        return int(out) if np.ndim(out) == 0 else out

    def apply(self, g: np.ndarray, shift: int) -> np.ndarray:
        """(g o T)(x) = g(x + shift) for every x."""
        return np.asarray(g)[self.translate(np.arange(self.size), shift)]

    def to_json(self) -> dict:
        return {"h": str(self.h), "d": self.d,
                "directions": [[str(c) for c in v] for v in self.directions]}


def build_translation_system(h: Poly, d: int = 1,
                             directions: Sequence[Sequence[Poly]] | None = None) -> FiniteSystem:
    """A translation system; directions default to the d unit vectors."""
    if directions is None:
        one, zero = Poly.one(h.field), Poly(h.field)
        directions = [tuple(one if i == j else zero for i in range(d)) for j in range(d)]
    return FiniteSystem(h, d, tuple(tuple(v) for v in directions))


def _terms(system: FiniteSystem, K) -> list[tuple[int, Poly, int]]:
    """(action, coeff, exponent) triples from K, an exponent list or a NormalForm."""
    if isinstance(K, NormalForm):
        return K.terms()
    exps = K.exponents if isinstance(K, ExponentSystem) else tuple(K)
    if len(exps) > system.n_actions:
        raise ValueError("more exponents than actions")
    one = Poly.one(system.field)
    return [(i, one, r) for i, r in enumerate(exps)]


def shift_counts(system: FiniteSystem, K, n: int) -> dict[int, int]:
    """How many f with deg f < n give each total shift sum c f^e v_j mod h."""
    field = system.field
    check_count(field.q**n, "polynomials")
    terms = _terms(system, K)
    counts: dict[int, int] = {}
    # residues of f mod h repeat; evaluate each residue once
    D = system.h.deg
    if n > D:
        base = shift_counts(system, K, D)
        mult = field.q ** (n - D)
        return {w: c * mult for w, c in base.items()}
    for f in enumerate_degree_lt(field, n):
        w = 0
        for j, c, e in terms:
            w = system.add_shift(w, system.action_shift(j, c * f.pow_mod(e, system.h)))
        counts[w] = counts.get(w, 0) + 1
    return counts


def average_numerators(system: FiniteSystem, g: np.ndarray, K, n: int) -> np.ndarray:
    """q^n A_n g, exact for integer g."""
    g = np.asarray(g)
    if g.shape != (system.size,):
        raise ValueError(f"g must have shape ({system.size},)")
    out = np.zeros(system.size, dtype=g.dtype if g.dtype.kind in "iu" else complex)
    for w, c in shift_counts(system, K, n).items():
        out = out + c * system.apply(g, w)
    return out


def ergodic_average(system: FiniteSystem, g: np.ndarray, K, n: int) -> np.ndarray:
    """A_n g(x) = q^-n sum_{deg f < n} g(x + sum c f^e v_j)."""
    return average_numerators(system, g, K, n) / system.field.q**n


@dataclass
class AverageTrace:
    values: list[np.ndarray]
    stabilization: int | None
    limit: np.ndarray | None
    invariant: dict[int, bool] = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"stabilization": self.stabilization,
                "limit": None if self.limit is None else [complex(v).real for v in self.limit],
                "invariant": {str(j): v for j, v in self.invariant.items()}}


def _same(a: np.ndarray, b: np.ndarray) -> bool:
    if a.dtype.kind in "iuO" and b.dtype.kind in "iuO":
        return bool(np.array_equal(a, b))
    return bool(np.allclose(a, b, rtol=0, atol=1e-12))


def convergence_probe(system: FiniteSystem, g: np.ndarray, K, n_max: int) -> AverageTrace:
    """A_n g for n <= n_max and the first n from which it stays constant.

    For integer g the comparison is exact: q^(n_max - n) * numerator_n are
    compared as integers.  Invariance of the limit under T^(j)_1 is recorded,
    not required; for nonlinear exponents it generally fails.
    """
    q = system.field.q
    g = np.asarray(g)
    nums = [average_numerators(system, g, K, n) for n in range(n_max + 1)]
    if g.dtype.kind in "iu":
        scaled = [x.astype(object) * q ** (n_max - n) for n, x in enumerate(nums)]
    else:
        scaled = [x / q**n for n, x in enumerate(nums)]
    stab = None
    for n0 in range(n_max + 1):
        if all(_same(scaled[n0], scaled[m]) for m in range(n0 + 1, n_max + 1)):
            stab = n0
            break
    values = [x / q**n for n, x in enumerate(nums)]
    limit = values[stab] if stab is not None else None
    inv = {}
    if limit is not None:
        for j in range(system.n_actions):
            inv[j] = bool(np.allclose(system.apply(limit, system.action_shift(j, Poly.one(system.field))),
                                      limit, atol=1e-12))
    return AverageTrace(values, stab, limit, inv)


@dataclass
class TransferenceReport:
    checked: int
    max_abs_error: float
    norm_lhs: float
    norm_rhs: float
    skipped_outside: int = 0

    @property
    def passed(self) -> bool:
        return self.max_abs_error <= 1e-9 and abs(self.norm_lhs - self.norm_rhs) <= 1e-9 * max(
            1.0, abs(self.norm_rhs))

    def to_json(self) -> dict:
        return {"checked": self.checked, "maxAbsError": self.max_abs_error,
                "normPhi": self.norm_lhs, "normG": self.norm_rhs,
                "skippedOutside": self.skipped_outside, "pass": self.passed}


def phi(system: FiniteSystem, g: np.ndarray, K: ExponentSystem, x: int, big_k: int) -> GridFunction:
    """Phi_{x,K}(a) = 1_{deg a_i < r_i K} (S_a g)(x) as a grid on the box r_i K."""
    field = system.field
    box = tuple(r * big_k for r in K.exponents)
    shape = tuple(field.q**b for b in box)
    check_count(math.prod(shape), "transference grid points")
    # shift of S_a is additive in a: sum_i a_i v_i, built axis by axis
    total = np.zeros(shape, dtype=np.int64)
    for i, b in enumerate(box):
        idx = np.arange(field.q**b)
        sh = np.array([system.action_shift(i, Poly.from_index(field, int(a))) for a in idx],
                      dtype=np.int64)
        expand = [1] * len(box)
        expand[i] = -1
        total = index_add(field, total, sh.reshape(expand), system.width)
    vals = np.asarray(g)[index_add(field, np.int64(x), total, system.width)]
    return GridFunction(field, box, vals)


def transference_check(system: FiniteSystem, g: np.ndarray, K, big_k: int, samples: int = 20,
                       seed: int = 0, n_values: Sequence[int] | None = None,
                       pairs: Sequence[tuple[int, tuple[Poly, ...]]] | None = None) -> TransferenceReport:
    """A_n(S_a g)(x) = M_n Phi_{x,K}(a) at sampled (x, a) with deg a_i < r_i K, n <= K.

    The left side is evaluated directly in X; the right side with the grid
    operator M_n.  Also checks sum_x ||Phi_x||^2 = q^(K sum r_i) sum_x |g(x)|^2.
    """
    system_K = K if isinstance(K, ExponentSystem) else ExponentSystem(tuple(K), system.field)
    field, q = system.field, system.field.q
    g = np.asarray(g)
    rng = np.random.default_rng(seed)
    ns = list(n_values) if n_values is not None else list(range(0, big_k + 1))
    if pairs is None:
        pairs = []
        for _ in range(samples):
            x = int(rng.integers(system.size))
            a = tuple(Poly.from_index(field, int(rng.integers(q ** (r * big_k))))
                      for r in system_K.exponents)
            pairs.append((x, a))
    err, checked, skipped = 0.0, 0, 0
    cache: dict[int, GridFunction] = {}
    for x, a in pairs:
        if any(ai.deg >= r * big_k for ai, r in zip(a, system_K.exponents)):
            skipped += 1
            continue
        if x not in cache:
            cache[x] = phi(system, g, system_K, x, big_k)
        P = cache[x]
        shift_a = 0
        for i, ai in enumerate(a):
            shift_a = system.add_shift(shift_a, system.action_shift(i, ai))
        sag = system.apply(g, shift_a)
        for n in ns:
            if n > big_k:
                raise ValueError("n must be <= K")
            lhs = ergodic_average(system, sag, system_K, n)[x]
            rhs = apply_M(P, system_K, n)[a]
            err = max(err, abs(lhs - rhs))
            checked += 1
    # norm bookkeeping over every x
    lhs_norm = sum(phi(system, g, system_K, x, big_k).norm() ** 2 for x in range(system.size))
    rhs_norm = q ** (big_k * sum(system_K.exponents)) * float(np.sum(np.abs(g) ** 2))
    return TransferenceReport(checked, float(err), lhs_norm, rhs_norm, skipped)


@dataclass
class OscillationExperiment:
    max_ratio: float
    ratios: list[float]
    stabilization: int | None

    def to_json(self) -> dict:
        return {"maxRatio": self.max_ratio, "families": len(self.ratios),
                "stabilization": self.stabilization}


def oscillation_experiment(system: FiniteSystem, g: np.ndarray, K, n_max: int,
                           cut_samples: int = 100, seed: int = 0) -> OscillationExperiment:
    """max over random cut families of ||O(A_n g)||_{L^2(X)} / ||g||_{L^2(X)}."""
    rng = np.random.default_rng(seed)
    g = np.asarray(g)
    trace = convergence_probe(system, g, K, n_max)
    arr = np.stack(trace.values)
    gnorm = math.sqrt(float(np.mean(np.abs(g) ** 2)))
    ratios = []
    for _ in range(cut_samples):
        size = int(rng.integers(2, n_max + 2))
        cuts = sorted(rng.choice(n_max + 1, size=min(size, n_max + 1), replace=False).tolist())
        if len(cuts) < 2:
            continue
        total = np.zeros(system.size)
        for lo, hi in zip(cuts, cuts[1:]):
            total += (np.abs(arr[lo:hi] - arr[hi]) ** 2).max(axis=0)
        osc = math.sqrt(float(np.mean(total)))
        ratios.append(osc / gnorm if gnorm else 0.0)
    return OscillationExperiment(max(ratios, default=0.0), ratios, trace.stabilization)


def residue_distribution(system: FiniteSystem, K, n: int) -> dict[int, Fraction]:
    """Normalised shift distribution q^-n * shift_counts."""
    q = system.field.q
    return {w: Fraction(c, q**n) for w, c in shift_counts(system, K, n).items()}


__all__ = ["FiniteSystem", "build_translation_system", "shift_counts", "ergodic_average",
           "average_numerators", "AverageTrace", "convergence_probe", "TransferenceReport",
           "phi", "transference_check", "OscillationExperiment", "oscillation_experiment",
           "residue_distribution"]
