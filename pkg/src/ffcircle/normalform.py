"""Regroup polynomial iterates by the p-free part of each exponent.

A term c * u^e with e = p^nu * r, (r, p) = 1, equals c * (u^r)^(p^nu), and
u -> c * u^(p^nu) is additive (Frobenius).  Collecting all terms with the same
r gives one additive map S^(r) per class, applied to f^r.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

import numpy as np

from .ffpoly import FieldParams, Poly, parse_poly


def p_free_part(e: int, p: int) -> tuple[int, int]:
    """(r, nu) with e = p^nu * r and p not dividing r."""
    if e < 1:
        raise ValueError("exponent must be >= 1")
    nu = 0
    while e % p == 0:
        e //= p
        nu += 1
    return e, nu


@dataclass(frozen=True)
class PolySpec:
    """P_j(u) = constant + sum c * u^e for one action index j."""

    action: int
    terms: tuple[tuple[Poly, int], ...]
    constant: Poly | None = None

    def __post_init__(self):
        terms = []
        const = self.constant
        for c, e in self.terms:
            if e < 0:
                raise ValueError("exponents must be >= 0")
            if e == 0:
                # constant terms are split off and absorbed into g
                const = c if const is None else const + c
            elif not c.is_zero():
                terms.append((c, int(e)))
        object.__setattr__(self, "terms", tuple(terms))
        object.__setattr__(self, "constant", const)

    def evaluate(self, f: Poly) -> Poly:
        out = self.constant if self.constant is not None else Poly(f.field)
        for c, e in self.terms:
            out = out + c * f**e
        return out


@dataclass(frozen=True)
class Component:
    action: int
    coeff: Poly
    p_power: int


@dataclass(frozen=True)
class NormalClass:
    r: int
    components: tuple[Component, ...]


@dataclass
class NormalForm:
    classes: list[NormalClass]
    constants: dict[int, Poly] = dc_field(default_factory=dict)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(c.r for c in self.classes)

    def to_json(self) -> dict:
        return {"classes": [{"r": c.r, "components": [
            {"action": x.action, "coeff": str(x.coeff), "pPower": x.p_power}
            for x in c.components]} for c in self.classes],
            "constants": {str(j): str(c) for j, c in self.constants.items()}}

    def terms(self) -> list[tuple[int, Poly, int]]:
        """(action, coeff, exponent) triples, exponent = p_power * r."""
        return [(x.action, x.coeff, x.p_power * c.r) for c in self.classes for x in c.components]


def reduce_to_normal_form(specs: Sequence[PolySpec], field: FieldParams,
                          allow_empty: bool = False) -> NormalForm:
    """Group every monomial term by the p-free part of its exponent.

    Classes are sorted by r; components keep input order.  A spec list with no
    nonconstant term is rejected unless ``allow_empty`` marks it as intended.
    """
    p = field.p
    groups: dict[int, list[Component]] = {}
    constants: dict[int, Poly] = {}
    for spec in specs:
        if spec.constant is not None and not spec.constant.is_zero():
            constants[spec.action] = spec.constant
        for c, e in spec.terms:
            if c.field != field:
                raise ValueError("coefficient over a different field")
            r, nu = p_free_part(e, p)
            groups.setdefault(r, []).append(Component(spec.action, c, p**nu))
    if not groups and not allow_empty:
        raise ValueError("no nonconstant terms; pass allow_empty for the constant-only case")
    classes = [NormalClass(r, tuple(groups[r])) for r in sorted(groups)]
    return NormalForm(classes, constants)


def parse_specs(field: FieldParams, data: Mapping) -> list[PolySpec]:
    """{"actions": l, "polys": [[[coeff, exponent], ...], ...]} with coeffs as "t+1" strings."""
    polys = data["polys"]
    if len(polys) != data.get("actions", len(polys)):
        raise ValueError("number of polynomials differs from the number of actions")
    out = []
    for j, terms in enumerate(polys):
        parsed = []
        for c, e in terms:
            coeff = parse_poly(field, c) if isinstance(c, str) else Poly(field, c if isinstance(c, list) else [c])
            parsed.append((coeff, int(e)))
        out.append(PolySpec(j, tuple(parsed)))
    return out


@dataclass
class NormalFormReport:
    checked: int
    failures: int
    additivity_checked: int
    additivity_failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.additivity_failures == 0

    def to_json(self) -> dict:
        return {"checked": self.checked, "failures": self.failures,
                "additivityChecked": self.additivity_checked,
                "additivityFailures": self.additivity_failures, "pass": self.passed}


def _class_shift(cls: NormalClass, u: Poly, system) -> np.ndarray:
    """Shift vector of S^(r)_u = prod over components of T^(j)_{c u^(p^nu)}."""
    out = system.zero_shift()
    for comp in cls.components:
        out = system.add_shift(out, system.action_shift(comp.action, comp.coeff * u**comp.p_power))
    return out


def verify_normal_form(nf: NormalForm, specs: Sequence[PolySpec], system, samples: int = 50,
                       seed: int = 0, degree: int | None = None) -> NormalFormReport:
    """Compare T^(1)_{P_1(f)} ... T^(l)_{P_l(f)} x with the normal-form product at sampled f, x.

    Also checks S^(r)_{u+v} = S^(r)_u S^(r)_v on sampled u, v.
    """
    if any(s.action >= system.n_actions for s in specs):
        raise ValueError("spec refers to an action the system does not have")
    rng = np.random.default_rng(seed)
    field = system.field
    deg = degree if degree is not None else system.h.deg + 2
    checked = failures = add_checked = add_failures = 0
    for _ in range(samples):
        f = Poly.from_index(field, int(rng.integers(field.q**deg)))
        x = int(rng.integers(system.size))
        lhs = system.zero_shift()
        for spec in specs:
            lhs = system.add_shift(lhs, system.action_shift(spec.action, spec.evaluate(f)))
        rhs = system.zero_shift()
        for cls in nf.classes:
            rhs = system.add_shift(rhs, _class_shift(cls, f**cls.r, system))
        for j, c in nf.constants.items():
            rhs = system.add_shift(rhs, system.action_shift(j, c))
        checked += 1
        if system.translate(x, lhs) != system.translate(x, rhs):
            failures += 1
        u = Poly.from_index(field, int(rng.integers(field.q**deg)))
        v = Poly.from_index(field, int(rng.integers(field.q**deg)))
        for cls in nf.classes:
            add_checked += 1
            both = _class_shift(cls, u + v, system)
            split = system.add_shift(_class_shift(cls, u, system), _class_shift(cls, v, system))
            if not np.array_equal(both, split):
                add_failures += 1
    return NormalFormReport(checked, failures, add_checked, add_failures)


__all__ = ["p_free_part", "PolySpec", "Component", "NormalClass", "NormalForm",
           "reduce_to_normal_form", "parse_specs", "verify_normal_form", "NormalFormReport"]
