"""Global enumeration budget and nonconforming-parameter overrides."""
from __future__ import annotations

import contextlib
from dataclasses import dataclass
from fractions import Fraction

from .errors import CountLimitError

DEFAULT_COUNT_LIMIT = 2**26

_count_limit = DEFAULT_COUNT_LIMIT

CONFORMING = "conforming"
NONCONFORMING = "nonconforming parameters"


def get_count_limit() -> int:
    return _count_limit


def set_count_limit(limit: int) -> None:
    global _count_limit
    if limit < 1:
        raise ValueError("count limit must be positive")
    _count_limit = int(limit)


@contextlib.contextmanager
def count_limit(limit: int):
    """Temporarily replace the enumeration budget."""
    old = get_count_limit()
    set_count_limit(limit)
    try:
        yield
    finally:
        set_count_limit(old)


def check_count(count: int, what: str = "elements") -> None:
    if count > _count_limit:
        raise CountLimitError(
            f"enumerating {count} {what} exceeds the count limit {_count_limit}"
        )


@dataclass(frozen=True)
class Overrides:
    """Relaxations for desk-scale experiments.

    ``rho`` replaces 1/(8 r*) in the bound deg h < rho*n, ``box_exponent``
    replaces 1/(4 r*^2) in the major-arc box radius, and ``relax_ranges``
    disables the s < rho*n and n >= R_s^4 guards of the operators.  Any
    instance with a field set marks results as nonconforming.
    """

    rho: Fraction | None = None
    box_exponent: Fraction | None = None
    relax_ranges: bool = False

    def __post_init__(self):
        if self.rho is not None:
            object.__setattr__(self, "rho", Fraction(self.rho))
        if self.box_exponent is not None:
            object.__setattr__(self, "box_exponent", Fraction(self.box_exponent))

    @property
    def active(self) -> bool:
        return self.rho is not None or self.box_exponent is not None or self.relax_ranges


def stamp(overrides: Overrides | None) -> str:
    return NONCONFORMING if overrides is not None and overrides.active else CONFORMING
