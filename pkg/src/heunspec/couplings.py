"""Coupling constants of the BC1 Inozemtsev Hamiltonian and input checking."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Iterable

from .errors import ConfigError, DomainError

__all__ = ["CouplingConstants", "as_couplings", "parse_number"]


def parse_number(value, exact: bool = True):
    """Turn ``value`` into a Fraction (exact) or a float.

    Strings of the form ``"n/d"`` or decimals are read exactly.  Floats are
    read through their shortest repr so ``0.3`` becomes ``3/10``.
    """
    if isinstance(value, bool):
        raise ConfigError(f"not a number: {value!r}")
    try:
        if isinstance(value, str):
            frac = Fraction(value.strip())
        elif isinstance(value, float):
            frac = Fraction(repr(value))
        elif isinstance(value, (int, Fraction)):
            frac = Fraction(value)
        elif isinstance(value, Number):
            frac = Fraction(repr(float(value)))
        else:
            raise TypeError
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {value!r}") from exc
    return frac if exact else float(frac)


@dataclass(frozen=True)
class CouplingConstants:
    """The four couplings ``l0..l3`` multiplying ``wp(x + omega_i)``.

    The Hamiltonian only depends on ``l_i (l_i + 1)``; the representative with
    ``l_i >= -1/2`` is the one stored.
    """

    l0: object
    l1: object
    l2: object
    l3: object

    @property
    def values(self) -> tuple:
        return (self.l0, self.l1, self.l2, self.l3)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i: int):
        return self.values[i]

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.values)

    @property
    def is_integer(self) -> bool:
        return all(v == int(v) for v in self.values)

    @property
    def casimir_sum(self):
        """``sum_i l_i (l_i + 1)``."""
        return sum(v * (v + 1) for v in self.values)

    @property
    def case(self) -> str:
        """Trigonometric basis case tag: ``JJ``, ``G``, ``Gp`` or ``F``."""
        if self.l0 > 0 and self.l1 > 0:
            return "JJ"
        if self.l0 > 0:
            return "G"
        if self.l1 > 0:
            return "Gp"
        return "F"

    def to_float(self) -> "CouplingConstants":
        return CouplingConstants(*(float(v) for v in self.values))

    def to_exact(self) -> "CouplingConstants":
        return CouplingConstants(*(parse_number(v) for v in self.values))

    def require_nonnegative(self) -> "CouplingConstants":
        if any(v < 0 for v in self.values):
            raise DomainError(f"couplings must be non-negative, got {self.values}")
        return self

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.values) + ")"


def as_couplings(value, exact: bool = True) -> CouplingConstants:
    """Coerce a 4-sequence, a ``"l0,l1,l2,l3"`` string or a CouplingConstants."""
    if isinstance(value, CouplingConstants):
        return value.to_exact() if exact and not value.exact else value
    if isinstance(value, str):
        value = [v for v in value.replace(" ", "").split(",") if v]
    items: Iterable = list(value)
    if len(items) != 4:
        raise ConfigError(f"expected four couplings l0,l1,l2,l3, got {len(items)}")
    return CouplingConstants(*(parse_number(v, exact) for v in items))
