"""Truncated formal power series over an exchangeable coefficient field.

Coefficients are plain Python numbers: :class:`fractions.Fraction` (or ``int``)
for exact work and ``float``/``complex`` otherwise.  Every result carries an
explicit truncation order; binary operations truncate to the smaller order of
their operands and never promote silently.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Callable

from .errors import SeriesError

__all__ = ["TruncatedSeries", "is_exact_number"]


def is_exact_number(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series ``c0 + c1 t + ... + cK t^K + O(t^(K+1))`` in the variable ``t``.

    Parameters
    ----------
    coeffs : sequence of numbers
        The ``K + 1`` retained coefficients, lowest order first.
    variable : str
        Name of the expansion variable (``"a"`` or ``"p"`` in this package).
        Arithmetic between series in different variables is refused.
    """

    coeffs: tuple
    variable: str = "p"

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise SeriesError("a truncated series needs at least one coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, order: int, variable: str = "p") -> "TruncatedSeries":
        zero = value * 0
        return cls((value,) + (zero,) * order, variable)

    @classmethod
    def identity(cls, order: int, variable: str = "p", one=Fraction(1)) -> "TruncatedSeries":
        """The series of the variable itself, ``t + O(t^(K+1))``."""
        if order < 1:
            raise SeriesError("the identity series needs order >= 1")
        zero = one * 0
        return cls((zero, one) + (zero,) * (order - 1), variable)

    # -- basic properties -------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_exact(self) -> bool:
        return all(is_exact_number(c) for c in self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise SeriesError(f"cannot raise truncation order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[: order + 1], self.variable)

    def map(self, fn: Callable) -> "TruncatedSeries":
        return TruncatedSeries(tuple(fn(c) for c in self.coeffs), self.variable)

    def to_float(self) -> "TruncatedSeries":
        return self.map(float)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.variable != self.variable:
                raise SeriesError(
                    f"variable mismatch: {self.variable!r} vs {other.variable!r}"
                )
            return other
        if isinstance(other, Number):
            return TruncatedSeries.constant(other, self.order, self.variable)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        k = min(self.order, other.order)
        return TruncatedSeries(
            tuple(self.coeffs[i] + other.coeffs[i] for i in range(k + 1)), self.variable
        )

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(tuple(-c for c in self.coeffs), self.variable)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return TruncatedSeries(tuple(c * other for c in self.coeffs), self.variable)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        k = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for n in range(k + 1):
            acc = a[0] * b[n]
            for i in range(1, n + 1):
                acc = acc + a[i] * b[n - i]
            out.append(acc)
        return TruncatedSeries(tuple(out), self.variable)

    __rmul__ = __mul__

    def recip(self) -> "TruncatedSeries":
        """Multiplicative inverse; requires a nonzero constant term."""
        c = self.coeffs
        if c[0] == 0:
            raise SeriesError("reciprocal of a series with zero constant term")
        inv0 = 1 / c[0] if not is_exact_number(c[0]) else Fraction(1) / c[0]
        out = [inv0]
        for n in range(1, len(c)):
            acc = c[1] * out[n - 1]
            for i in range(2, n + 1):
                acc = acc + c[i] * out[n - i]
            out.append(-acc * inv0)
        return TruncatedSeries(tuple(out), self.variable)

    def __truediv__(self, other):
        if isinstance(other, Number):
            if is_exact_number(other):
                other = Fraction(other)
            return TruncatedSeries(tuple(c / other for c in self.coeffs), self.variable)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.recip()

    def __rtruediv__(self, other):
        return self.recip() * other

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise SeriesError("only non-negative integer powers are supported")
        one = self.coeffs[0] * 0 + 1
        result = TruncatedSeries.constant(one, self.order, self.variable)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- evaluation & composition ----------------------------------------
    def __call__(self, value):
        """Evaluate the retained polynomial at ``value`` (Horner)."""
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * value + c
        return acc

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """Substitute ``inner`` for this series' variable.

        ``inner`` must have a zero constant term.  The result is in
        ``inner.variable`` and is exact to order ``min(self.order, inner.order)``:
        with ``inner = O(t)`` every neglected term of ``self`` is ``O(t^(K+1))``.
        """
        if inner.coeffs[0] != 0:
            raise SeriesError("composition needs an inner series with zero constant term")
        k = min(self.order, inner.order)
        inner = inner.truncate(k)
        acc = TruncatedSeries.constant(self.coeffs[k], k, inner.variable)
        for c in reversed(self.coeffs[:k]):
            acc = acc * inner + c
        return acc

    def derivative(self) -> "TruncatedSeries":
        """Termwise derivative; the order drops by one (kept >= 0)."""
        if self.order == 0:
            return TruncatedSeries((self.coeffs[0] * 0,), self.variable)
        return TruncatedSeries(
            tuple(i * self.coeffs[i] for i in range(1, len(self.coeffs))), self.variable
        )

    # -- display ----------------------------------------------------------
    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(f"{c}")
            elif i == 1:
                terms.append(f"{c}*{self.variable}")
            else:
                terms.append(f"{c}*{self.variable}^{i}")
        body = " + ".join(terms) if terms else "0"
        return f"TruncatedSeries({body} + O({self.variable}^{self.order + 1}))"

