"""Weierstrass wp data for the lattice (1, tau) expanded in the nome p = exp(i pi tau).

Two modes share one code path:

* value mode -- ``p`` is a real number in (-1, 1); results are floats and
  carry their pi^2 factors;
* series mode -- ``p`` is a :class:`~heunspec.series.TruncatedSeries` (usually
  ``TruncatedSeries.identity(K)``); results are series whose coefficients are
  expressed in units of pi^2 (exact rationals when the input is exact).

The modular parameter ``a`` is dimensionless and has no pi^2 factor in either
mode.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple

from .couplings import CouplingConstants
from .errors import DomainError
from .series import TruncatedSeries

__all__ = [
    "PI2",
    "DEFAULT_TERMS",
    "CosinePolynomial",
    "EllipticContext",
    "elliptic_series",
    "half_periods",
    "majorant_bound",
    "modular_lambda",
    "potential_fourier",
    "wp_eval",
    "wp_tail_bound",
]

PI2 = math.pi ** 2
DEFAULT_TERMS = 50


def _series_mode(p) -> bool:
    if isinstance(p, TruncatedSeries):
        if p.coeffs[0] != 0:
            raise DomainError("a nome series must have zero constant term")
        return True
    if not abs(p) < 1:
        raise DomainError(f"nome must satisfy |p| < 1, got {p}")
    return False


def _terms(p, N: int, per_term_degree: int) -> int:
    """Number of product/sum terms: N in value mode, just enough in series mode."""
    if isinstance(p, TruncatedSeries):
        return max(1, p.order // per_term_degree + 1)
    return N


def modular_lambda(p, N: int = DEFAULT_TERMS):
    """``a = lambda(tau) = 16 p prod_n ((1 + p^2n) / (1 + p^(2n-1)))^8``.

    Value mode uses the factors ``n <= N``; series mode keeps every factor that
    contributes below the truncation order, so the coefficients are exact.
    """
    series = _series_mode(p)
    if N < 1:
        raise DomainError("need at least one product factor")
    one = Fraction(1) if series or isinstance(p, Fraction) else 1.0
    prod = one
    for n in range(1, _terms(p, N, 1) + 1):
        prod = prod * ((1 + p ** (2 * n)) / (1 + p ** (2 * n - 1))) ** 8
    return 16 * p * prod


def half_periods(p, N: int = DEFAULT_TERMS) -> Tuple:
    """``(e1, e2, e3) = (wp(1/2), wp((1+tau)/2), wp(tau/2))``.

    ``e1`` comes from the expansion of ``wp(x)`` at ``x = 1/2``; ``e2`` and
    ``e3`` from the expansions of ``wp(x + (1+tau)/2)`` and ``wp(x + tau/2)``
    at ``x = 0``.  Series mode returns coefficients in units of pi^2.
    """
    series = _series_mode(p)
    third = Fraction(1, 3)
    e1 = 2 * third + 0 * p
    e2 = -third + 0 * p
    e3 = -third + 0 * p
    for n in range(1, _terms(p, N, 1) + 1):
        pn = p ** n
        p2n = pn * pn
        if n % 2 == 1 and (not series or 2 * n <= p.order):
            e1 = e1 + 16 * n * p2n / (1 - p2n)
        e3 = e3 - 8 * n * pn / (1 + pn)
        e2 = e2 - 8 * n * pn * ((-1) ** n - pn) / (1 - p2n)
    if series:
        return e1, e2, e3
    return float(e1) * PI2, float(e2) * PI2, float(e3) * PI2


@lru_cache(maxsize=32)
def elliptic_series(order: int) -> Dict[str, TruncatedSeries]:
    """Exact p-series of ``e1, e2, e3`` (pi^2 units) and ``a`` up to ``p^order``."""
    p = TruncatedSeries.identity(order, "p")
    e1, e2, e3 = half_periods(p)
    return {"e1": e1, "e2": e2, "e3": e3, "a": modular_lambda(p)}


@dataclass(frozen=True)
class EllipticContext:
    """Nome ``p`` with the derived half-period values and modular parameter.

    Attributes
    ----------
    p : float or Fraction
        Real nome in (-1, 1).
    N : int
        Number of retained terms in every q-series.
    e1, e2, e3 : float
        ``wp`` at the half periods 1/2, (1+tau)/2, tau/2 (pi^2 included).
    a : float
        Modular parameter ``(e2 - e3) / (e1 - e3)`` from the product formula.
    """

    p: object
    N: int = DEFAULT_TERMS
    e1: float = field(init=False)
    e2: float = field(init=False)
    e3: float = field(init=False)
    a: float = field(init=False)

    def __post_init__(self):
        _series_mode(self.p)
        e1, e2, e3 = half_periods(float(self.p), self.N)
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)
        object.__setattr__(self, "e3", e3)
        object.__setattr__(self, "a", float(modular_lambda(float(self.p), self.N)))

    @property
    def values(self) -> Tuple[float, float, float]:
        return self.e1, self.e2, self.e3

    @property
    def a_from_e(self) -> float:
        return (self.e2 - self.e3) / (self.e1 - self.e3)

    def series(self, order: int) -> Dict[str, TruncatedSeries]:
        return elliptic_series(order)

    def tail_bound(self) -> float:
        """Bound on the neglected part of the half-period sums."""
        return wp_tail_bound(0.0, 3, self)


# -- wp itself ---------------------------------------------------------------

def _tail_ratio(x, shift: int, p: float) -> float:
    grow = math.exp(2 * math.pi * abs(complex(x).imag))
    return (p * p if shift in (0, 1) else abs(p)) * grow


def wp_tail_bound(x, shift: int, ctx: EllipticContext) -> float:
    """Rigorous bound on the terms ``n > N`` dropped by :func:`wp_eval`.

    Each dropped term is at most ``16 pi^2 n rho^n / (1 - p^2)``, with
    ``rho = p^2 e^(2 pi |Im x|)`` for shifts 0, 1 and ``|p| e^(2 pi |Im x|)``
    otherwise; the sum over ``n > N`` is bounded in closed form.
    """
    p = abs(float(ctx.p))
    rho = _tail_ratio(x, shift, p)
    if rho >= 1:
        return math.inf
    N = ctx.N
    return 16 * PI2 * (N + 1) * rho ** (N + 1) / ((1 - rho) ** 2 * (1 - p * p))


def wp_eval(x, shift: int, ctx: EllipticContext, pole_tol: float = 1e-8,
            return_tail: bool = False):
    """``wp(x + omega_shift)`` from its truncated trigonometric q-series.

    ``shift`` indexes the half periods ``0, 1/2, (1+tau)/2, tau/2``.  ``x``
    may be complex as long as the series still converges; a real ``x`` gives a
    float.
    """
    if shift not in (0, 1, 2, 3):
        raise DomainError(f"shift must be 0..3, got {shift}")
    p = float(ctx.p)
    if _tail_ratio(x, shift, p) >= 1:
        raise DomainError("Im x too large for the q-series to converge")
    is_real = not isinstance(x, complex)
    z = complex(x)
    s = cmath.sin(math.pi * z)
    c = cmath.cos(math.pi * z)
    total = -PI2 / 3
    if shift == 0:
        if abs(s) < pole_tol:
            raise DomainError(f"x = {x} is too close to a pole of wp")
        total += PI2 / (s * s)
    elif shift == 1:
        if abs(c) < pole_tol:
            raise DomainError(f"x = {x} is too close to a pole of wp(x + 1/2)")
        total += PI2 / (c * c)
    acc = 0
    for n in range(1, ctx.N + 1):
        cn = cmath.cos(2 * n * math.pi * z)
        sign = (-1) ** n if shift in (1, 2) else 1
        if shift in (0, 1):
            p2n = p ** (2 * n)
            acc += n * p2n / (1 - p2n) * (sign * cn - 1)
        else:
            pn = p ** n
            acc += n * pn * (sign * cn - pn) / (1 - pn * pn)
    total = total - 8 * PI2 * acc
    value = total.real if is_real else total
    if return_tail:
        return value, wp_tail_bound(x, shift, ctx)
    return value


# -- the perturbing potential ------------------------------------------------

@dataclass(frozen=True)
class CosinePolynomial:
    """``sum_n c_n cos(2 pi n x)`` with coefficients stored in units of pi^2."""

    harmonics: Tuple[Tuple[int, object], ...]

    @classmethod
    def from_dict(cls, coeffs: Dict[int, object]) -> "CosinePolynomial":
        return cls(tuple(sorted((n, c) for n, c in coeffs.items() if c != 0)))

    def as_dict(self) -> Dict[int, object]:
        return dict(self.harmonics)

    @property
    def max_harmonic(self) -> int:
        return max((n for n, _ in self.harmonics), default=0)

    def is_zero(self) -> bool:
        return not self.harmonics

    def __call__(self, x) -> float:
        return PI2 * sum(float(c) * math.cos(2 * math.pi * n * x) for n, c in self.harmonics)

    def w_coefficients(self) -> list:
        """Monomial coefficients in ``w = sin^2(pi x)`` (pi^2 units).

        Uses ``cos(2 pi n x) = T_n(1 - 2w)``.
        """
        deg = self.max_harmonic
        # Chebyshev T_n(1 - 2w) as coefficient lists in w
        cheb = [[Fraction(1)], [Fraction(1), Fraction(-2)]]
        for n in range(2, deg + 1):
            prev, prev2 = cheb[n - 1], cheb[n - 2]
            nxt = [Fraction(0)] * (n + 1)
            for i, c in enumerate(prev):
                nxt[i] += 2 * c
                nxt[i + 1] += -4 * c
            for i, c in enumerate(prev2):
                nxt[i] -= c
            cheb.append(nxt)
        out = [0] * (deg + 1)
        for n, c in self.harmonics:
            for i, t in enumerate(cheb[n]):
                out[i] = out[i] + c * t
        return out


def potential_fourier(l: CouplingConstants, K: int):
    """Cosine coefficients of the perturbation ``H = H_T + C_T + sum_k V_k p^k``.

    Returns ``(V, C_T)`` where ``V[k-1]`` is ``V_k`` and ``C_T`` is
    ``-(1/3) sum_i l_i (l_i + 1)``; both in units of pi^2.
    """
    if K < 1:
        raise DomainError("need K >= 1")
    g0, g1, g2, g3 = (v * (v + 1) for v in l.values)
    zero = 0 * g0
    vk = []
    for k in range(1, K + 1):
        coeffs: Dict[int, object] = {}

        def put(n, c):
            coeffs[n] = coeffs.get(n, zero) + c

        for n in range(1, k + 1):
            sgn = (-1) ** n
            # wp(x) and wp(x + 1/2): terms n p^(2n j) (cos 2 pi n x - 1), j >= 1
            if k % (2 * n) == 0:
                put(n, -8 * n * (g0 + sgn * g1))
                put(0, 8 * n * (g0 + g1))
                # wp(x + tau/2), wp(x + (1+tau)/2): constant part n p^(2n(j+1))
                put(0, 8 * n * (g3 + g2))
            # wp(x + tau/2), wp(x + (1+tau)/2): n p^(n(2j+1)) cos 2 pi n x
            if k % n == 0 and (k // n) % 2 == 1:
                put(n, -8 * n * (g3 + sgn * g2))
        vk.append(CosinePolynomial.from_dict(coeffs))
    return vk, -Fraction(1, 3) * (g0 + g1 + g2 + g3)


def majorant_bound(l: CouplingConstants, p, N: int = 200, return_tail: bool = False):
    """The majorant ``C(|p|)`` with ``|sum_k V_k(x) p^k| <= C(|p|)`` for all real x.

    ``C(p) = 8 pi^2 sum_n [ (g0 + g1) 2n p^2n + (g2 + g3) n (p^n + p^2n) ] / (1 - p^2n)``
    with ``g_i = l_i (l_i + 1)``.
    """
    q = abs(float(p))
    if q >= 1:
        raise DomainError(f"nome must satisfy |p| < 1, got {p}")
    g0, g1, g2, g3 = (float(v * (v + 1)) for v in l.values)
    total = 0.0
    for n in range(1, N + 1):
        qn = q ** n
        total += ((g0 + g1) * 2 * n * qn * qn + (g2 + g3) * n * (qn + qn * qn)) / (1 - qn * qn)
    total *= 8 * PI2
    if return_tail:
        wt = abs(g0) + abs(g1) + abs(g2) + abs(g3)
        tail = 32 * PI2 * wt * (N + 1) * q ** (N + 1) / ((1 - q) ** 2 * (1 - q * q)) if q else 0.0
        return total, tail
    return total
