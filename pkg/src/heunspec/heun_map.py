"""Parameter map between the elliptic Hamiltonian and the Heun equation.

With ``w = (e1 - e3) / (wp(x) - e3)`` and the gauge factor
``w^((l0+1)/2) (w-1)^((l1+1)/2) (aw-1)^((l2+1)/2)``, the eigenvalue problem
``(H - E) f = 0`` becomes Heun's equation with singular points
``0, 1, 1/a, infinity``::

    f'' + ((l0+3/2)/w + (l1+3/2)/(w-1) + (l2+3/2)/(w-1/a)) f'
        + (alpha beta w - q) / (w (w-1)(w-1/a)) f = 0
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from scipy.optimize import newton

from .couplings import CouplingConstants, as_couplings
from .elliptic import DEFAULT_TERMS, EllipticContext, modular_lambda
from .errors import ConvergenceError, DomainError

__all__ = ["HeunParams", "from_heun", "heun_operator", "p_symbol", "q_tilde", "to_heun",
           "invert_lambda"]

# Nome range on which the lambda inversion is validated.
P_MAX = 0.5


@dataclass(frozen=True)
class HeunParams:
    """Heun data: ``a``, accessory ``q``, ``alpha``, ``beta`` and the finite exponents.

    ``gamma, delta, epsilon`` are the coefficients ``l0+3/2, l1+3/2, l2+3/2``
    of ``f'``; the non-zero local exponents at ``0, 1, 1/a`` are
    ``1 - gamma, 1 - delta, 1 - epsilon``.
    """

    a: float
    q: float
    alpha: object
    beta: object
    gamma: object
    delta: object
    epsilon: object

    @property
    def fuchs_residual(self):
        """``(alpha + beta + 1) - (gamma + delta + epsilon)``; zero for valid data."""
        return self.alpha + self.beta + 1 - (self.gamma + self.delta + self.epsilon)

    def as_dict(self) -> dict:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.__dict__.items()}


def _half(l: CouplingConstants):
    return Fraction(1, 2) if l.exact else 0.5


def q_tilde(l: CouplingConstants, a):
    """``(a+1)/3 sum l_i(l_i+1) - a (l0+l2+2)^2 - (l0+l1+2)^2``."""
    return (a + 1) * l.casimir_sum / 3 - a * (l.l0 + l.l2 + 2) ** 2 - (l.l0 + l.l1 + 2) ** 2


def to_heun(l, ctx: EllipticContext, E: float) -> HeunParams:
    """Heun parameters for couplings ``l``, nome ``ctx.p`` and energy ``E`` (with pi^2)."""
    l = as_couplings(l) if not isinstance(l, CouplingConstants) else l
    if ctx.p == 0:
        raise DomainError("p = 0 is the hypergeometric limit; use the trigonometric basis")
    e1, _, e3 = ctx.values
    a = ctx.a
    half = _half(l)
    q = -(E / (e1 - e3) + float(q_tilde(l, a))) / (4 * a)
    alpha = (l.l0 + l.l1 + l.l2 + l.l3 + 4) * half
    beta = (l.l0 + l.l1 + l.l2 - l.l3 + 3) * half
    return HeunParams(a, q, alpha, beta, l.l0 + 3 * half, l.l1 + 3 * half, l.l2 + 3 * half)


def invert_lambda(a: float, N: int = DEFAULT_TERMS, tol: float = 1e-14) -> float:
    """Nome ``p`` with ``modular_lambda(p) = a`` by Newton iteration from ``a / 16``."""
    if a == 0 or a == 1:
        raise DomainError("a = 0 and a = 1 are degenerate")
    lo, hi = modular_lambda(-P_MAX, N), modular_lambda(P_MAX, N)
    if not lo < a < hi:
        raise DomainError(f"a = {a} is outside the validated range ({lo:.6g}, {hi:.6g})")
    try:
        p = newton(lambda t: modular_lambda(t, N) - a, a / 16, tol=tol, maxiter=200)
    except RuntimeError as exc:
        raise ConvergenceError(f"lambda inversion did not converge for a = {a}") from exc
    if not abs(p) <= P_MAX or abs(modular_lambda(p, N) - a) > 1e-12 * max(1.0, abs(a)):
        # the secant may wander for a close to 1; bracket instead
        from scipy.optimize import brentq
        p = brentq(lambda t: modular_lambda(t, N) - a, -P_MAX, P_MAX, xtol=1e-16, maxiter=500)
    return float(p)


def from_heun(h: HeunParams, N: int = DEFAULT_TERMS, fuchs_tol: float = 1e-12
              ) -> Tuple[CouplingConstants, float, float]:
    """Recover ``(l, p, E)`` from Heun data.

    ``l_i`` come from ``gamma, delta, epsilon`` and ``alpha - beta``.  The
    Hamiltonian only sees ``l (l + 1)``, so ``l`` and ``-l - 1`` are
    equivalent; the representative ``l >= -1/2`` is returned.  ``p`` solves
    ``modular_lambda(p) = a`` and ``E = -(4 a q + q~)(e1 - e3)``.
    """
    if abs(float(h.fuchs_residual)) > fuchs_tol:
        raise DomainError(f"Fuchs relation violated by {float(h.fuchs_residual):.3e}")
    exact = all(isinstance(v, (int, Fraction)) for v in (h.alpha, h.beta, h.gamma, h.delta, h.epsilon))
    half = Fraction(1, 2) if exact else 0.5
    raw = (h.gamma - 3 * half, h.delta - 3 * half, h.epsilon - 3 * half, h.alpha - h.beta - half)
    l = CouplingConstants(*(v if v >= -half else -v - 1 for v in raw))
    p = invert_lambda(float(h.a), N)
    ctx = EllipticContext(p, N)
    e1, _, e3 = ctx.values
    a = ctx.a
    E = (-4 * a * h.q - float(q_tilde(l, a))) * (e1 - e3)
    return l, p, E


def p_symbol(l) -> dict:
    """Local exponents: ``{0, -l0-1/2}``, ``{0, -l1-1/2}``, ``{0, -l2-1/2}``, ``{alpha, beta}``."""
    l = as_couplings(l) if not isinstance(l, CouplingConstants) else l
    half = _half(l)
    return {
        "0": (0 * half, -l.l0 - half),
        "1": (0 * half, -l.l1 - half),
        "1/a": (0 * half, -l.l2 - half),
        "inf": ((l.l0 + l.l1 + l.l2 + l.l3 + 4) * half, (l.l0 + l.l1 + l.l2 - l.l3 + 3) * half),
    }


def heun_operator(h: HeunParams, f, df, d2f, w):
    """Left-hand side of Heun's equation for values ``f, f', f''`` at ``w``."""
    a = h.a
    return (d2f + (h.gamma / w + h.delta / (w - 1) + h.epsilon / (w - 1 / a)) * df
            + (h.alpha * h.beta * w - h.q) / (w * (w - 1) * (w - 1 / a)) * f)
