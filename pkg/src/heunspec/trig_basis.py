"""Polynomial eigenbases of the trigonometric (p = 0) gauge-transformed Hamiltonian.

Every case reduces to a Jacobi family in ``w = sin^2(pi x)``::

    psi_k = norm * sin(pi x)^s * cos(pi x)^c * 2F1(-k, k + j0 + j1 + 2; j0 + 3/2; w)

where the *sector* fixes the effective parameters ``(j0, j1)`` and the
prefactor powers ``(s, c)``.  For ``l0, l1 > 0`` there is one sector with
``(j0, j1) = (l0, l1)``; a vanishing coupling ``l`` may also be represented by
``-l - 1 = -1`` (the Hamiltonian only sees ``l (l + 1)``), which is how the
Gegenbauer and Fourier bases split into periodic/antiperiodic sectors.

Energies returned here are in units of pi^2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_jacobi

from .errors import DegeneracyError, DomainError
from .series import is_exact_number

__all__ = [
    "BasisCase",
    "BasisFunction",
    "PolyInW",
    "Sector",
    "gauge_ground_state",
    "generating_function_check",
    "hypergeometric_poly",
    "inner_product",
    "jacobi_norm",
    "jacobi_norm_ratio",
    "psi_poly",
    "sector_poly",
    "three_term",
    "trig_eigenvalue",
]


# -- polynomials in w ---------------------------------------------------------

@dataclass(frozen=True)
class PolyInW:
    """Polynomial ``sum_i coeffs[i] w^i``."""

    coeffs: tuple

    def __post_init__(self):
        c = list(self.coeffs) or [0]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, w):
        if is_exact_number(self.coeffs[-1]) and isinstance(w, float):
            return float(self(Fraction(w)))
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * w + c
        return acc

    def __add__(self, other: "PolyInW") -> "PolyInW":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return PolyInW(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "PolyInW") -> "PolyInW":
        return self + other.scale(-1)

    def __mul__(self, other) -> "PolyInW":
        if not isinstance(other, PolyInW):
            return self.scale(other)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return PolyInW(tuple(out))

    __rmul__ = __mul__

    def scale(self, factor) -> "PolyInW":
        return PolyInW(tuple(c * factor for c in self.coeffs))

    def derivative(self) -> "PolyInW":
        return PolyInW(tuple(i * c for i, c in enumerate(self.coeffs) if i) or (0,))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)


W = PolyInW((0, 1))


# -- cases and sectors --------------------------------------------------------

@dataclass(frozen=True)
class Sector:
    """One symmetry sector: effective Jacobi parameters plus prefactor powers."""

    label: str
    j0: object
    j1: object
    sin_pow: int = 0
    cos_pow: int = 0

    @property
    def shift(self):
        """``j0 + j1 + 2``; the sector energies are ``(2k + shift)^2``."""
        return self.j0 + self.j1 + 2


@dataclass(frozen=True)
class BasisCase:
    """Which trigonometric eigenbasis applies to ``(l0, l1)``.

    ``tag`` is ``JJ`` (both positive, Jacobi), ``G`` (``l1 = 0``, Gegenbauer in
    cos), ``Gp`` (``l0 = 0``, Gegenbauer in sin) or ``F`` (both zero, Fourier).
    """

    l0: object
    l1: object

    def __post_init__(self):
        if self.l0 < 0 or self.l1 < 0:
            raise DomainError("the trigonometric bases need l0, l1 >= 0")

    @property
    def tag(self) -> str:
        if self.l0 > 0 and self.l1 > 0:
            return "JJ"
        if self.l0 > 0:
            return "G"
        if self.l1 > 0:
            return "Gp"
        return "F"

    @property
    def gauge_powers(self) -> tuple:
        """Exponents of sin and cos in the ground state Phi."""
        return (self.l0 + 1 if self.l0 > 0 else 0, self.l1 + 1 if self.l1 > 0 else 0)

    def sectors(self) -> Tuple[Sector, ...]:
        l0, l1 = self.l0, self.l1
        tag = self.tag
        if tag == "JJ":
            return (Sector("H", l0, l1),)
        if tag == "G":
            return (Sector("+", l0, -1), Sector("-", l0, 0, cos_pow=1))
        if tag == "Gp":
            return (Sector("+", -1, l1), Sector("-", 0, l1, sin_pow=1))
        return (
            Sector("1", -1, -1),
            Sector("2", 0, 0, sin_pow=1, cos_pow=1),
            Sector("3", -1, 0, cos_pow=1),
            Sector("4", 0, -1, sin_pow=1),
        )

    def sector(self, label) -> Sector:
        for sec in self.sectors():
            if sec.label == str(label):
                return sec
        raise DomainError(f"case {self.tag} has no sector {label!r}")

    def locate(self, m: int, sector=None) -> Tuple[Sector, int]:
        """Map the case-wide level label ``m`` to ``(sector, index in sector)``.

        JJ: ``m`` is the Jacobi degree.  G/Gp: ``m`` is the Gegenbauer degree
        and the parity of ``m`` selects the sector.  F: ``m`` is the Fourier
        index and ``sector`` (1..4) must be given; sectors 1, 2 need even
        ``m``, sectors 3, 4 odd ``m``, and sector 2 needs ``m >= 2``.
        """
        if m < 0:
            raise DomainError("level index must be non-negative")
        tag = self.tag
        if tag == "JJ":
            return self.sectors()[0], m
        if tag in ("G", "Gp"):
            return self.sectors()[m % 2], m // 2
        if sector is None:
            raise DomainError("the Fourier case needs a sector label 1..4")
        sec = self.sector(sector)
        if sec.label in ("1", "2") and m % 2:
            raise DomainError(f"sector {sec.label} holds even Fourier indices only")
        if sec.label in ("3", "4") and not m % 2:
            raise DomainError(f"sector {sec.label} holds odd Fourier indices only")
        if sec.label == "2":
            if m < 2:
                raise DomainError("sector 2 starts at m = 2")
            return sec, m // 2 - 1
        return sec, m // 2

    def level(self, sector: Sector, k: int) -> int:
        """Inverse of :meth:`locate`: case-wide label of index ``k`` in ``sector``."""
        tag = self.tag
        if tag == "JJ":
            return k
        if tag in ("G", "Gp"):
            return 2 * k + (0 if sector.label == "+" else 1)
        return {"1": 2 * k, "2": 2 * k + 2, "3": 2 * k + 1, "4": 2 * k + 1}[sector.label]


@dataclass(frozen=True)
class BasisFunction:
    """``norm * sin(pi x)^sin_pow * cos(pi x)^cos_pow * poly(sin^2 pi x)``."""

    poly: PolyInW
    sin_pow: int = 0
    cos_pow: int = 0
    norm: float = 1.0

    def __call__(self, x: float) -> float:
        s, c = math.sin(math.pi * x), math.cos(math.pi * x)
        return self.norm * s ** self.sin_pow * c ** self.cos_pow * float(self.poly(s * s))

    def unnormalized(self) -> "BasisFunction":
        return BasisFunction(self.poly, self.sin_pow, self.cos_pow, 1.0)


# -- Jacobi data --------------------------------------------------------------

def _one(*values):
    return Fraction(1) if all(is_exact_number(v) for v in values) else 1.0


def hypergeometric_poly(m: int, j0, j1) -> PolyInW:
    """``2F1(-m, m + j0 + j1 + 2; j0 + 3/2; w)`` as monomial coefficients."""
    if m < 0:
        raise DomainError("degree must be non-negative")
    one = _one(j0, j1)
    b = m + j0 + j1 + 2
    c = j0 + one * 3 / 2
    coeffs = [one]
    term = one
    for k in range(m):
        if c + k == 0:
            raise DegeneracyError("hypergeometric denominator vanishes")
        term = term * (-m + k) * (b + k) / ((c + k) * (k + 1))
        coeffs.append(term)
    return PolyInW(tuple(coeffs))


def _lgamma_ratio_norm_sq(m: int, j0, j1) -> float:
    """log of ``c_m^2`` for the Jacobi normalization."""
    j0, j1 = float(j0), float(j1)
    s = j0 + j1 + 2
    if m == 0:
        log_n = math.lgamma(s + 1)
    else:
        log_n = math.log(2 * m + s) + math.lgamma(m + s)
    return (
        math.log(math.pi) + log_n + math.lgamma(j0 + m + 1.5)
        - math.lgamma(m + 1) - math.lgamma(m + j1 + 1.5) - 2 * math.lgamma(j0 + 1.5)
    )


def jacobi_norm(m: int, j0, j1) -> float:
    """Constant ``c_m`` making ``c_m * psi~_m`` unit-norm for the weight |Phi|^2.

    ``c_m^2 = pi (2m+s) Gamma(m+s) Gamma(j0+m+3/2) / (m! Gamma(m+j1+3/2) Gamma(j0+3/2)^2)``
    with ``s = j0 + j1 + 2``; the factor ``(2m+s) Gamma(m+s)`` is read as
    ``Gamma(s+1)`` at ``m = 0`` (its limit when ``s -> 0``).
    """
    return math.exp(0.5 * _lgamma_ratio_norm_sq(m, j0, j1))


def jacobi_norm_ratio(m: int, j0, j1):
    """Exact ``c_(m+1)^2 / c_m^2`` (rational in ``j0, j1``)."""
    one = _one(j0, j1)
    s = j0 + j1 + 2
    lead = one if m == 0 else (m + s) * one / (2 * m + s)
    return (lead * (2 * m + s + 2) * (m + j0 + one * 3 / 2)
            / ((m + 1) * (m + j1 + one * 3 / 2)))


def sector_poly(k: int, sector: Sector) -> Tuple[BasisFunction, float]:
    """Sector basis function of index ``k`` built on the Jacobi family."""
    poly = hypergeometric_poly(k, sector.j0, sector.j1)
    norm = jacobi_norm(k, sector.j0, sector.j1)
    return BasisFunction(poly, sector.sin_pow, sector.cos_pow, norm), norm


def _rising(x, n):
    acc = x * 0 + 1
    for i in range(n):
        acc = acc * (x + i)
    return acc


def _gegenbauer_even_odd(m: int, nu) -> Tuple[int, list]:
    """``C^nu_m(z) = z^par * Q(z^2)``; return ``par`` and the coefficients of ``Q``."""
    par = m % 2
    q = [0] * (m // 2 + 1)
    for k in range(m // 2 + 1):
        coef = (-1) ** k * _rising(nu, m - k) / (math.factorial(k) * math.factorial(m - 2 * k))
        coef = coef * 2 ** (m - 2 * k)
        q[(m - 2 * k - par) // 2] = coef
    return par, q


def _substitute_one_minus_w(q: Sequence) -> PolyInW:
    """``Q(1 - w)`` as a polynomial in ``w``."""
    out = PolyInW((0,))
    base = PolyInW((1, -1))
    power = PolyInW((1,))
    for c in q:
        out = out + power.scale(c)
        power = power * base
    return out


def _chebyshev(m: int, kind: int) -> list:
    """Monomial coefficients of T_m (kind 1) or U_m (kind 2)."""
    p0 = [Fraction(1)]
    p1 = [Fraction(0), Fraction(kind)]
    if m == 0:
        return p0
    for _ in range(m - 1):
        nxt = [Fraction(0)] * (len(p1) + 1)
        for i, c in enumerate(p1):
            nxt[i + 1] += 2 * c
        for i, c in enumerate(p0):
            nxt[i] -= c
        p0, p1 = p1, nxt
    return p1


def _split_parity(coeffs: Sequence) -> Tuple[int, list]:
    nz = [i for i, c in enumerate(coeffs) if c != 0]
    par = nz[0] % 2 if nz else 0
    return par, [coeffs[i] for i in range(par, len(coeffs), 2)]


def psi_poly(m: int, case: BasisCase, sector=None) -> Tuple[BasisFunction, float]:
    """Normalized trigonometric eigenfunction with case-wide label ``m``.

    Built from the case's classical family (Jacobi, Gegenbauer in cos or sin,
    or cos/sin Fourier modes), independently of the sector reduction.  The
    polynomial part is scaled to equal 1 at ``w = 0``; the returned constant
    restores the unit norm.  In the Fourier case ``sector`` picks cosines
    (1, 3) or sines (2, 4).

    Float couplings are replaced by their exact binary values, so the monomial
    coefficients carry no rounding; at degree 10 the cancellation in the
    monomial sum would otherwise cost several digits.
    """
    if m < 0:
        raise DomainError("degree must be non-negative")
    if not all(is_exact_number(v) for v in (case.l0, case.l1)):
        case = BasisCase(Fraction(case.l0), Fraction(case.l1))
    tag = case.tag
    if tag == "JJ":
        return sector_poly(m, case.sectors()[0])
    if tag in ("G", "Gp"):
        lam = case.l0 if tag == "G" else case.l1
        nu = lam + 1
        par, q = _gegenbauer_even_odd(m, nu)
        flam = float(lam)
        norm_g = math.exp(0.5 * (
            (2 * flam + 1) * math.log(2) + math.log(m + flam + 1) + math.lgamma(m + 1)
            + 2 * math.lgamma(flam + 1) - math.lgamma(m + 2 * flam + 2)))
        if tag == "G":
            poly = _substitute_one_minus_w(q)
            fn = BasisFunction(poly, 0, par)
        else:
            poly = PolyInW(tuple(q))
            fn = BasisFunction(poly, par, 0)
        lead = poly.coeffs[0]
        norm = norm_g * float(lead)
        fn = BasisFunction(poly.scale(1 / lead), fn.sin_pow, fn.cos_pow, norm)
        return fn, norm
    # Fourier case
    if sector is None:
        sector = "1" if m % 2 == 0 else "3"
    sector = str(sector)
    case.locate(m, sector)
    if m == 0:
        return BasisFunction(PolyInW((Fraction(1),)), 0, 0, 1.0), 1.0
    if sector in ("1", "3"):
        par, q = _split_parity(_chebyshev(m, 1))          # cos(m pi x) = T_m(cos pi x)
        poly = _substitute_one_minus_w(q)
        fn = BasisFunction(poly, 0, par)
    else:
        par, q = _split_parity(_chebyshev(m - 1, 2))      # sin(m pi x) = sin(pi x) U_(m-1)(cos pi x)
        poly = _substitute_one_minus_w(q)
        fn = BasisFunction(poly, 1, par)
    lead = poly.coeffs[0]
    norm = math.sqrt(2) * float(lead)
    return BasisFunction(poly.scale(1 / lead), fn.sin_pow, fn.cos_pow, norm), norm


def trig_eigenvalue(m: int, case: BasisCase, sector=None):
    """Eigenvalue of the gauge-transformed trigonometric operator, in pi^2 units.

    JJ: ``(2m + l0 + l1 + 2)^2``; G: ``(m + l0 + 1)^2``; Gp: ``(m + l1 + 1)^2``;
    F: ``m^2``.  For G/Gp, ``m`` is the Gegenbauer degree.
    """
    if m < 0:
        raise DomainError("level index must be non-negative")
    tag = case.tag
    if tag == "JJ":
        return (2 * m + case.l0 + case.l1 + 2) ** 2
    if tag == "G":
        return (m + case.l0 + 1) ** 2
    if tag == "Gp":
        return (m + case.l1 + 1) ** 2
    return m ** 2 * _one(case.l0)


def sector_eigenvalue(k: int, sector: Sector):
    """``(2k + j0 + j1 + 2)^2`` in pi^2 units."""
    return (2 * k + sector.shift) ** 2


def three_term(m: int, l0, l1):
    """Coefficients of ``w psi~_m`` and ``w (w - 1) psi~_m'`` in ``psi~_(m+1), psi~_m, psi~_(m-1)``.

    Returns ``(A, B, C, A', B', C')``.  The closed forms have removable 0/0
    points at ``m = 0`` when ``l0 + l1 + 2`` is 0 or 1 (the Fourier sectors);
    those are replaced by their limits.
    """
    if m < 0:
        raise DomainError("index must be non-negative")
    one = _one(l0, l1)
    s = l0 + l1 + 2
    half = one / 2
    c0 = m + l0 + 3 * half            # m + (2 l0 + 3)/2
    c1 = m + l1 + half                # m + (2 l1 + 1)/2
    if m == 0:
        if s + 1 == 0:
            raise DegeneracyError("2m + l0 + l1 + 3 vanishes at m = 0")
        A = -c0 / (s + 1)
        B = (l0 + 3 * half) / (s + 1)
        return A, B, 0 * one, 0 * one, 0 * one, 0 * one
    for factor in (2 * m + s - 1, 2 * m + s, 2 * m + s + 1):
        if factor == 0:
            raise DegeneracyError(f"denominator factor {factor} vanishes (m={m}, s={s})")
    d_up = (2 * m + s) * (2 * m + s + 1)
    d_mid = (2 * m + s - 1) * (2 * m + s + 1)
    d_dn = (2 * m + s) * (2 * m + s - 1)
    A = -(m + s) * c0 / d_up
    B = (2 * m * (m + s) + (l0 + 3 * half) * (s - 1)) / d_mid
    C = -m * c1 / d_dn
    A1 = m * A
    B1 = m * (m + s) * (l0 - l1) * one / d_mid
    C1 = -(m + s) * C
    return A, B, C, A1, B1, C1


# -- ground state, inner product, generating function -------------------------

def gauge_ground_state(x: float, case: BasisCase):
    """``Phi(x) = sin(pi x)^(l0+1) cos(pi x)^(l1+1)`` with vanishing couplings dropped.

    Negative bases with non-integer powers use the principal branch and give
    a complex number.
    """
    a, b = case.gauge_powers
    s, c = math.sin(math.pi * x), math.cos(math.pi * x)
    val = _real_power(s, a) * _real_power(c, b)
    if isinstance(val, complex) and abs(val.imag) <= 1e-15 * abs(val):
        return val.real
    return val


def _real_power(base: float, expo):
    if expo == 0:
        return 1.0
    if base >= 0 or float(expo).is_integer():
        return float(base) ** float(expo)
    return cmath.exp(float(expo) * cmath.log(complex(base)))


def _as_function(f, sector: Optional[Sector] = None) -> BasisFunction:
    if isinstance(f, BasisFunction):
        return f
    if isinstance(f, PolyInW):
        return BasisFunction(f)
    return BasisFunction(PolyInW(tuple(f)))


def inner_product(f, g, case: BasisCase, normalized: bool = True) -> float:
    """``<f, g>_Phi`` by Gauss-Jacobi quadrature, exact for polynomial integrands.

    The integral is taken over a full period, ``(1/2) int_{-1}^{1}``.  For
    every pair inside one Hilbert space sector this equals ``int_0^1``; it
    also makes functions of opposite parity orthogonal, which ``int_0^1``
    alone does not do when a prefactor sin(pi x) is present.
    """
    f = _as_function(f)
    g = _as_function(g)
    if (f.sin_pow + g.sin_pow) % 2 or (f.cos_pow + g.cos_pow) % 2:
        return 0.0
    p0, p1 = case.gauge_powers
    a = float(p0) + (f.sin_pow + g.sin_pow) / 2
    b = float(p1) + (f.cos_pow + g.cos_pow) / 2
    prod = f.poly * g.poly
    n = -(-(f.poly.degree + g.poly.degree) // 2) + 4
    nodes, weights = roots_jacobi(n, b - 0.5, a - 0.5)
    ws = (1 + nodes) / 2
    vals = np.array([float(prod(float(w))) for w in ws])
    integral = float(np.dot(weights, vals)) * 2.0 ** (-(a + b)) / math.pi
    scale = f.norm * g.norm if normalized else 1.0
    return scale * integral


def generating_function_check(w, xi, M: int, l0, l1) -> float:
    """``|sum_{m<=M} p_m(w) xi^m - G(w, xi)|`` for the Rodrigues-normalized Jacobi family.

    ``G = 1 / (S ((1 + xi + S)/2)^(l0+1/2) ((1 - xi + S)/2)^(l1+1/2))`` with
    ``S = sqrt((1 + xi)^2 - 4 xi w)``.  The Rodrigues polynomials are
    ``p_m = (-1)^m (l0 + 3/2)_m / m! * psi~_m``, so the residual validates
    :func:`hypergeometric_poly` independently of the recurrences.
    """
    if abs(xi) > 0.3:
        raise DomainError("|xi| must be <= 0.3 for the partial sums to converge")
    S2 = (1 + xi) ** 2 - 4 * xi * w
    if S2 <= 0:
        raise DomainError("S = 0 branch degeneracy")
    S = math.sqrt(S2)
    closed = 1.0 / (S * ((1 + xi + S) / 2) ** (float(l0) + 0.5)
                    * ((1 - xi + S) / 2) ** (float(l1) + 0.5))
    l0e, l1e = Fraction(l0).limit_denominator(10 ** 12), Fraction(l1).limit_denominator(10 ** 12)
    total = 0.0
    scale = Fraction(1)
    for m in range(M + 1):
        if m:
            scale = scale * (l0e + Fraction(1, 2) + m) / m
        pm = hypergeometric_poly(m, l0e, l1e)(Fraction(w).limit_denominator(10 ** 15))
        total += float((-1) ** m * scale * pm) * xi ** m
    return abs(total - closed)
