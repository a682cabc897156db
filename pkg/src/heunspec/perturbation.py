"""Perturbation series for the eigenvalues and eigenfunctions.

Two engines are provided:

* :func:`expand_a` expands the Heun form ``L f = 0`` in the modular
  parameter ``a`` around the hypergeometric limit, with the tridiagonal
  coefficients ``A~, B~, C~``.
* :func:`expand_p_direct` runs Rayleigh-Schroedinger perturbation in the nome
  ``p`` with the Fourier data ``V_k`` of the potential.

:func:`energy_map` turns an ``a``-series into a physical ``E(p)`` series, so
the two engines can be compared coefficient by coefficient.

Both engines work sector by sector (see :mod:`heunspec.trig_basis`): levels
are addressed by their case-wide label ``m`` and, for the Fourier case, a
sector label.  Inside a sector the basis index is ``k``.  Energies are kept in
units of pi^2 throughout; exact couplings give exact rational coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .couplings import CouplingConstants, as_couplings
from .elliptic import EllipticContext, elliptic_series, potential_fourier, wp_eval
from .errors import DegeneracyError, DomainError
from .series import TruncatedSeries
from .trig_basis import (BasisCase, Sector, hypergeometric_poly, jacobi_norm,
                         jacobi_norm_ratio, sector_eigenvalue, three_term)

__all__ = [
    "EigSeriesA",
    "EigSeriesP",
    "DecayReport",
    "decay_diagnostics",
    "eigenfunction_eval",
    "energy_map",
    "expand_a",
    "expand_p_direct",
    "heun_residual",
    "q1_value",
    "tilde_abc",
]

Vector = Dict[int, object]


def _effective(l: CouplingConstants, sector: Sector):
    """Couplings with ``(l0, l1)`` replaced by the sector's ``(j0, j1)``."""
    return sector.j0, sector.j1, l.l2, l.l3


def _resolve(m: int, l, sector) -> Tuple[CouplingConstants, BasisCase, Sector, int]:
    l = _coerce(l)
    l.require_nonnegative()
    case = BasisCase(l.l0, l.l1)
    sec, k = case.locate(m, sector)
    return l, case, sec, k


def _coerce(l) -> CouplingConstants:
    if isinstance(l, CouplingConstants):
        return l
    if isinstance(l, str):
        return as_couplings(l)
    items = list(l)
    return as_couplings(items, exact=not any(isinstance(v, float) for v in items))


def q1_value(j0, j1, l2, l3):
    """``((j0+j1+l2-l3+3)(j0+j1+l2+l3+4) - (j0+j1+2)^2) / 4``."""
    return ((j0 + j1 + l2 - l3 + 3) * (j0 + j1 + l2 + l3 + 4) - (j0 + j1 + 2) ** 2) / 4


def tilde_abc(m: int, l, sector: Optional[Sector] = None):
    """``(A~_m, B~_m, C~_m)`` of the ``a``-expansion.

    Each is ``-(l2 + 3/2) X' - (E_m + q1) X`` with ``X`` the ``w``-recurrence
    coefficient and ``X'`` the ``w (w - 1) d/dw`` one, ``E_m = (2m + s)^2 / 4``.
    ``sector`` defaults to ``(j0, j1) = (l0, l1)``.
    """
    l = _coerce(l)
    j0, j1 = (l.l0, l.l1) if sector is None else (sector.j0, sector.j1)
    l2, l3 = l.l2, l.l3
    A, B, C, A1, B1, C1 = three_term(m, j0, j1)
    half = Fraction(1, 2) if l.exact else 0.5
    e_m = (2 * m + j0 + j1 + 2) ** 2 * half * half
    q1 = q1_value(j0, j1, l2, l3)
    c2 = l2 + 3 * half
    return (-c2 * A1 - (e_m + q1) * A,
            -c2 * B1 - (e_m + q1) * B,
            -c2 * C1 - (e_m + q1) * C)


# -- a-engine -----------------------------------------------------------------

@dataclass(frozen=True)
class EigSeriesA:
    """``E_m(a)`` and the banded eigenvector table of the Heun-form expansion.

    ``evals[k]`` is the coefficient of ``a^k`` of the reduced eigenvalue
    ``E = (2m+s)^2/4 + ...``; ``evecs[k]`` maps sector index ``n`` to the
    coefficient of ``psi~_n``.  The gauge fixes the coefficient of the
    starting index to 1 at every order.
    """

    m: int
    couplings: CouplingConstants
    order: int
    sector: Sector
    index: int
    evals: tuple
    evecs: tuple

    def energy_series(self) -> TruncatedSeries:
        return TruncatedSeries(self.evals, "a")

    def coefficient_series(self, n: int) -> TruncatedSeries:
        zero = self.evals[0] * 0
        return TruncatedSeries(tuple(v.get(n, zero) for v in self.evecs), "a")

    def support(self) -> List[int]:
        return sorted({n for v in self.evecs for n in v})


def _tilde_table(n_max: int, l: CouplingConstants, sector: Sector):
    return [tilde_abc(n, l, sector) for n in range(n_max + 1)]


def expand_a(m: int, l, K: int, sector=None) -> EigSeriesA:
    """Expand the level ``m`` in powers of ``a`` to order ``K``.

    Order ``k`` of the eigenvector obeys::

        (E_k0 - E_n) c_n^k = c_(n+1)^(k-1) C~_(n+1) + c_n^(k-1) B~_n
                             + c_(n-1)^(k-1) A~_(n-1) - sum_(i=1..k-1) E^i c_n^(k-i)

    and ``E^k`` is the same right-hand side at ``n = k0`` without the sum.
    Indices below zero do not occur since ``C~_0 = 0``.
    """
    l, case, sec, k0 = _resolve(m, l, sector)
    if K < 0:
        raise DomainError("order must be non-negative")
    tab = _tilde_table(k0 + K + 1, l, sec)
    energy = [sector_eigenvalue(n, sec) / (4 if not l.exact else Fraction(4))
              for n in range(k0 + K + 2)]
    zero = energy[0] * 0
    evals = [energy[k0]]
    evecs: List[Vector] = [{k0: zero + 1}]
    for k in range(1, K + 1):
        prev = evecs[k - 1]
        lo, hi = max(0, k0 - k), k0 + k
        rhs: Vector = {}
        for n in range(lo, hi + 1):
            acc = zero
            if n + 1 in prev:
                acc = acc + prev[n + 1] * tab[n + 1][2]
            if n in prev:
                acc = acc + prev[n] * tab[n][1]
            if n - 1 in prev:
                acc = acc + prev[n - 1] * tab[n - 1][0]
            rhs[n] = acc
        evals.append(rhs[k0])
        cur: Vector = {}
        for n in range(lo, hi + 1):
            if n == k0:
                continue
            acc = rhs[n]
            for i in range(1, k):
                c = evecs[k - i].get(n)
                if c is not None:
                    acc = acc - evals[i] * c
            den = energy[k0] - energy[n]
            if den == 0:
                raise DegeneracyError(f"E_{k0} = E_{n} in sector {sec.label}")
            cur[n] = acc / den
        evecs.append(cur)
    return EigSeriesA(m, l, K, sec, k0, tuple(evals), tuple(evecs))


# -- p-engine -----------------------------------------------------------------

@dataclass(frozen=True)
class EigSeriesP:
    """Physical eigenvalue series ``E_m(p)`` (pi^2 units) and eigenvector table.

    ``evals[0]`` already contains ``C_T``.  ``gauge`` is ``"unit"`` for the
    Rayleigh-Schroedinger vector (unit norm; ``evecs`` hold coefficients
    relative to ``psi~``, i.e. ``c_(m,n) c~_n / c~_m``), or ``"heun"`` for an
    ``a``-series recomposed in ``p`` (coefficients of ``psi~_n`` in the Heun
    variable).
    """

    m: int
    couplings: CouplingConstants
    order: int
    sector: Sector
    index: int
    evals: tuple
    evecs: tuple
    c_t: object
    gauge: str = "unit"

    def energy_series(self) -> TruncatedSeries:
        return TruncatedSeries(self.evals, "p")

    def __call__(self, p):
        """Truncated ``E_m(p)`` in pi^2 units."""
        return self.energy_series()(p)

    @property
    def trig_eigenvalue(self):
        return sector_eigenvalue(self.index, self.sector)

    def coefficient_series(self, n: int) -> TruncatedSeries:
        zero = self.evals[0] * 0
        return TruncatedSeries(tuple(v.get(n, zero) for v in self.evecs), "p")

    def support(self) -> List[int]:
        return sorted({n for v in self.evecs for n in v})


def energy_map(es: EigSeriesA, ctx: Optional[EllipticContext] = None,
               K: Optional[int] = None) -> EigSeriesP:
    """Compose ``E(a)`` with ``a(p)``.

    ``E(p) = 4 (e1 - e3) E(a(p)) + (j0 + l2 + 2)^2 a(p) (e1 - e3) + sum_i l_i(l_i+1) e3``

    with ``e_i`` and ``a`` the p-series of :mod:`heunspec.elliptic` (pi^2
    units).  The eigenvector table is recomposed the same way.  ``ctx`` is
    accepted for interface symmetry; only its truncation matters through
    ``K``.
    """
    K = es.order if K is None else K
    if K > es.order:
        raise DomainError(f"requested order {K} exceeds the a-series order {es.order}")
    ser = elliptic_series(K)
    exact = es.couplings.exact
    conv = (lambda s: s) if exact else (lambda s: s.to_float())
    e1, e3, a_p = conv(ser["e1"]), conv(ser["e3"]), conv(ser["a"])
    l = es.couplings
    j0 = es.sector.j0
    gap = e1 - e3
    ea = es.energy_series().truncate(K).compose(a_p)
    total = gap * ea * 4 + a_p * gap * ((j0 + l.l2 + 2) ** 2) + e3 * l.casimir_sum
    evecs = []
    cols = {n: es.coefficient_series(n).truncate(K).compose(a_p) for n in es.support()}
    for k in range(K + 1):
        evecs.append({n: s[k] for n, s in cols.items() if s[k] != 0 or n == es.index})
    c_t = -l.casimir_sum / (3 if not exact else Fraction(3))
    return EigSeriesP(es.m, l, K, es.sector, es.index, total.coeffs, tuple(evecs),
                      c_t, gauge="heun")


class _WAction:
    """Multiplication by ``w`` (and polynomials in ``w``) on ``psi~``-vectors."""

    def __init__(self, j0, j1, n_max: int):
        self.rows = [three_term(n, j0, j1)[:3] for n in range(n_max + 1)]

    def times_w(self, vec: Vector) -> Vector:
        out: Vector = {}
        for n, c in vec.items():
            A, B, C = self.rows[n]
            out[n + 1] = out.get(n + 1, 0) + c * A
            out[n] = out.get(n, 0) + c * B
            if n > 0:
                out[n - 1] = out.get(n - 1, 0) + c * C
        return out

    def times_poly(self, coeffs, vec: Vector) -> Vector:
        out: Vector = {}
        power = dict(vec)
        for j, cj in enumerate(coeffs):
            if j:
                power = self.times_w(power)
            if cj == 0:
                continue
            for n, c in power.items():
                out[n] = out.get(n, 0) + cj * c
        return out


def expand_p_direct(m: int, l, K: int, sector=None) -> EigSeriesP:
    """Rayleigh-Schroedinger expansion in ``p`` with unit-norm eigenvectors.

    The perturbation ``V_k`` acts on ``psi~_n`` through ``cos 2 pi n x =
    T_n(1 - 2w)`` and repeated ``w``-recurrences.  Coefficients are carried
    relative to ``psi~`` so that, in exact mode, everything stays rational;
    the normalization uses the exact ratios ``c~_n^2 / c~_m^2``.
    """
    l, case, sec, k0 = _resolve(m, l, sector)
    if K < 0:
        raise DomainError("order must be non-negative")
    exact = l.exact
    vks, c_t = potential_fourier(l, max(K, 1))
    vpolys = [v.w_coefficients() for v in vks]
    if not exact:
        vpolys = [[float(c) for c in poly] for poly in vpolys]
        c_t = float(c_t)
    n_max = k0 + K + 1
    act = _WAction(sec.j0, sec.j1, n_max + K + 1)
    one = Fraction(1) if exact else 1.0
    energy = [sector_eigenvalue(n, sec) * one for n in range(n_max + 1)]
    # r[n] = c~_k0^2 / c~_n^2
    sq = [one]
    for n in range(n_max):
        sq.append(sq[-1] * jacobi_norm_ratio(n, sec.j0, sec.j1))
    ratio = [sq[k0] / sq[n] for n in range(n_max + 1)]

    zero = 0 * one
    gam: List[Vector] = [{k0: one}]
    evals = [energy[k0] + c_t]
    for k in range(1, K + 1):
        acc_vec: Vector = {}
        for kp in range(1, k + 1):
            moved = act.times_poly(vpolys[kp - 1], gam[k - kp])
            for n, c in moved.items():
                acc_vec[n] = acc_vec.get(n, zero) + c
        e_k = acc_vec.get(k0, zero)
        for i in range(1, k):
            e_k = e_k - gam[k - i].get(k0, zero) * evals[i]
        evals.append(e_k)
        cur: Vector = {}
        for n, s in acc_vec.items():
            if n == k0:
                continue
            val = s
            for i in range(1, k):
                c = gam[k - i].get(n)
                if c is not None:
                    val = val - c * evals[i]
            den = energy[k0] - energy[n]
            if den == 0:
                raise DegeneracyError(f"E_{k0} = E_{n} in sector {sec.label}")
            if val != 0:
                cur[n] = val / den
        norm = zero
        for i in range(1, k):
            for n, c in gam[i].items():
                d = gam[k - i].get(n)
                if d is not None:
                    norm = norm + c * d * ratio[n]
        cur[k0] = -norm / 2
        gam.append(cur)
    return EigSeriesP(m, l, K, sec, k0, tuple(evals), tuple(gam), c_t, gauge="unit")


# -- evaluation ---------------------------------------------------------------

def _heun_w(x: float, ctx: EllipticContext) -> float:
    e1, _, e3 = ctx.values
    return (e1 - e3) / (float(wp_eval(x, 0, ctx).real) - e3)


def eigenfunction_eval(es, point: float, ctx: EllipticContext, coordinate: str = "x",
                       recompose: bool = True):
    """Evaluate a truncated eigenfunction.

    For an :class:`EigSeriesA` returns ``(f~(w), f(x))`` with
    ``f~ = sum_k a^k sum_n c~_n^k psi~_n(w)`` and
    ``f = w^((j0+1)/2) (1-w)^((j1+1)/2) (1-aw)^((l2+1)/2) f~`` in the Heun
    variable ``w = (e1 - e3)/(wp(x) - e3)``.  The sign-flipped factors
    ``1 - w`` and ``1 - aw`` differ from ``w - 1``, ``aw - 1`` by constant
    phases only, so ``f`` is real on ``(0, 1/2)``.  With ``recompose`` the
    table is first rewritten as a series in ``p`` (``a = a(p)``), which
    converges much faster than summing in ``a`` directly.

    For an :class:`EigSeriesP` with the unit gauge returns ``(None, v(x))``
    with ``v = Phi(x) * sum_k p^k sum_n c_(m,n)^k psi_n(x)``.

    ``coordinate="w"`` (a-series only) takes ``point`` as ``w`` and skips the
    ``x`` prefactor.
    """
    if isinstance(es, EigSeriesP) and es.gauge == "unit":
        if coordinate != "x":
            raise DomainError("unit-gauge series are evaluated at x")
        return None, _eval_unit(es, point, ctx.p)
    if isinstance(es, EigSeriesP):
        raise DomainError("evaluate Heun-gauge series through their EigSeriesA")
    l = es.couplings
    if coordinate == "w":
        w = float(point)
    elif coordinate == "x":
        if not 0 < point < 0.5:
            raise DomainError("x must lie in (0, 1/2)")
        w = _heun_w(point, ctx)
    else:
        raise DomainError("coordinate must be 'x' or 'w'")
    a = ctx.a
    sec = es.sector
    support = es.support()
    if recompose:
        pser = energy_map(es)
        coeffs = {n: float(pser.coefficient_series(n)(ctx.p)) for n in support}
    else:
        coeffs = {n: float(es.coefficient_series(n)(a)) for n in support}
    ftilde = sum(c * float(hypergeometric_poly(n, sec.j0, sec.j1)(w)) for n, c in coeffs.items())
    if coordinate == "w":
        return ftilde, None
    pref = (w ** ((float(sec.j0) + 1) / 2) * (1 - w) ** ((float(sec.j1) + 1) / 2)
            * (1 - a * w) ** ((float(l.l2) + 1) / 2))
    return ftilde, pref * ftilde


def _eval_unit(es: EigSeriesP, x: float, p: float) -> float:
    sec = es.sector
    s = math.sin(math.pi * x)
    c = math.cos(math.pi * x)
    w = s * s
    case = BasisCase(es.couplings.l0, es.couplings.l1)
    a0, a1 = case.gauge_powers
    total = 0.0
    for n in es.support():
        coef = float(es.coefficient_series(n)(p))
        total += coef * float(hypergeometric_poly(n, sec.j0, sec.j1)(w))
    base = jacobi_norm(es.index, sec.j0, sec.j1)
    return base * total * s ** sec.sin_pow * c ** sec.cos_pow * abs(s) ** float(a0) * abs(c) ** float(a1)


def heun_residual(es: EigSeriesA, a, w) -> object:
    """Residual of the Heun operator ``L`` on the truncated ``f~`` at ``w``.

    ``L = (aw-1) L_T + a w (w-1)(l2+3/2) d/dw + a q1 w + E`` with ``E`` the
    truncated ``E(a)``.  Exact inputs give an exact result.
    """
    l = es.couplings
    sec = es.sector
    j0, j1, l2, l3 = _effective(l, sec)
    half = Fraction(1, 2) if l.exact and isinstance(a, Fraction) else 0.5
    q1 = q1_value(j0, j1, l2, l3)
    energy = es.energy_series()(a)
    total = 0 * a
    for n in es.support():
        coef = es.coefficient_series(n)(a)
        poly = hypergeometric_poly(n, j0, j1)
        f, d1, d2 = poly(w), poly.derivative()(w), poly.derivative().derivative()(w)
        lt = (w * (w - 1) * (d2 + ((j0 + 3 * half) / w + (j1 + 3 * half) / (w - 1)) * d1)
              + (j0 + j1 + 2) ** 2 * half * half * f)
        val = (a * w - 1) * lt + a * w * (w - 1) * (l2 + 3 * half) * d1 + a * q1 * w * f + energy * f
        total = total + coef * val
    return total


# -- diagnostics --------------------------------------------------------------

@dataclass(frozen=True)
class DecayReport:
    """Geometric fit of eigenvector coefficients against the index distance."""

    q: float
    distances: tuple
    magnitudes: tuple
    ratio: float
    intercept: float
    bound_ratio: Optional[float] = None
    within_bound: Optional[bool] = None
    zone_half_width: float = field(default=float("inf"))
    terminating: bool = False

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "ratio": self.ratio,
            "intercept": self.intercept,
            "bound_ratio": self.bound_ratio,
            "within_bound": self.within_bound,
            "zone_half_width": self.zone_half_width,
            "terminating": self.terminating,
            "distances": list(self.distances),
            "magnitudes": list(self.magnitudes),
        }


def decay_diagnostics(es, q: float, C: Optional[float] = None, floor: float = 1e-300) -> DecayReport:
    """Fit ``|s_n| ~ c * R^|n - m|`` for the summed eigenvector coefficients at ``q``.

    ``q`` is ``a`` for an :class:`EigSeriesA` and ``p`` for an
    :class:`EigSeriesP`.  When ``C`` is given, the fitted ``R`` is compared
    with ``sqrt(C |q|)``.  The zone half-width ``log(1/R) / (2 pi)`` is the
    strip ``|Im x|`` in which the eigenfunction series converges when ``R < 1``.

    A vector with at most one non-zero off-diagonal coefficient (as on an
    invariant space, where the ``a``-series terminates) is reported as
    ``terminating`` with ratio 0.
    """
    if es.order < 4:
        raise DomainError("decay diagnostics need series order >= 4")
    q = float(q)
    dist, mags = [], []
    for n in es.support():
        if n == es.index:
            continue
        val = abs(float(es.coefficient_series(n)(q)))
        dist.append(abs(n - es.index))
        mags.append(val)
    if q == 0 or not mags or all(v == 0 for v in mags):
        if q != 0:
            raise DomainError("all off-diagonal coefficients vanish; nothing to fit")
        return DecayReport(q, tuple(dist), tuple(mags), 0.0, 0.0,
                           None if C is None else 0.0, None if C is None else True)
    d = np.array(dist, dtype=float)
    y = np.log(np.maximum(np.array(mags), floor))
    keep = np.array(mags) > floor
    if keep.sum() < 2:
        return DecayReport(q, tuple(dist), tuple(mags), 0.0, 0.0,
                           None if C is None else math.sqrt(C * abs(q)),
                           None if C is None else True, float("inf"), terminating=True)
    slope, intercept = np.polyfit(d[keep], y[keep], 1)
    ratio = float(math.exp(slope))
    bound = within = None
    if C is not None:
        if C <= 1:
            raise DomainError("C must exceed 1")
        bound = math.sqrt(C * abs(q))
        within = ratio <= bound
    zone = math.log(1 / ratio) / (2 * math.pi) if ratio < 1 else 0.0
    return DecayReport(q, tuple(dist), tuple(mags), ratio, float(intercept), bound, within, zone)
