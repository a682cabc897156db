import math
from fractions import Fraction

import pytest
import scipy.integrate
import sympy as sp

from heunspec.errors import DomainError
from heunspec.trig_basis import (W, BasisCase, PolyInW, gauge_ground_state,
                                 generating_function_check, hypergeometric_poly, inner_product,
                                 jacobi_norm, jacobi_norm_ratio, psi_poly, sector_eigenvalue,
                                 sector_poly, three_term, trig_eigenvalue)
from oracles import fd_second_derivative

F = Fraction
PI2 = math.pi ** 2
CASES = [BasisCase(1, 2), BasisCase(F(1, 2), F(1, 2)), BasisCase(F(23, 10), 0),
         BasisCase(0, F(3, 2)), BasisCase(0, 0)]
SECTOR_PARAMS = [(1, 2), (F(1, 2), F(3, 10)), (-1, -1), (0, 0), (-1, 0), (0, -1), (F(7, 3), -1)]


def _labels(case, count=6):
    """``(m, sector)`` pairs covering the first levels of a case."""
    if case.tag != "F":
        return [(m, None) for m in range(count)]
    out = [(0, "1")]
    for m in range(1, count):
        out += [(m, "1" if m % 2 == 0 else "3")]
        out += [(m, "2" if m % 2 == 0 else "4")] if m >= 2 or m % 2 else []
    return out


def test_low_degree_closed_forms():
    l0, l1 = F(1), F(2)
    assert hypergeometric_poly(0, l0, l1).coeffs == (1,)
    assert hypergeometric_poly(1, l0, l1).coeffs == (1, -2 * (l0 + l1 + 3) / (2 * l0 + 3))


def _jacobi_sum(n, alpha, beta, x):
    """Explicit finite-sum form of ``P_n^(alpha, beta)(x)``."""
    return sum(sp.binomial(n + alpha, n - s) * sp.binomial(n + beta, s)
               * ((x - 1) / 2) ** s * ((x + 1) / 2) ** (n - s) for s in range(n + 1))


@pytest.mark.parametrize("j0,j1", SECTOR_PARAMS)
def test_hypergeometric_poly_against_jacobi_sum(j0, j1):
    w = sp.symbols("w")
    alpha, beta = sp.nsimplify(j0) + sp.Rational(1, 2), sp.nsimplify(j1) + sp.Rational(1, 2)
    for m in range(7):
        P = sp.expand(sp.expand_func(_jacobi_sum(m, alpha, beta, 1 - 2 * w)))
        want = sp.Poly(sp.expand(P / P.subs(w, 0)), w).all_coeffs()[::-1]
        got = [sp.Rational(c.numerator, c.denominator) for c in hypergeometric_poly(m, F(j0), F(j1)).coeffs]
        assert got == want


@pytest.mark.parametrize("j0,j1", SECTOR_PARAMS)
def test_hypergeometric_equation_is_exact(j0, j1):
    j0, j1 = F(j0), F(j1)
    s = j0 + j1 + 2
    for m in range(9):
        f = hypergeometric_poly(m, j0, j1)
        d1, d2 = f.derivative(), f.derivative().derivative()
        lhs = (W * (W - PolyInW((1,)))) * d2 + (W.scale(s + 1) - PolyInW((j0 + F(3, 2),))) * d1
        assert (lhs - f.scale(m * (m + s))).is_zero()


@pytest.mark.parametrize("case", CASES, ids=lambda c: f"{c.tag}{c.l0},{c.l1}")
def test_physical_trig_eigenfunctions(case):
    l0, l1 = float(case.l0), float(case.l1)
    for m, sector in _labels(case):
        fn, _ = psi_poly(m, case, sector)
        u = lambda x: gauge_ground_state(x, case) * fn(x)
        energy = float(trig_eigenvalue(m, case, sector)) * PI2
        for x in (0.13, 0.31):
            pot = l0 * (l0 + 1) * PI2 / math.sin(math.pi * x) ** 2
            pot += l1 * (l1 + 1) * PI2 / math.cos(math.pi * x) ** 2
            res = -fd_second_derivative(u, x) + pot * u(x) - energy * u(x)
            assert abs(res) <= 1e-6 * max(1.0, abs(energy)) * max(abs(u(x)), 1e-3)


@pytest.mark.parametrize("case", CASES, ids=lambda c: f"{c.tag}{c.l0},{c.l1}")
def test_orthonormality_by_adaptive_quadrature(case):
    labels = _labels(case, 5)
    fns = [psi_poly(m, case, s)[0] for m, s in labels]

    def integrand(x, f, g):
        return abs(gauge_ground_state(x, case)) ** 2 * f(x) * g(x)

    for i, f in enumerate(fns):
        for j, g in enumerate(fns[: i + 1]):
            # full period: odd functions of sin(pi x) are orthogonal only over (-1, 1)
            val = sum(scipy.integrate.quad(integrand, lo, lo + 0.5, args=(f, g), epsabs=1e-13,
                                           limit=200)[0] for lo in (-1, -0.5, 0, 0.5)) / 2
            assert val == pytest.approx(float(i == j), abs=1e-9)
            assert inner_product(f, g, case) == pytest.approx(val, abs=1e-10)


def test_orthonormality_float_couplings_up_to_degree_ten():
    for case in (BasisCase(0.5, 0.5), BasisCase(1, 2), BasisCase(2.3, 0)):
        fns = [psi_poly(m, case)[0] for m in range(11)]
        for i in range(11):
            for j in range(i, 11):
                assert inner_product(fns[i], fns[j], case) == pytest.approx(float(i == j), abs=1e-10)


def test_inner_product_trivial_cases():
    assert inner_product(PolyInW((1,)), PolyInW((1,)), BasisCase(0, 0)) == pytest.approx(1.0)
    case = BasisCase(1, 2)
    f0, f1 = psi_poly(0, case)[0], psi_poly(1, case)[0]
    assert inner_product(f0, f0, case) == pytest.approx(1.0, abs=1e-12)
    assert inner_product(f0, f1, case) == pytest.approx(0.0, abs=1e-12)


def test_parity_reduction_to_jacobi_sectors():
    g = BasisCase(F(3, 2), 0)
    for m in range(8):
        sec, k = g.locate(m)
        assert psi_poly(m, g)[0].poly == sector_poly(k, sec)[0].poly
        assert psi_poly(m, g)[0].cos_pow == m % 2
    gp = BasisCase(0, F(3, 2))
    for m in range(8):
        sec, k = gp.locate(m)
        assert psi_poly(m, gp)[0].poly == sector_poly(k, sec)[0].poly
        assert psi_poly(m, gp)[0].sin_pow == m % 2


def test_eigenvalue_formulas():
    assert trig_eigenvalue(2, BasisCase(1, 2)) == (4 + 1 + 2 + 2) ** 2
    assert trig_eigenvalue(3, BasisCase(2, 0)) == (3 + 2 + 1) ** 2
    assert trig_eigenvalue(3, BasisCase(0, 2)) == (3 + 2 + 1) ** 2
    assert trig_eigenvalue(5, BasisCase(0, 0)) == 25
    for case in CASES:
        vals = [trig_eigenvalue(m, case) for m in range(8)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        for m, sector in _labels(case, 8):
            sec, k = case.locate(m, sector)
            assert case.level(sec, k) == m
            assert sector_eigenvalue(k, sec) == trig_eigenvalue(m, case, sector)


def test_three_term_data():
    l0, l1 = F(1), F(2)
    A0, B0, C0, A0p, B0p, C0p = three_term(0, l0, l1)
    assert C0 == 0 and C0p == 0
    assert A0 == -(l0 + F(3, 2)) / (l0 + l1 + 3)


@pytest.mark.parametrize("j0,j1", SECTOR_PARAMS)
def test_three_term_identities_are_exact(j0, j1):
    j0, j1 = F(j0), F(j1)
    for m in range(9):
        A, B, C, A1, B1, C1 = three_term(m, j0, j1)
        up, mid = hypergeometric_poly(m + 1, j0, j1), hypergeometric_poly(m, j0, j1)
        down = hypergeometric_poly(m - 1, j0, j1) if m else PolyInW((0,))
        assert (W * mid - (up.scale(A) + mid.scale(B) + down.scale(C))).is_zero()
        lhs = W * (W - PolyInW((1,))) * mid.derivative()
        assert (lhs - (up.scale(A1) + mid.scale(B1) + down.scale(C1))).is_zero()


def test_norms():
    for j0, j1 in ((1, 2), (F(1, 2), F(3, 10)), (0, 0), (-1, 0)):
        for m in range(6):
            ratio = float(jacobi_norm_ratio(m, F(j0), F(j1)))
            assert ratio == pytest.approx(jacobi_norm(m + 1, j0, j1) ** 2 / jacobi_norm(m, j0, j1) ** 2,
                                          rel=1e-12)


def test_ground_state():
    x = 0.21
    assert gauge_ground_state(x, BasisCase(0, 0)) == 1.0
    assert gauge_ground_state(0.25, BasisCase(1, 2)) == pytest.approx(0.5 ** 1 * 0.5 ** 1.5)
    case = BasisCase(F(1, 2), F(3, 2))
    assert abs(gauge_ground_state(-x, case)) ** 2 == pytest.approx(abs(gauge_ground_state(x, case)) ** 2)


def test_generating_function():
    assert generating_function_check(0.4, 0.0, 5, 1, 2) == pytest.approx(0.0, abs=1e-15)
    assert generating_function_check(0.4, 0.2, 12, 1, 2) < 1e-8
    # partial sums converge geometrically in M
    r8 = generating_function_check(0.3, 0.25, 8, F(1, 2), F(3, 2))
    r16 = generating_function_check(0.3, 0.25, 16, F(1, 2), F(3, 2))
    assert r16 < r8 * 1e-3
    with pytest.raises(DomainError):
        generating_function_check(0.4, 0.5, 5, 1, 2)


def test_errors():
    with pytest.raises(DomainError):
        BasisCase(-1, 0)
    with pytest.raises(DomainError):
        BasisCase(0, 0).locate(2)
    with pytest.raises(DomainError):
        BasisCase(0, 0).locate(3, "1")
    with pytest.raises(DomainError):
        BasisCase(0, 0).locate(0, "2")
    with pytest.raises(DomainError):
        hypergeometric_poly(-1, 1, 1)
    with pytest.raises(DomainError):
        three_term(-1, 1, 1)
