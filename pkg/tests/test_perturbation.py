import math
from fractions import Fraction

import pytest
import sympy as sp

from heunspec.couplings import as_couplings
from heunspec.elliptic import PI2, EllipticContext
from heunspec.errors import DegeneracyError, DomainError
from heunspec.perturbation import (decay_diagnostics, eigenfunction_eval, energy_map, expand_a,
                                   expand_p_direct, heun_residual, q1_value, tilde_abc)
from heunspec.trig_basis import hypergeometric_poly
from heunspec.validation import closed_form_1208, closed_form_1041, fd_eigen_residual
from oracles import fourier_galerkin_levels, galerkin_levels

F = Fraction
GENERIC = (1, 2, F(1, 2), F(3, 10))

# (couplings, level, sector) covering every sector family
ENGINE_CASES = [
    ((1, 2, 0, 8), 0, None), ((1, 2, 0, 8), 2, None), (GENERIC, 1, None),
    ((F(3, 2), 0, 1, 2), 0, None), ((F(3, 2), 0, 1, 2), 1, None),
    ((0, F(3, 2), 2, 1), 0, None), ((0, F(3, 2), 2, 1), 3, None),
    ((0, 0, 1, 2), 0, "1"), ((0, 0, 1, 2), 2, "2"), ((0, 0, 1, 2), 1, "3"),
    ((0, 0, 1, 2), 1, "4"), ((0, 0, F(1, 2), 3), 4, "1"),
]


def test_tilde_abc_at_qes_couplings():
    A, B, C = tilde_abc(0, (1, 2, 0, 8))
    assert (A, B, C) == (F(-25, 8), F(25, 8), 0)
    # A~_1 = 0: nothing couples level 1 up to level 2, so the a-series of level 0 terminates
    assert tilde_abc(1, (1, 2, 0, 8)) == (0, F(7, 8), F(-7, 8))
    assert q1_value(1, 2, 0, 8) == F((6 - 8) * (6 + 8 + 1) - 25, 4)


def test_expand_a_invariants():
    es = expand_a(2, GENERIC, 6)
    assert es.evals[0] == F((4 + 1 + 2 + 2) ** 2, 4)
    assert es.evals[1] == tilde_abc(2, GENERIC)[1]
    for k, vec in enumerate(es.evecs):
        assert all(abs(n - 2) <= k for n in vec)
        if k:
            assert 2 not in vec
    assert es.evecs[0] == {2: 1}


def test_qes_level_against_closed_root_series():
    # level 0 of (1,2,0,8) is the lower root of the 2x2 block; expand it in a
    a = sp.symbols("a")
    e3 = -(1 + a) / 3
    e1, e2 = e3 + 1, e3 + a
    root = 11 * e1 - 9 * e2 - 2 * sp.sqrt(106 * e1 ** 2 + 73 * e1 * e2 + 46 * e2 ** 2)
    reduced = root / 4 - sp.Rational(9, 4) * a - 80 * e3 / 4
    want = sp.Poly(sp.series(reduced, a, 0, 7).removeO(), a).all_coeffs()[::-1]
    got = expand_a(0, (1, 2, 0, 8), 6).evals
    assert [sp.Rational(c.numerator, c.denominator) for c in got] == want
    assert got[:4] == (F(25, 4), F(25, 8), F(-175, 384), F(-175, 1024))


def test_energy_map_constant_term():
    assert energy_map(expand_a(0, (1, 2, 0, 8), 4)).evals[0] == F(-5, 3)
    assert energy_map(expand_a(0, (1, 0, 4, 1), 4)).evals[0] == -4
    with pytest.raises(DomainError):
        energy_map(expand_a(0, GENERIC, 3), K=5)


@pytest.mark.parametrize("l,m,sector", ENGINE_CASES)
def test_engines_agree_exactly(l, m, sector):
    K = 6
    via_a = energy_map(expand_a(m, l, K, sector))
    direct = expand_p_direct(m, l, K, sector)
    assert via_a.evals == direct.evals
    assert direct.evals[0] == direct.trig_eigenvalue + direct.c_t


def test_float_couplings_track_exact():
    exact = expand_p_direct(1, GENERIC, 6).evals
    approx = expand_p_direct(1, tuple(float(v) for v in GENERIC), 6).evals
    assert [float(v) for v in exact] == pytest.approx(list(approx), rel=1e-12)


@pytest.mark.parametrize("l", [GENERIC, (1, 2, 0, 8), (2, 1, 1, 0)])
def test_against_galerkin_oracle(l):
    # truncation at order 12 leaves about 1e-10 relative at p = 0.02
    p = 0.02
    ref = galerkin_levels(l, p)
    for m in range(3):
        got = float(expand_p_direct(m, l, 12)(p)) * PI2
        assert got == pytest.approx(ref[m], rel=1e-9)


@pytest.mark.parametrize("sector", ["1", "2", "3", "4"])
def test_fourier_sectors_against_oracle(sector):
    l, p = (0, 0, 1, 2), 0.01
    ref = fourier_galerkin_levels(1, 2, p, sector)
    first = {"1": 0, "2": 2, "3": 1, "4": 1}[sector]
    for k in range(3):
        m = first + 2 * k
        for engine in ("a", "p"):
            es = energy_map(expand_a(m, l, 12, sector)) if engine == "a" else expand_p_direct(m, l, 12, sector)
            assert float(es(p)) * PI2 == pytest.approx(ref[k], rel=1e-12)


def test_g_sectors_reproduce_algebraic_levels():
    p = 0.01
    ctx = EllipticContext(p)
    single, pair = closed_form_1041(*ctx.values[:2])
    got = [float(expand_p_direct(m, (1, 0, 4, 1), 12)(p)) * PI2 for m in range(4)]
    assert got[0] == pytest.approx(single, rel=1e-12)
    assert got[1] == pytest.approx(pair[0], rel=1e-12)
    assert got[3] == pytest.approx(pair[1], rel=1e-12)
    lo, hi = closed_form_1208(*ctx.values[:2])
    assert float(expand_p_direct(0, (1, 2, 0, 8), 12)(p)) * PI2 == pytest.approx(lo, rel=1e-12)
    assert float(expand_p_direct(1, (1, 2, 0, 8), 12)(p)) * PI2 == pytest.approx(hi, rel=1e-12)


def test_odd_orders_vanish_when_l2_equals_l3():
    for m in range(3):
        ev = expand_p_direct(m, (1, 2, 0, 0), 9).evals
        assert all(ev[k] == 0 for k in range(1, 10, 2))


def test_eigenfunction_at_trig_limit():
    ctx = EllipticContext(0.0)
    es = expand_a(2, GENERIC, 4)
    for x in (0.1, 0.33):
        w = math.sin(math.pi * x) ** 2
        ftilde, f = eigenfunction_eval(es, x, ctx)
        assert ftilde == pytest.approx(float(hypergeometric_poly(2, 1, 2)(w)), rel=1e-12)
        pref = w * (1 - w) ** 1.5
        assert f == pytest.approx(pref * ftilde, rel=1e-12)


def test_heun_residual_is_exact_to_order():
    es = expand_a(1, GENERIC, 5)
    w = F(2, 7)
    assert heun_residual(es, F(0), w) == 0
    r1 = heun_residual(es, F(1, 1000), w)
    r2 = heun_residual(es, F(1, 2000), w)
    # leading term a^(K+1)
    assert float(r1 / r2) == pytest.approx(2 ** 6, rel=0.02)


def test_fd_residual_at_generic_couplings():
    p = 0.02
    ctx = EllipticContext(p)
    floats = tuple(float(v) for v in GENERIC)
    for m in range(2):
        res = {}
        for K in (8, 12):
            es = expand_p_direct(m, floats, K)
            ea = expand_a(m, GENERIC, K)
            res[K] = (fd_eigen_residual(es, float(es(p)) * PI2, ctx),
                      fd_eigen_residual(ea, float(energy_map(ea)(p)) * PI2, ctx))
        # the Heun-gauge vector truncates differently and converges more slowly
        assert res[8][0] < 1e-6 and res[8][1] < 1e-4
        # the p-engine reaches the finite-difference floor (about 3e-8) by order 12
        assert res[12][0] < max(res[8][0], 1e-7) and res[12][1] < res[8][1]
    es = expand_p_direct(0, floats, 8)
    assert fd_eigen_residual(es, float(es(p)) * PI2, ctx) < 1e-7


def test_eigenfunction_errors():
    ctx = EllipticContext(0.1)
    with pytest.raises(DomainError):
        eigenfunction_eval(expand_a(0, GENERIC, 2), 0.7, ctx)
    with pytest.raises(DomainError):
        eigenfunction_eval(expand_a(0, GENERIC, 2), 0.2, ctx, coordinate="z")
    with pytest.raises(DomainError):
        eigenfunction_eval(expand_p_direct(0, GENERIC, 2), 0.2, ctx, coordinate="w")
    with pytest.raises(DomainError):
        eigenfunction_eval(energy_map(expand_a(0, GENERIC, 2)), 0.2, ctx)


def test_decay_diagnostics():
    es = expand_a(0, (1, 2, 1, 3), 8)
    ratios = [decay_diagnostics(es, q).ratio for q in (0.02, 0.05, 0.1)]
    assert all(r < 1 for r in ratios)
    assert ratios == sorted(ratios)
    rep = decay_diagnostics(es, 0.1, C=4)
    assert rep.bound_ratio == pytest.approx(math.sqrt(0.4))
    assert rep.within_bound and rep.zone_half_width > 0
    assert decay_diagnostics(es, 0.0).ratio == 0
    term = decay_diagnostics(expand_a(0, (1, 2, 0, 8), 8), 0.1)
    assert term.terminating and term.ratio == 0
    with pytest.raises(DomainError):
        decay_diagnostics(expand_a(0, GENERIC, 3), 0.1)
    with pytest.raises(DomainError):
        decay_diagnostics(es, 0.1, C=1)


def test_errors():
    with pytest.raises(DomainError):
        expand_a(0, GENERIC, -1)
    with pytest.raises(DomainError):
        expand_p_direct(0, (1, -3, 0, 0), 2)
    with pytest.raises(DomainError):
        expand_a(1, (0, 0, 1, 1), 2, "2")
    assert issubclass(DegeneracyError, ZeroDivisionError)
    assert as_couplings(GENERIC).exact
