import math
import warnings
from fractions import Fraction

import pytest
import sympy as sp

from heunspec.couplings import as_couplings
from heunspec.elliptic import PI2, EllipticContext, elliptic_series, wp_eval
from heunspec.errors import DomainError
from heunspec.qes import (NOT_IN_H, TRIG_E, AlphaVector, algebraic_eigen, build_matrix, census,
                          determinant, leakage, match_bottom, qes_eigenfunction_eval, trace,
                          trig_spectrum)
from heunspec.validation import closed_form_1208, closed_form_1041
from oracles import fd_second_derivative

F = Fraction


def _alpha(values, l):
    return AlphaVector(tuple(values), as_couplings(l))


def test_symbolic_trace_and_determinant():
    e1, e2 = sp.symbols("e1 e2")
    mat = build_matrix(_alpha((2, 3, 1, -8), (1, 2, 0, 8)), (e1, e2))
    assert sp.expand(trace(mat)) == 22 * e1 - 18 * e2
    assert sp.expand(determinant(mat)) == -303 * e1 ** 2 - 490 * e1 * e2 - 103 * e2 ** 2


def test_series_matrix_matches_symbolic_one():
    s = elliptic_series(8)
    mat = build_matrix(_alpha((2, 3, 1, -8), (1, 2, 0, 8)), (s["e1"], s["e2"], s["e3"]))
    want = s["e1"] * 22 - s["e2"] * 18
    assert trace(mat).coeffs == want.coeffs


@pytest.mark.parametrize("p", [0.01, 0.05, 0.1])
def test_closed_form_eigenvalues(p):
    ctx = EllipticContext(p)
    e1, e2, _ = ctx.values
    got = [pr.real for pr in algebraic_eigen(build_matrix(_alpha((2, 3, 1, -8), (1, 2, 0, 8)), ctx))]
    assert got == pytest.approx(list(closed_form_1208(e1, e2)), rel=1e-12)
    spaces = {s.alpha.label: s for s in census((1, 0, 4, 1))}
    single, pair = closed_form_1041(e1, e2)
    assert algebraic_eigen(spaces["(2,0,-4,2)"], ctx)[0].real == pytest.approx(single, rel=1e-12)
    got = [pr.real for pr in algebraic_eigen(spaces["(2,1,-4,-1)"], ctx)]
    assert got == pytest.approx(list(pair), rel=1e-12)


def test_census_examples():
    labels = {s.alpha.label: s.hilbert for s in census((1, 0, 4, 1))}
    assert labels["(2,0,-4,2)"] == "H+"
    assert labels["(2,1,-4,-1)"] == "H-"
    spaces = census((1, 2, 1, 0))
    assert sorted(s.alpha.label for s in spaces) == sorted(
        ["(-1,-2,-1,0)", "(-1,-2,2,1)", "(2,-2,-1,1)"])
    assert all(s.hilbert == NOT_IN_H and s.sector is None for s in spaces)
    (only,) = [s for s in census((1, 2, 0, 8)) if s.in_hilbert]
    assert only.alpha.label == "(2,3,1,-8)" and only.dim == 2 and only.sector == "H"


def test_census_fourier_labels():
    flags = {s.hilbert for s in census((0, 0, 2, 2)) if s.in_hilbert}
    assert flags <= {"H1", "H2", "H3", "H4"} and flags


def test_leakage_vanishes():
    for l in ((1, 2, 0, 8), (1, 0, 4, 1), (2, 3, 1, 4), (0, 0, 3, 5)):
        for space in census(l):
            assert leakage(space.alpha) == 0


def test_trig_limit_is_exact():
    for l in ((1, 2, 0, 8), (1, 0, 4, 1), (3, 1, 2, 2)):
        for space in census(l):
            got = sorted(pr.value for pr in algebraic_eigen(space, TRIG_E))
            assert all(isinstance(v, (int, Fraction)) for v in got)
            assert got == sorted(trig_spectrum(space.alpha))
    assert trig_spectrum(_alpha((2, 3, 1, -8), (1, 2, 0, 8))) == [25 - F(80, 3), 49 - F(80, 3)]


@pytest.mark.parametrize("l", [(1, 2, 0, 8), (1, 0, 4, 1)])
def test_eigenfunction_solves_schroedinger(l):
    p = 0.05
    ctx = EllipticContext(p)
    cpl = as_couplings(l)
    for space in (s for s in census(l) if s.in_hilbert):
        for pair in algebraic_eigen(space, ctx):
            f = lambda x: qes_eigenfunction_eval(space, pair.vector, x, ctx)
            for x in (0.17, 0.31):
                pot = sum(float(v) * (float(v) + 1) * wp_eval(x, i, ctx) for i, v in enumerate(cpl.values))
                res = -fd_second_derivative(f, x) + (pot - pair.real) * f(x)
                assert abs(res) <= 1e-6 * abs(pair.real) * abs(f(x)) + 1e-6


def test_match_bottom():
    ctx = EllipticContext(0.01)
    rep = match_bottom((1, 2, 0, 8), ctx, 12)
    assert rep.hypotheses_hold and rep.levels == [0, 1]
    assert rep.max_gap < 1e-8 * PI2
    assert match_bottom((1, 2, 0, 8), ctx, 12, engine="a").max_gap < 1e-8 * PI2
    rep = match_bottom((1, 0, 4, 1), ctx, 12)
    assert rep.levels == [0, 1, 3]
    assert rep.as_dict()["pairs"][0]["hilbert"] == "H+"


def test_match_bottom_warns_and_rejects():
    ctx = EllipticContext(0.01)
    with pytest.raises(DomainError):
        match_bottom((1, 2, 1, 0), ctx, 4)
    with pytest.warns(RuntimeWarning):
        match_bottom((0, 0, 2, 2), ctx, 4)


def test_errors():
    with pytest.raises(DomainError):
        _alpha((1, 1, 1), (1, 2, 0, 8))
    with pytest.raises(DomainError):
        _alpha((5, 3, 1, -8), (1, 2, 0, 8))
    with pytest.raises(DomainError):
        _alpha((2, 3, 1, 9), (1, 2, 0, 8)).d
    space = [s for s in census((1, 2, 0, 8)) if s.in_hilbert][0]
    with pytest.raises(DomainError):
        qes_eigenfunction_eval(space, (1, 0), 0.6, EllipticContext(0.1))
    assert math.isfinite(qes_eigenfunction_eval(space, (1, 0), 0.2, EllipticContext(0.1)))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        census((2, 3, 1, 4))
