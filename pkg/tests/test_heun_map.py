from fractions import Fraction

import mpmath as mp
import pytest

from heunspec.couplings import as_couplings
from heunspec.elliptic import PI2, EllipticContext, modular_lambda
from heunspec.errors import DomainError
from heunspec.heun_map import (HeunParams, from_heun, heun_operator, invert_lambda, p_symbol,
                               to_heun)
from heunspec.perturbation import eigenfunction_eval, energy_map, expand_a

F = Fraction
GENERIC = (1, 2, F(1, 2), F(3, 10))


@pytest.mark.parametrize("a", [1e-6, 0.05, 0.3, 0.7, 0.95, -0.4])
def test_invert_lambda_against_mpmath(a):
    p = invert_lambda(a)
    if a > 0:
        assert p == pytest.approx(float(mp.qfrom(m=a)), rel=1e-12)
    assert modular_lambda(p) == pytest.approx(a, rel=1e-12, abs=1e-15)


def test_invert_lambda_domain():
    for a in (0, 1, 1.5, modular_lambda(-0.6)):
        with pytest.raises(DomainError):
            invert_lambda(a)


@pytest.mark.parametrize("l,p,E", [(GENERIC, 0.05, 123.4), ((1, 2, 0, 8), 0.2, -30.0),
                                   ((0, 3, 1, F(5, 2)), -0.1, 55.5)])
def test_roundtrip(l, p, E):
    h = to_heun(l, EllipticContext(p), E)
    assert h.fuchs_residual == 0
    l2, p2, E2 = from_heun(h)
    assert l2 == as_couplings(l)
    assert p2 == pytest.approx(p, abs=1e-13)
    assert E2 == pytest.approx(E, rel=1e-12)


def test_negative_representative():
    # l and -l-1 give the same Hamiltonian; the representative l >= -1/2 is returned
    h = to_heun(GENERIC, EllipticContext(0.05), 10.0)
    # swapping alpha and beta sends l3 to -l3-1
    flipped = HeunParams(h.a, h.q, h.beta, h.alpha, h.gamma, h.delta, h.epsilon)
    assert from_heun(flipped)[0] == as_couplings(GENERIC)


def test_fuchs_violation_is_rejected():
    h = to_heun(GENERIC, EllipticContext(0.05), 10.0)
    bad = HeunParams(h.a, h.q, h.alpha + 1, h.beta, h.gamma, h.delta, h.epsilon)
    with pytest.raises(DomainError):
        from_heun(bad)
    with pytest.raises(DomainError):
        to_heun(GENERIC, EllipticContext(0.0), 1.0)


def test_p_symbol_matches_exponents():
    sym = p_symbol(GENERIC)
    h = to_heun(GENERIC, EllipticContext(0.05), 1.0)
    assert sym["0"] == (0, 1 - h.gamma)
    assert sym["1"] == (0, 1 - h.delta)
    assert sym["1/a"] == (0, 1 - h.epsilon)
    assert sym["inf"] == (h.alpha, h.beta)
    # four singular points: the exponents add up to 2
    assert sum(sum(v) for v in sym.values()) == 2


def test_perturbative_eigenfunction_solves_heun_equation():
    p = 0.02
    ctx = EllipticContext(p)
    es = expand_a(0, GENERIC, 12)
    E = float(energy_map(es)(p)) * PI2
    h = to_heun(GENERIC, ctx, E)
    f = lambda w: eigenfunction_eval(es, w, ctx, coordinate="w")[0]
    step = 1e-3
    for w in (0.2, 0.55):
        vals = [f(w + k * step) for k in (-2, -1, 0, 1, 2)]
        d1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * step)
        d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * step ** 2)
        res = heun_operator(h, vals[2], d1, d2, w)
        assert abs(res) < 1e-6 * max(abs(d2), abs(vals[2]))


def test_as_dict():
    d = to_heun(GENERIC, EllipticContext(0.05), 1.0).as_dict()
    assert set(d) == {"a", "q", "alpha", "beta", "gamma", "delta", "epsilon"}
    assert d["gamma"] == "5/2"
