"""Cross-validation suite run by ``heunspec validate``.

Each check compares the two spectral routes with each other, with closed
forms, or with an independent numerical evaluation, at fixed tolerances.
Checks are registered under a short name and return a :class:`CheckResult`;
:func:`run_suite` runs a selection in order and times each one.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from .couplings import as_couplings
from .elliptic import EllipticContext, elliptic_series, half_periods, modular_lambda, wp_eval
from .heun_map import from_heun, to_heun
from .perturbation import (decay_diagnostics, eigenfunction_eval, energy_map, expand_a,
                           expand_p_direct, heun_residual)
from .qes import (AlphaVector, NOT_IN_H, TRIG_E, algebraic_eigen, build_matrix, census,
                  determinant, match_bottom, trace, trig_spectrum)
from .series import TruncatedSeries
from .trig_basis import (BasisCase, generating_function_check, hypergeometric_poly,
                         inner_product, psi_poly, three_term, W)

__all__ = ["CheckResult", "CHECKS", "run_suite", "fd_eigen_residual", "closed_form_1208",
           "closed_form_1041"]

PI2 = math.pi ** 2


@dataclass
class CheckResult:
    name: str
    criterion: int
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return {"name": self.name, "criterion": self.criterion, "passed": self.passed,
                "seconds": round(self.seconds, 4), "details": self.details}


@dataclass
class SuiteOptions:
    seed: int = 0
    random_l: int = 20


CHECKS: Dict[str, Callable[[SuiteOptions], CheckResult]] = {}


def _register(name: str, criterion: int):
    def deco(fn):
        def run(opts: SuiteOptions) -> CheckResult:
            t0 = time.perf_counter()
            passed, details = fn(opts)
            return CheckResult(name, criterion, bool(passed), details, time.perf_counter() - t0)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        run.criterion = criterion
        CHECKS[name] = run
        return run
    return deco


def _rel(x, y) -> float:
    return abs(x - y) / max(abs(y), 1e-300)


# -- closed forms -------------------------------------------------------------

def closed_form_1208(e1, e2):
    """Eigenvalues ``11e1 - 9e2 -/+ 2 sqrt(106e1^2 + 73e1e2 + 46e2^2)``."""
    r = 2 * math.sqrt(106 * e1 * e1 + 73 * e1 * e2 + 46 * e2 * e2)
    return 11 * e1 - 9 * e2 - r, 11 * e1 - 9 * e2 + r


def closed_form_1041(e1, e2):
    """``-12e1 - 12e2`` and the pair ``12e1 - 3e2 -/+ 2 sqrt(39e1^2 + 3e1e2 - 6e2^2)``."""
    r = 2 * math.sqrt(39 * e1 * e1 + 3 * e1 * e2 - 6 * e2 * e2)
    return -12 * e1 - 12 * e2, (12 * e1 - 3 * e2 - r, 12 * e1 - 3 * e2 + r)


def fd_eigen_residual(es, energy: float, ctx: EllipticContext, x: float = 0.27,
                      h: float = 1e-3) -> float:
    """``|(H - E) f|(x) / |f(x)|`` with a five-point second difference."""
    l = es.couplings
    f = [eigenfunction_eval(es, x + k * h, ctx)[1] for k in (-2, -1, 0, 1, 2)]
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    pot = sum(float(li) * (float(li) + 1) * wp_eval(x, i, ctx) for i, li in enumerate(l.values))
    return abs(-d2 + (pot - energy) * f[2]) / abs(f[2])


# -- checks -------------------------------------------------------------------

@_register("golden-1208", 1)
def _check_golden_1208(opts):
    """Closed-form eigenvalues, trace and determinant for alpha = (2,3,1,-8)."""
    l = as_couplings((1, 2, 0, 8))
    alpha = AlphaVector((2, 3, 1, -8), l)
    worst = 0.0
    for p in (0.01, 0.05, 0.1):
        e1, e2, _ = half_periods(p)
        got = sorted(pr.real for pr in algebraic_eigen(build_matrix(alpha, EllipticContext(p))))
        worst = max(worst, *(_rel(g, w) for g, w in zip(got, closed_form_1208(e1, e2))))
    s = elliptic_series(10)
    mat = build_matrix(alpha, (s["e1"], s["e2"], s["e3"]))
    tr_ok = (trace(mat) - 2 * (11 * s["e1"] - 9 * s["e2"])).coeffs == (0,) * 11
    det = -303 * s["e1"] * s["e1"] - 490 * s["e1"] * s["e2"] - 103 * s["e2"] * s["e2"]
    det_ok = all(c == 0 for c in (determinant(mat) - det).coeffs)
    return worst < 1e-10 and tr_ok and det_ok, {
        "max_rel_error": worst, "trace_exact": tr_ok, "determinant_exact": det_ok}


@_register("golden-1041", 2)
def _check_golden_1041(opts):
    """Eigenvalues and sector flags on the two in-Hilbert spaces for l = (1,0,4,1)."""
    spaces = {s.alpha.label: s for s in census((1, 0, 4, 1))}
    one, two = spaces.get("(2,0,-4,2)"), spaces.get("(2,1,-4,-1)")
    if one is None or two is None:
        return False, {"found": sorted(spaces)}
    flags = (one.hilbert, two.hilbert)
    worst = 0.0
    for p in (0.01, 0.05, 0.1):
        ctx = EllipticContext(p)
        e1, e2, _ = ctx.values
        single, pair = closed_form_1041(e1, e2)
        worst = max(worst, _rel(algebraic_eigen(one, ctx)[0].real, single))
        got = sorted(pr.real for pr in algebraic_eigen(two, ctx))
        worst = max(worst, *(_rel(g, w) for g, w in zip(got, pair)))
    return worst < 1e-10 and flags == ("H+", "H-"), {"max_rel_error": worst, "flags": flags}


@_register("census-1210", 3)
def _check_census_1210(opts):
    """Census for l = (1,2,1,0): three spaces, none in the Hilbert space."""
    spaces = census((1, 2, 1, 0))
    labels = sorted(s.alpha.label for s in spaces)
    want = sorted(["(-1,-2,-1,0)", "(-1,-2,2,1)", "(2,-2,-1,1)"])
    none_in_h = all(s.hilbert == NOT_IN_H for s in spaces)
    return labels == want and none_in_h, {"spaces": labels, "none_in_H": none_in_h}


@_register("trig", 4)
def _check_trig(opts):
    """Exact trigonometric-limit eigenvalues for every l in {0..4}^4."""
    count = bad = 0
    for l0 in range(5):
        for l1 in range(5):
            for l2 in range(5):
                for l3 in range(5):
                    for space in census((l0, l1, l2, l3)):
                        got = sorted(pr.value for pr in algebraic_eigen(space, TRIG_E))
                        count += 1
                        if got != sorted(trig_spectrum(space.alpha)):
                            bad += 1
    return bad == 0 and count > 0, {"spaces_checked": count, "mismatches": bad}


def random_couplings(rng: random.Random) -> tuple:
    """Rational couplings with ``l0, l1 > 0`` and ``l2, l3 >= 0``."""
    pos = [Fraction(rng.randint(1, 12), rng.randint(1, 4)) for _ in range(2)]
    nonneg = [Fraction(rng.randint(0, 12), rng.randint(1, 4)) for _ in range(2)]
    return tuple(pos + nonneg)


@_register("engines", 5)
def _check_engines(opts):
    """``energy_map(expand_a)`` equals ``expand_p_direct`` exactly to order 4."""
    rng = random.Random(opts.seed)
    bad = []
    t0 = time.perf_counter()
    for _ in range(opts.random_l):
        l = random_couplings(rng)
        for m in (0, 1):
            if energy_map(expand_a(m, l, 4)).evals != expand_p_direct(m, l, 4).evals:
                bad.append([str(v) for v in l] + [m])
    elapsed = time.perf_counter() - t0
    # wall time is reported on the CheckResult; details stay deterministic
    return not bad and elapsed < 30, {"sets": opts.random_l, "seed": opts.seed,
                                      "mismatches": bad, "time_budget_s": 30}


@_register("bottom", 6)
def _check_bottom(opts):
    """Algebraic roots against series levels for (1,2,0,8) and the (1,0,4,1) pairing."""
    rep = match_bottom((1, 2, 0, 8), EllipticContext(0.02), 8)
    gaps = [abs(d["gap"]) / PI2 for d in rep.pairs]
    levels = match_bottom((1, 0, 4, 1), EllipticContext(0.02), 8).levels
    ok = gaps[0] < 1e-8 and gaps[1] < 1e-6 and levels == [0, 1, 3]
    return ok, {"gap_level0_pi2": gaps[0], "gap_level1_pi2": gaps[1], "levels_1041": levels,
                "order": 8, "p": 0.02}


@_register("elliptic", 7)
def _check_elliptic(opts):
    """lambda series, sum of e_i, and the half-period shift identity."""
    s = elliptic_series(10)
    lam = modular_lambda(TruncatedSeries.identity(10, "p"))
    ratio = (s["e2"] - s["e3"]) / (s["e1"] - s["e3"])
    lam_ok = lam.coeffs == ratio.coeffs
    sum_ok = all(c == 0 for c in (s["e1"] + s["e2"] + s["e3"]).coeffs)
    worst = 0.0
    for x, p in ((0.3, 0.1), (0.17, 0.05), (0.41, 0.2), (0.23, 0.01), (0.35, 0.15)):
        ctx = EllipticContext(p)
        e = ctx.values
        z = wp_eval(x, 0, ctx)
        for i in range(3):
            j, k = [t for t in range(3) if t != i]
            want = e[i] + (e[i] - e[j]) * (e[i] - e[k]) / (z - e[i])
            worst = max(worst, _rel(wp_eval(x, i + 1, ctx), want))
    return lam_ok and sum_ok and worst < 1e-10, {
        "lambda_exact": lam_ok, "sum_zero": sum_ok, "shift_max_rel_error": worst}


@_register("basis", 8)
def _check_basis(opts):
    """Orthonormality, exact three-term identities and the generating function."""
    worst = 0.0
    for l0, l1 in ((0.5, 0.5), (1, 2), (2.3, 0)):
        case = BasisCase(l0, l1)
        fs = [psi_poly(m, case)[0] for m in range(11)]
        for i in range(11):
            for j in range(i, 11):
                worst = max(worst, abs(inner_product(fs[i], fs[j], case) - (i == j)))
    exact_ok = True
    for l0, l1 in ((Fraction(1), Fraction(2)), (Fraction(1, 2), Fraction(3, 2))):
        for m in range(9):
            A, B, C, *_ = three_term(m, l0, l1)
            rhs = hypergeometric_poly(m + 1, l0, l1).scale(A) + hypergeometric_poly(m, l0, l1).scale(B)
            if m > 0:
                rhs = rhs + hypergeometric_poly(m - 1, l0, l1).scale(C)
            exact_ok &= (W * hypergeometric_poly(m, l0, l1) - rhs).is_zero()
    gen = generating_function_check(0.4, 0.2, 12, 1, 2)
    return worst < 1e-10 and exact_ok and gen < 1e-8, {
        "orthonormality_max_error": worst, "three_term_exact": exact_ok, "generating_residual": gen}


@_register("properties", 9)
def _check_properties(opts):
    """Level ordering, even-order structure, monotonicity and coefficient decay."""
    K = 8
    l = (1, 2, Fraction(1, 2), Fraction(3, 10))
    series = [expand_p_direct(m, l, K) for m in range(7)]
    margin = math.inf
    for p in (0.01, 0.05, 0.1):
        vals = [float(es(p)) for es in series]
        tails = [abs(float(es.evals[-1])) * p ** K for es in series]
        for m in range(6):
            margin = min(margin, vals[m + 1] - vals[m] - tails[m] - tails[m + 1])
    even = expand_p_direct(0, (1, 2, 0, 0), 10)
    odd_zero = all(even.evals[k] == 0 for k in range(1, 11, 2))
    grid = [0.03 * k for k in range(1, 11)]
    curve = [float(even(p)) for p in grid]
    monotone = all(b >= a for a, b in zip(curve, curve[1:]))
    ratio = decay_diagnostics(expand_a(0, l, 10), 0.1).ratio
    term = decay_diagnostics(expand_a(0, (1, 2, 0, 8), 10), 0.1)
    ok = margin > 0 and odd_zero and monotone and ratio < 1 and term.ratio < 1
    return ok, {"ordering_margin": margin, "odd_coefficients_zero": odd_zero,
                "monotone": monotone, "decay_ratio": ratio,
                "decay_ratio_1208": term.ratio, "terminating_1208": term.terminating}


@_register("residuals", 10)
def _check_residuals(opts):
    """Heun-operator residual scaling and the finite-difference eigen-residual."""
    K = 8
    es = expand_a(0, (1, 2, 0, 8), K)
    w = Fraction(3, 10)
    ratio = float(abs(heun_residual(es, Fraction(1, 50), w) / heun_residual(es, Fraction(1, 100), w)))
    ctx = EllipticContext(0.02)
    fd = {}
    for label, l in (("1208", (1, 2, 0, 8)), ("generic", (1, 2, Fraction(1, 2), Fraction(3, 10)))):
        ser = expand_p_direct(0, l, K)
        fd[label] = fd_eigen_residual(ser, float(ser(0.02)) * PI2, ctx)
    ok = ratio >= 2 ** (K + 0.5) and all(v < 1e-6 for v in fd.values())
    return ok, {"heun_ratio": ratio, "required_ratio": 2 ** (K + 0.5),
                "fd_relative_residual": fd, "order": K, "p": 0.02}


@_register("roundtrip", 11)
def _check_roundtrip(opts):
    """``from_heun(to_heun(l, p, E))`` returns ``(l, p, E)``."""
    rng = random.Random(opts.seed)
    worst = 0.0
    for _ in range(10):
        l = as_couplings(tuple(round(rng.uniform(0, 5), 3) for _ in range(4)), exact=False)
        p = rng.uniform(0.01, 0.2)
        E = rng.uniform(-50, 500)
        l2, p2, E2 = from_heun(to_heun(l, EllipticContext(p), E))
        errs = [abs(a - b) for a, b in zip(l.values, l2.values)]
        errs += [abs(p2 - p) / p, abs(E2 - E) / max(1.0, abs(E))]
        worst = max(worst, *errs)
    return worst < 1e-10, {"max_error": worst}


def run_suite(only: Optional[Sequence[str]] = None, seed: int = 0,
              random_l: int = 20) -> List[CheckResult]:
    """Run the selected checks (all by default) in registry order."""
    names = list(CHECKS) if not only else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {unknown}; available: {list(CHECKS)}")
    opts = SuiteOptions(seed=seed, random_l=random_l)
    return [CHECKS[n](opts) for n in names]
