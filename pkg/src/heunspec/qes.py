"""Finite-dimensional invariant spaces of doubly periodic functions.

For a sign vector ``alpha = (a0, a1, a2, a3)`` with ``a_i`` in
``{-l_i, l_i + 1}`` and ``d = -sum(alpha)/2`` a non-negative integer, the
Hamiltonian preserves the ``d + 1`` dimensional space spanned by::

    prod_(i=1..3) (wp(x) - e_i)^(a_i / 2) * (wp(x) - e_2)^r,   r = 0..d

In the basis ``(z - e2)^r`` (``z = wp(x)``) it acts by a tridiagonal matrix
whose entries are polynomials in ``e1, e2, e3``.  :func:`build_matrix` is
written against plain arithmetic, so the same code produces float matrices,
exact rational matrices (``e_i`` in units of pi^2), truncated-series
matrices, or symbolic ones.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .couplings import CouplingConstants, as_couplings
from .elliptic import EllipticContext, wp_eval
from .errors import ConvergenceError, DomainError
from .trig_basis import BasisCase

__all__ = [
    "AlphaVector",
    "EigenPair",
    "QesSpace",
    "TRIG_E",
    "algebraic_eigen",
    "build_matrix",
    "census",
    "determinant",
    "match_bottom",
    "qes_eigenfunction_eval",
    "trace",
    "trig_spectrum",
]

# (e1, e2, e3) at p = 0 in units of pi^2
TRIG_E = (Fraction(2, 3), Fraction(-1, 3), Fraction(-1, 3))

NOT_IN_H = "not-in-H"


@dataclass(frozen=True)
class AlphaVector:
    """Exponent choice ``a_i in {-l_i, l_i + 1}`` for the four half-periods."""

    values: tuple
    couplings: CouplingConstants

    def __post_init__(self):
        if len(self.values) != 4:
            raise DomainError("an alpha vector has four entries")
        for a, l in zip(self.values, self.couplings.values):
            if a != -l and a != l + 1:
                raise DomainError(f"alpha entry {a} is neither {-l} nor {l + 1}")

    def __getitem__(self, i):
        return self.values[i]

    @property
    def half_sum(self):
        return -sum(self.values) / 2 if not self.couplings.exact else -Fraction(sum(self.values)) / 2

    @property
    def admissible(self) -> bool:
        d = self.half_sum
        return d >= 0 and d == int(d)

    @property
    def d(self) -> int:
        if not self.admissible:
            raise DomainError(f"alpha {self.label} is not admissible (d = {self.half_sum})")
        return int(self.half_sum)

    @property
    def gammas(self):
        a1, a2, a3 = self.values[1:]
        l0 = self.couplings.l0
        s = a1 + a2 + a3
        return (s - l0) / 2, (s + l0 + 1) / 2

    @property
    def label(self) -> str:
        return "(" + ",".join(_fmt(v) for v in self.values) + ")"

    def reflected(self) -> "AlphaVector":
        """``1 - alpha``, the other exponent at every half-period."""
        return AlphaVector(tuple(1 - v for v in self.values), self.couplings)


def _fmt(v) -> str:
    if isinstance(v, Fraction) and v.denominator == 1:
        return str(v.numerator)
    return str(v)


@dataclass(frozen=True)
class QesSpace:
    """An invariant space together with its Hilbert-space classification."""

    alpha: AlphaVector
    hilbert: str

    @property
    def dim(self) -> int:
        return self.alpha.d + 1

    @property
    def in_hilbert(self) -> bool:
        return self.hilbert != NOT_IN_H

    @property
    def sector(self) -> Optional[str]:
        """Sector label of :mod:`heunspec.trig_basis` (``H``, ``+``/``-``, ``1``..``4``)."""
        if not self.in_hilbert:
            return None
        return {"H": "H", "H+": "+", "H-": "-"}.get(self.hilbert, self.hilbert[1:])

    def matrix(self, e):
        """Tridiagonal matrix for ``e = (e1, e2, e3)`` or an :class:`EllipticContext`."""
        return build_matrix(self.alpha, e)

    def as_dict(self) -> dict:
        return {"alpha": [_fmt(v) for v in self.alpha.values], "dim": self.dim,
                "hilbert": self.hilbert}


def _classify(alpha: AlphaVector) -> str:
    l = alpha.couplings
    a0, a1 = alpha[0], alpha[1]
    if a0 < 0 or a1 < 0:
        return NOT_IN_H
    tag = BasisCase(l.l0, l.l1).tag
    if tag == "JJ":
        return "H"
    if tag == "G":
        return "H+" if a1 == 0 else "H-"
    if tag == "Gp":
        return "H+" if a0 == 0 else "H-"
    return {(0, 0): "H1", (1, 1): "H2", (0, 1): "H3", (1, 0): "H4"}[(int(a0), int(a1))]


def census(l) -> List[QesSpace]:
    """All admissible sign vectors, with their Hilbert-space labels.

    For integer couplings the reflected space ``V_(1 - alpha)`` used when
    ``sum(alpha)/2 >= 2`` is itself one of the sixteen sign vectors, so the
    plain enumeration already contains every space of that construction.
    """
    l = as_couplings(l) if not isinstance(l, CouplingConstants) else l
    l.require_nonnegative()
    out = []
    for signs in itertools.product((0, 1), repeat=4):
        vals = tuple(-v if s == 0 else v + 1 for s, v in zip(signs, l.values))
        alpha = AlphaVector(vals, l)
        if alpha.admissible:
            out.append(QesSpace(alpha, _classify(alpha)))
    return out


def _e_triple(e):
    if isinstance(e, EllipticContext):
        return e.values
    e1, e2, *rest = e
    e3 = rest[0] if rest else -e1 - e2
    return e1, e2, e3


def build_matrix(alpha: AlphaVector, e) -> List[list]:
    """Matrix of the transformed Hamiltonian on ``(z - e2)^r``, ``r = 0..d``.

    Column ``r`` is the image of ``(z - e2)^r``::

        [r+1, r] = -4 (r + g1)(r + g2)
        [r,   r] = -4 ((e2-e3)(r+a2+a1) r + (e2-e1)(r+a2+a3) r + q')
        [r-1, r] = -4 r (r + a2 - 1/2)(e2 - e3)(e2 - e1)

    with ``g1, g2`` from :attr:`AlphaVector.gammas` and
    ``q' = -(e1 (a2+a3)^2 + e2 (a1+a3)^2 + e3 (a1+a2)^2)/4 + e2 g1 g2``.
    ``e`` is an :class:`EllipticContext` (floats with pi^2) or a tuple
    ``(e1, e2[, e3])`` of any ring elements; ``e3`` defaults to ``-e1-e2``.
    """
    d = alpha.d
    e1, e2, e3 = _e_triple(e)
    _, a1, a2, a3 = alpha.values
    g1, g2 = alpha.gammas
    half = Fraction(1, 2) if alpha.couplings.exact else 0.5
    qp = -(e1 * (a2 + a3) ** 2 + e2 * (a1 + a3) ** 2 + e3 * (a1 + a2) ** 2) / 4 + e2 * g1 * g2
    zero = e1 * 0
    mat = [[zero] * (d + 1) for _ in range(d + 1)]
    for r in range(d + 1):
        mat[r][r] = -4 * ((e2 - e3) * ((r + a2 + a1) * r) + (e2 - e1) * ((r + a2 + a3) * r) + qp)
        if r < d:
            mat[r + 1][r] = zero - 4 * (r + g1) * (r + g2)
        if r > 0:
            mat[r - 1][r] = (e2 - e3) * (e2 - e1) * (-4 * r * (r + a2 - half))
    return mat


def leakage(alpha: AlphaVector):
    """Coefficient ``-4 (d + g1)(d + g2)`` of ``(z - e2)^(d+1)``; zero by construction."""
    g1, g2 = alpha.gammas
    d = alpha.d
    return -4 * (d + g1) * (d + g2)


def trace(mat):
    acc = mat[0][0] * 0
    for i in range(len(mat)):
        acc = acc + mat[i][i]
    return acc


def determinant(mat):
    """Determinant of a tridiagonal matrix by the continuant recurrence."""
    n = len(mat)
    prev2 = mat[0][0] * 0 + 1
    prev = mat[0][0]
    for i in range(1, n):
        cur = mat[i][i] * prev - mat[i][i - 1] * mat[i - 1][i] * prev2
        prev2, prev = prev, cur
    return prev


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: tuple
    complex_pair: bool = False

    @property
    def real(self) -> float:
        return float(np.real(self.value))


def algebraic_eigen(space, e=None, tol: float = 1e-9) -> List[EigenPair]:
    """Eigenvalues and eigenvectors of the invariant-space matrix, sorted by real part.

    ``space`` may be a :class:`QesSpace` (then ``e`` gives the e-values) or a
    ready matrix.  An exact matrix that is triangular (as at ``p = 0``)
    returns its exact diagonal.  Otherwise the dense nonsymmetric
    eigensolver of numpy is used; complex-conjugate pairs are flagged.
    """
    mat = space.matrix(e) if isinstance(space, QesSpace) else space
    n = len(mat)
    upper = all(mat[i][j] == 0 for i in range(n) for j in range(n) if j > i)
    lower = all(mat[i][j] == 0 for i in range(n) for j in range(n) if j < i)
    if upper or lower:
        diag = [mat[i][i] for i in range(n)]
        exact = all(isinstance(v, (int, Fraction)) for v in diag)
        if exact:
            pairs = []
            for i, v in enumerate(diag):
                pairs.append(EigenPair(v, _triangular_vector(mat, i, lower)))
            return sorted(pairs, key=lambda p: p.value)
    arr = np.array([[complex(v) for v in row] for row in mat], dtype=complex)
    if np.all(arr.imag == 0):
        arr = arr.real
    vals, vecs = np.linalg.eig(arr)
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("eigensolver returned non-finite values")
    resid = np.linalg.norm(arr @ vecs - vecs * vals, axis=0)
    scale = max(1.0, float(np.max(np.abs(vals))))
    if np.any(resid > 1e-8 * scale * max(1.0, float(np.linalg.norm(arr)))):
        raise ConvergenceError(f"eigen residual too large: {resid.max():.3e}")
    order = np.argsort(vals.real, kind="stable")
    pairs = []
    for i in order:
        v = vals[i]
        is_complex = abs(v.imag) > tol * max(1.0, abs(v))
        vec = vecs[:, i]
        k = int(np.argmax(np.abs(vec)))
        vec = vec / vec[k]
        if not is_complex:
            v = float(v.real)
            vec = vec.real
        pairs.append(EigenPair(v, tuple(vec.tolist()), is_complex))
    return pairs


def _triangular_vector(mat, i: int, lower: bool) -> tuple:
    """Exact eigenvector for diagonal entry ``i`` of a triangular matrix."""
    n = len(mat)
    lam = mat[i][i]
    vec = [Fraction(0)] * n
    vec[i] = Fraction(1)
    if lower:
        for r in range(i + 1, n):
            s = sum(mat[r][c] * vec[c] for c in range(i, r))
            den = lam - mat[r][r]
            if den == 0:
                if s != 0:
                    raise ConvergenceError("defective triangular matrix")
                vec[r] = Fraction(0)
            else:
                vec[r] = s / den
    else:
        for r in range(i - 1, -1, -1):
            s = sum(mat[r][c] * vec[c] for c in range(r + 1, i + 1))
            den = lam - mat[r][r]
            if den == 0:
                if s != 0:
                    raise ConvergenceError("defective triangular matrix")
                vec[r] = Fraction(0)
            else:
                vec[r] = s / den
    return tuple(vec)


def trig_spectrum(alpha: AlphaVector, l=None) -> list:
    """``(2r + a0 + a1)^2 - sum_i l_i(l_i+1)/3`` for ``r = 0..d``, in pi^2 units."""
    l = alpha.couplings if l is None else as_couplings(l) if not isinstance(l, CouplingConstants) else l
    c = l.casimir_sum / (Fraction(3) if l.exact else 3.0)
    return [(2 * r + alpha[0] + alpha[1]) ** 2 - c for r in range(alpha.d + 1)]


# -- bottom matching ----------------------------------------------------------

def _hypotheses(l: CouplingConstants) -> bool:
    half = Fraction(1, 2) if l.exact else 0.5
    tag = BasisCase(l.l0, l.l1).tag
    if tag == "JJ":
        return (l.l0 >= half and l.l1 > 0) or (l.l0 > 0 and l.l1 >= half)
    if tag == "G":
        return l.l0 >= half
    if tag == "Gp":
        return l.l1 >= half
    return False


@dataclass
class MatchReport:
    """Pairing of algebraic eigenvalues with perturbative levels."""

    couplings: CouplingConstants
    p: float
    order: int
    hypotheses_hold: bool
    pairs: list = field(default_factory=list)

    @property
    def levels(self) -> List[int]:
        return sorted(pair["level"] for pair in self.pairs)

    @property
    def max_gap(self) -> float:
        return max((abs(pair["gap"]) for pair in self.pairs), default=0.0)

    def as_dict(self) -> dict:
        return {"p": self.p, "order": self.order, "hypotheses_hold": self.hypotheses_hold,
                "levels": self.levels, "pairs": self.pairs}


def match_bottom(l, ctx: EllipticContext, K: int, engine: str = "p") -> MatchReport:
    """Pair algebraic eigenvalues of in-Hilbert spaces with perturbative levels.

    On an in-Hilbert space of dimension ``d + 1`` in a given sector, the
    ``r``-th smallest algebraic eigenvalue is paired with the ``r``-th level
    of that sector; the case-wide labels are merged and sorted by value.
    All energies are reported with their pi^2 factor.  ``engine`` selects
    ``"p"`` (direct) or ``"a"`` (``a``-series composed with ``a(p)``).
    """
    from .perturbation import energy_map, expand_a, expand_p_direct

    l = as_couplings(l) if not isinstance(l, CouplingConstants) else l
    spaces = [s for s in census(l) if s.in_hilbert]
    if not spaces:
        raise DomainError(f"no invariant space lies in the Hilbert space for l = {l}")
    ok = _hypotheses(l)
    if not ok:
        warnings.warn("bottom-matching hypotheses do not hold; pairing reported anyway",
                      RuntimeWarning, stacklevel=2)
    case = BasisCase(l.l0, l.l1)
    pi2 = math.pi ** 2
    report = MatchReport(l, float(ctx.p), K, ok)
    for space in spaces:
        sec = case.sector(space.sector)
        eig = algebraic_eigen(space, ctx)
        for r, pair in enumerate(eig):
            level = case.level(sec, r)
            label = sec.label if case.tag == "F" else None
            if engine == "a":
                es = energy_map(expand_a(level, l, K, label))
            else:
                es = expand_p_direct(level, l, K, label)
            pert = float(es(float(ctx.p))) * pi2
            report.pairs.append({
                "space": space.alpha.label, "hilbert": space.hilbert, "sector": sec.label,
                "rank_in_space": r, "level": level, "algebraic": pair.real,
                "imag": float(np.imag(pair.value)), "perturbative": pert,
                "gap": pair.real - pert,
            })
    report.pairs.sort(key=lambda d: d["algebraic"])
    return report


# -- eigenfunctions -----------------------------------------------------------

def qes_eigenfunction_eval(space: QesSpace, eigvec: Sequence, x: float,
                           ctx: EllipticContext) -> float:
    """``prod_(i=1..3) (wp(x) - e_i)^(a_i/2) * sum_r c_r (wp(x) - e2)^r`` on ``(0, 1/2)``."""
    if not 0 < x < 0.5:
        raise DomainError("x must lie in the fundamental interval (0, 1/2)")
    z = float(np.real(wp_eval(x, 0, ctx)))
    e = ctx.values
    pref = 1.0
    for i in range(1, 4):
        base = z - e[i - 1]
        if base <= 0:
            raise DomainError("wp(x) - e_i must be positive on (0, 1/2)")
        pref *= base ** (float(space.alpha[i]) / 2)
    poly = 0.0
    for c in reversed(list(eigvec)):
        poly = poly * (z - e[1]) + float(np.real(c))
    return pref * poly
