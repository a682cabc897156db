"""Estimator-style wrappers around the two spectral routes.

The "fit" step builds the truncated series (or the invariant-space census)
once for a coupling set; "predict" evaluates energies on an array of nomes.
Nothing is learned from data, so ``X`` in :meth:`fit` is ignored; the classes
exist so the engines compose with the parameter handling and validation
utilities of scikit-learn.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .couplings import as_couplings
from .elliptic import DEFAULT_TERMS, EllipticContext
from .errors import DomainError
from .perturbation import energy_map, expand_a, expand_p_direct
from .qes import algebraic_eigen, census
from .trig_basis import BasisCase

__all__ = ["PerturbativeSpectrum", "AlgebraicSpectrum", "check_nomes"]


def check_nomes(X, p_max: float = 0.5) -> np.ndarray:
    """Validate an array of nomes and flatten it to shape ``(n_samples,)``.

    Accepts a 1-d array or a single-column 2-d array.  Real nomes with
    ``|p| < p_max`` only.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    X = check_array(X, ensure_2d=True, dtype=float)
    if X.shape[1] != 1:
        raise DomainError(f"expected one column of nomes, got {X.shape[1]}")
    p = X[:, 0]
    if np.any(np.abs(p) >= p_max):
        raise DomainError(f"nomes must satisfy |p| < {p_max}")
    return p


class PerturbativeSpectrum(BaseEstimator):
    """Lowest ``n_levels`` eigenvalues as truncated power series in the nome.

    Parameters
    ----------
    couplings : sequence of 4 numbers or str
        ``(l0, l1, l2, l3)``; rationals are kept exact.
    order : int
        Truncation order ``K`` of the series.
    n_levels : int
        Number of levels ``m = 0 .. n_levels - 1``.
    engine : {"p", "a"}
        Direct expansion in ``p`` or ``a``-expansion composed with ``a(p)``.

    Attributes
    ----------
    series_ : list of EigSeriesP
        One series per level.
    coef_ : ndarray of shape (n_levels, order + 1)
        Series coefficients as floats, pi^2 units.
    """

    def __init__(self, couplings=(1, 2, 0, 0), order: int = 8, n_levels: int = 4,
                 engine: str = "p"):
        self.couplings = couplings
        self.order = order
        self.n_levels = n_levels
        self.engine = engine

    def fit(self, X=None, y=None):
        if self.engine not in ("p", "a"):
            raise DomainError(f"engine must be 'p' or 'a', got {self.engine!r}")
        if self.order < 0 or self.n_levels < 1:
            raise DomainError("order must be >= 0 and n_levels >= 1")
        l = as_couplings(self.couplings).require_nonnegative()
        if self.engine == "a":
            self.series_ = [energy_map(expand_a(m, l, self.order)) for m in range(self.n_levels)]
        else:
            self.series_ = [expand_p_direct(m, l, self.order) for m in range(self.n_levels)]
        self.coef_ = np.array([[float(c) for c in es.evals] for es in self.series_])
        self.couplings_ = l
        return self

    def predict(self, X) -> np.ndarray:
        """Energies (including pi^2) of shape ``(n_samples, n_levels)``."""
        check_is_fitted(self, "series_")
        p = check_nomes(X)
        # Horner on the coefficient table, all levels at once
        out = np.zeros((p.size, self.coef_.shape[0]))
        for col in self.coef_.T[::-1]:
            out = out * p[:, None] + col[None, :]
        return out * math.pi ** 2


class AlgebraicSpectrum(BaseEstimator):
    """Algebraic eigenvalues on the invariant spaces lying in the Hilbert space.

    Parameters
    ----------
    couplings : sequence of 4 numbers or str
    N : int
        Number of q-series terms for ``e1, e2, e3``.

    Attributes
    ----------
    spaces_ : list of QesSpace
        In-Hilbert invariant spaces.
    n_eigenvalues_ : int
        Total dimension of those spaces.
    """

    def __init__(self, couplings=(1, 2, 0, 8), N: int = DEFAULT_TERMS):
        self.couplings = couplings
        self.N = N

    def fit(self, X=None, y=None):
        l = as_couplings(self.couplings).require_nonnegative()
        self.spaces_ = [s for s in census(l) if s.in_hilbert]
        if not self.spaces_:
            raise DomainError(f"no invariant space lies in the Hilbert space for l = {l}")
        self.n_eigenvalues_ = sum(s.dim for s in self.spaces_)
        self.case_ = BasisCase(l.l0, l.l1).tag
        return self

    def predict(self, X) -> np.ndarray:
        """Sorted real parts of the algebraic eigenvalues, shape ``(n_samples, n_eigenvalues_)``."""
        check_is_fitted(self, "spaces_")
        p = check_nomes(X)
        out = np.empty((p.size, self.n_eigenvalues_))
        for i, pi in enumerate(p):
            ctx = EllipticContext(float(pi), self.N)
            vals = [pair.real for s in self.spaces_ for pair in algebraic_eigen(s, ctx)]
            out[i] = sorted(vals)
        return out
