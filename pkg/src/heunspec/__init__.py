"""Spectra of the BC1 Inozemtsev Hamiltonian and the Heun equation.

Two routes are provided and checked against each other: perturbation series
in the nome ``p`` (or the modular parameter ``a``) around the trigonometric
limit, and exact algebraic eigenvalues on finite-dimensional invariant spaces
of doubly periodic functions.  Energies are handled in units of pi^2 wherever
exact rational arithmetic is involved.
"""
from importlib.metadata import PackageNotFoundError, version as _version

from .couplings import CouplingConstants, as_couplings, parse_number
from .elliptic import (EllipticContext, elliptic_series, half_periods, modular_lambda,
                       potential_fourier, wp_eval)
from .errors import (ConfigError, ConvergenceError, DegeneracyError, DomainError, HeunError,
                     SeriesError)
from .heun_map import HeunParams, from_heun, invert_lambda, p_symbol, to_heun
from .perturbation import (decay_diagnostics, eigenfunction_eval, energy_map, expand_a,
                           expand_p_direct, heun_residual)
from .qes import AlphaVector, algebraic_eigen, build_matrix, census, match_bottom
from .series import TruncatedSeries
from .trig_basis import BasisCase, inner_product, psi_poly, three_term, trig_eigenvalue

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

__all__ = [
    "AlphaVector", "BasisCase", "ConfigError", "ConvergenceError", "CouplingConstants",
    "DegeneracyError", "DomainError", "EllipticContext", "HeunError", "HeunParams",
    "SeriesError", "TruncatedSeries", "algebraic_eigen", "as_couplings", "build_matrix",
    "census", "decay_diagnostics", "eigenfunction_eval", "elliptic_series", "energy_map",
    "expand_a", "expand_p_direct", "from_heun", "half_periods", "heun_residual",
    "inner_product", "invert_lambda", "match_bottom", "modular_lambda", "p_symbol",
    "parse_number", "potential_fourier", "psi_poly", "three_term", "to_heun",
    "trig_eigenvalue", "wp_eval", "__version__",
]
