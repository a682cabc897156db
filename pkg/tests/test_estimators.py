import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from heunspec.elliptic import PI2
from heunspec.errors import DomainError
from heunspec.estimators import AlgebraicSpectrum, PerturbativeSpectrum, check_nomes
from heunspec.perturbation import expand_p_direct


def test_params_and_clone():
    est = PerturbativeSpectrum(couplings=(1, 2, 0, 8), order=6, n_levels=2, engine="a")
    assert est.get_params() == {"couplings": (1, 2, 0, 8), "order": 6, "n_levels": 2, "engine": "a"}
    twin = clone(est)
    assert twin.get_params() == est.get_params() and not hasattr(twin, "series_")
    est.set_params(order=4)
    assert est.order == 4


def test_not_fitted():
    with pytest.raises(NotFittedError):
        PerturbativeSpectrum().predict([0.1])
    with pytest.raises(NotFittedError):
        AlgebraicSpectrum().predict([0.1])


def test_perturbative_predict_matches_series():
    est = PerturbativeSpectrum(couplings=(1, 2, 0, 8), order=8, n_levels=3).fit()
    p = np.array([0.0, 0.01, 0.05])
    out = est.predict(p)
    assert out.shape == (3, 3) and est.coef_.shape == (3, 9)
    for j in range(3):
        es = expand_p_direct(j, (1, 2, 0, 8), 8)
        assert out[:, j] == pytest.approx([float(es(v)) * PI2 for v in p], rel=1e-13)
    again = PerturbativeSpectrum(couplings=(1, 2, 0, 8), order=8, n_levels=3, engine="a").fit()
    assert again.predict(p) == pytest.approx(out, rel=1e-13)


def test_algebraic_agrees_with_perturbative_bottom():
    p = np.array([[0.005], [0.01]])
    alg = AlgebraicSpectrum(couplings=(1, 2, 0, 8)).fit().predict(p)
    pert = PerturbativeSpectrum(couplings=(1, 2, 0, 8), order=12, n_levels=2).fit().predict(p)
    assert alg == pytest.approx(pert, rel=1e-10)


def test_fitted_attributes():
    alg = AlgebraicSpectrum(couplings=(1, 0, 4, 1)).fit()
    assert alg.n_eigenvalues_ == 3 and alg.case_ == "G"
    assert alg.predict([0.02]).shape == (1, 3)


def test_validation_errors():
    with pytest.raises(DomainError):
        PerturbativeSpectrum(engine="x").fit()
    with pytest.raises(DomainError):
        PerturbativeSpectrum(order=-1).fit()
    with pytest.raises(DomainError):
        AlgebraicSpectrum(couplings=(1, 2, 1, 0)).fit()
    with pytest.raises(DomainError):
        check_nomes([0.6])
    with pytest.raises(DomainError):
        check_nomes(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        check_nomes([np.nan])
    assert check_nomes([[0.1], [0.2]]).shape == (2,)
