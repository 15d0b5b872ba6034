import numpy as np
import pytest
from mpmath import mpf
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from twocut.equilibrium import Potential
from twocut.errors import DomainError
from twocut.estimators import ExactPartitionFunction, TwoCutAsymptotics, make_potential
from twocut.exactz import exact_log_Z
from twocut.expansion import quartic_expansion
from twocut.mpnum import PrecisionCtx


@pytest.mark.parametrize("base,kind", [
    ("quartic-sym", "quartic_sym"),
    ("v0", "quartic_plus_t"),
    ("gaussian_half", "gaussian_half"),
    ("gue", "gaussian_line"),
    ("polynomial", "polynomial"),
])
def test_make_potential(base, kind):
    t = (0, 1) if base == "polynomial" else ()
    assert make_potential(base, t=t).base == kind


def test_make_potential_unknown():
    with pytest.raises(DomainError):
        make_potential("cubic")


def test_params_roundtrip_and_clone():
    est = TwoCutAsymptotics(base="quartic_sym", r=5, s=2, bits=160)
    params = est.get_params()
    assert params["r"] == 5 and params["bits"] == 160
    twin = clone(est)
    assert twin.get_params() == params
    twin.set_params(r=6)
    assert est.r == 5 and twin.r == 6


def test_not_fitted():
    with pytest.raises(NotFittedError):
        TwoCutAsymptotics().predict([8])
    with pytest.raises(NotFittedError):
        ExactPartitionFunction().predict([8])


def test_asymptotics_predict_matches_function():
    est = TwoCutAsymptotics(base="quartic_sym", r=4, s=1).fit()
    out = est.predict(np.array([[8], [9]]))
    assert out.dtype == object and out.shape == (2,)
    ref = quartic_expansion(4, 1, 9, PrecisionCtx(128)).total
    assert out[1] == ref
    assert abs(est.omega_ - mpf(1) / 2) < mpf(10) ** -30


def test_exact_predict_matches_function():
    est = ExactPartitionFunction(bits=256).fit()
    out = est.predict([3, 4])
    assert out[1] == exact_log_Z(Potential.quartic_plus_t(), 4, PrecisionCtx(256)).log_Z
    assert len(est.error_bounds_) == 2


def test_residuals_small():
    exact = ExactPartitionFunction(bits=256).fit()
    asym = TwoCutAsymptotics().fit()
    res = exact.residuals([12], asym)
    assert abs(res[0]) < mpf("0.01")


@pytest.mark.parametrize("X", [[0], [2.5], [[1, 2]], [[[1]]]])
def test_bad_sizes(X):
    with pytest.raises(ValueError):
        ExactPartitionFunction().fit().predict(X)
