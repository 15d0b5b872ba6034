"""Estimator-style wrappers: fit the N-independent data once, predict per N.

Both classes follow the scikit-learn conventions (constructor stores
parameters only, learned state ends with ``_``, ``check_is_fitted`` guards
``predict``).  ``X`` is a column of matrix sizes; predictions come back as an
object array of mpmath numbers so no precision is lost on the way out.
"""

from __future__ import annotations

import numpy as np
from mpmath import mpf
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .equilibrium import Potential
from .errors import DomainError
from .exactz import EXACT_CTX, exact_log_Z
from .expansion import general_expansion, quartic_expansion, two_cut_data
from .mpnum import PrecisionCtx

__all__ = ["make_potential", "TwoCutAsymptotics", "ExactPartitionFunction"]


def make_potential(base="quartic_plus_t", r=4, s=1, sigma=1, t=(), alpha=0) -> Potential:
    """Build a :class:`Potential` from flat parameters (dashes or underscores in ``base``)."""
    base = base.replace("-", "_")
    if base in ("quartic_sym", "quartic"):
        return Potential.quartic_sym(r, s)
    if base in ("quartic_plus_t", "v0"):
        return Potential.quartic_plus_t(tuple(t))
    if base == "gaussian_half":
        return Potential.gaussian_half(r, sigma, alpha)
    if base in ("gaussian_line", "gue"):
        return Potential.gaussian_line(sigma)
    if base == "polynomial":
        return Potential.from_coeffs((0,) + tuple(t))
    raise DomainError(f"unknown potential base {base!r}")


def _sizes(X):
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError("X must hold a single column of matrix sizes")
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError("X must be one- or two-dimensional")
    out = []
    for v in arr:
        n = int(v)
        if n != v or n < 1:
            raise ValueError(f"matrix sizes must be positive integers, got {v!r}")
        out.append(n)
    return out


class _PotentialParams(BaseEstimator):
    def __init__(self, base="quartic_plus_t", r=4, s=1, sigma=1, t=(), alpha=0, bits=128):
        self.base = base
        self.r = r
        self.s = s
        self.sigma = sigma
        self.t = t
        self.alpha = alpha
        self.bits = bits

    def _potential(self):
        return make_potential(self.base, self.r, self.s, self.sigma, self.t, self.alpha)


class TwoCutAsymptotics(_PotentialParams):
    """Large-N expansion of ``log Z_N`` for a two-cut regular field.

    ``fit`` solves for the equilibrium measure and the elliptic data; the
    symmetric quartic uses its closed-form constants.  ``predict`` returns
    the expansion truncated after the order-one term.

    Attributes
    ----------
    potential_ : Potential
    endpoints_ : tuple
    F0_, F1_, omega_, B_ :
        Planar free energy, order-one constant, filling fraction and modulus.
    """

    def fit(self, X=None, y=None):
        V = self._potential()
        ctx = PrecisionCtx(self.bits)
        measure, surface, F0 = two_cut_data(V, ctx)
        probe = self._expand(V, 2, ctx)
        self.potential_ = V
        self.endpoints_ = measure.endpoints
        self.omega_ = measure.omega
        self.B_ = surface.B
        self.F0_ = F0 if probe.parity_constant is None else probe.F0
        self.F1_ = probe.F1
        return self

    def _expand(self, V, N, ctx):
        if V.base == "quartic_sym":
            return quartic_expansion(V.param("r"), V.param("s"), N, ctx)
        return general_expansion(V, N, ctx)

    def predict(self, X):
        check_is_fitted(self, "F0_")
        ctx = PrecisionCtx(self.bits)
        return np.array([self._expand(self.potential_, n, ctx).total for n in _sizes(X)], dtype=object)

    def expansion(self, N):
        """Full :class:`ExpansionResult` at one ``N``."""
        check_is_fitted(self, "F0_")
        return self._expand(self.potential_, int(N), PrecisionCtx(self.bits))


class ExactPartitionFunction(_PotentialParams):
    """``log Z_N`` from the Hankel ladder of the weight ``exp(-N V)``.

    ``predict`` also records the error bound of each value in
    ``error_bounds_`` (same order as the input).
    """

    def __init__(self, base="quartic_plus_t", r=4, s=1, sigma=1, t=(), alpha=0, bits=EXACT_CTX.bits):
        super().__init__(base, r, s, sigma, t, alpha, bits)

    def fit(self, X=None, y=None):
        self.potential_ = self._potential()
        self.ctx_ = PrecisionCtx(self.bits)
        return self

    def predict(self, X):
        check_is_fitted(self, "potential_")
        res = [exact_log_Z(self.potential_, n, self.ctx_) for n in _sizes(X)]
        self.error_bounds_ = np.array([r.error_bound for r in res], dtype=object)
        return np.array([r.log_Z for r in res], dtype=object)

    def residuals(self, X, asymptotics: TwoCutAsymptotics):
        """``exact - asymptotic`` for each size in ``X``."""
        exact = self.predict(X)
        approx = asymptotics.predict(X)
        return np.array([mpf(e) - mpf(a) for e, a in zip(exact, approx)], dtype=object)
