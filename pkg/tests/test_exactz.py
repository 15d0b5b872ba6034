import mpmath
import pytest
from mpmath import mpf

from twocut.equilibrium import Potential
from twocut.errors import DomainError
from twocut.exactz import (
    exact_log_Z,
    exact_log_Z_half,
    half_line_weight,
    hankel_ladder,
    line_weight,
    log_Z_half_alpha_derivative,
    log_Z_t_derivative,
    moments,
    op_identity_check,
    parity_factorization,
)
from twocut.expansion import gue_log_partition
from twocut.mpnum import PrecisionCtx

CTX = PrecisionCtx(256)
# mpmath.quad oracle accuracy at 40 digits
QTOL = mpf(10) ** -30
INF = mpmath.inf


def _quad_moments(w, count, lo=-INF):
    return [mpmath.quad(lambda x, k=k: x ** k * w(x), [lo, 0, INF]) for k in range(count)]


@pytest.mark.parametrize("N", [1, 2, 5, 12])
def test_gaussian_line_matches_gue(N):
    with CTX.workprec():
        got = exact_log_Z(Potential.gaussian_line("1.5"), N, CTX)
        assert abs(got.log_Z - gue_log_partition(N, "1.5", CTX)) < mpf(10) ** -60


def test_quartic_single_point_by_quadrature():
    with mpmath.workdps(40):
        oracle = mpmath.log(mpmath.quad(lambda x: mpmath.exp(-(x ** 4 - 4 * x * x)), [-INF, 0, INF]))
        got = exact_log_Z(Potential.quartic_plus_t(), 1, CTX).log_Z
        assert abs(got - oracle) < QTOL


def test_quartic_two_points_by_moments():
    with mpmath.workdps(40):
        V = Potential.quartic_plus_t(("0.05",))
        mu = _quad_moments(lambda x: mpmath.exp(-2 * V(x)), 3)
        oracle = mpmath.log(2 * (mu[0] * mu[2] - mu[1] ** 2))
        got = exact_log_Z(V, 2, CTX).log_Z
        assert abs(got - oracle) < QTOL


def test_half_line_alpha_zero():
    with mpmath.workdps(40):
        r, sigma = mpf(4), mpf(1)

        def w2(x):
            return mpmath.exp(-(4 / sigma) * (x * x - r * x))

        mu = [mpmath.quad(lambda x, k=k: x ** k * w2(x), [0, 2, INF]) for k in range(3)]
        # the half-line value carries 1/N!
        oracle = mpmath.log(mu[0] * mu[2] - mu[1] ** 2)
        assert abs(exact_log_Z_half(0, r, sigma, 2, CTX).log_Z - oracle) < QTOL
        one = mpmath.quad(lambda x: mpmath.exp(-2 * (x * x - r * x)), [0, 2, INF])
        assert abs(exact_log_Z_half(0, r, sigma, 1, CTX).log_Z - mpmath.log(one)) < QTOL


@pytest.mark.parametrize("alpha", ["-0.5", "0.5"])
def test_half_line_singular_edge(alpha):
    with mpmath.workdps(40):
        a = mpf(alpha)
        # x = u**2 keeps the oracle integrand smooth at the edge
        one = mpmath.quad(lambda u: 2 * u ** (2 * a + 1) * mpmath.exp(-2 * (u ** 4 - mpf("0.3") * u * u)), [0, 1, INF])
        assert abs(exact_log_Z_half(a, "0.3", 1, 1, CTX).log_Z - mpmath.log(one)) < QTOL


def test_alpha_derivative_single_point():
    with mpmath.workdps(40):
        def w(x):
            return mpmath.exp(-2 * (x * x - 4 * x))

        z = mpmath.quad(w, [0, 2, INF])
        oracle = mpmath.quad(lambda x: mpmath.log(x) * w(x), [0, 2, INF]) / z
        got = log_Z_half_alpha_derivative(0, 4, 1, 1, CTX)
        assert abs(got - oracle) < mpf(10) ** -20


def test_stieltjes_route_agrees():
    V = Potential.quartic_plus_t((0, 0, "0.05"))
    got = exact_log_Z(V, 16, CTX)
    with CTX.workprec():
        assert abs(got.log_Z - got.stieltjes) < mpf(10) ** -60
        assert got.error_bound < mpf(10) ** -60


def test_reflection_invariance():
    V = Potential.quartic_plus_t(("0.05", 0, "0.02"))
    a = exact_log_Z(V, 9, CTX).log_Z
    b = exact_log_Z(V.reflected(), 9, CTX).log_Z
    with CTX.workprec():
        assert abs(a - b) < mpf(10) ** -60


def test_gaussian_moments():
    with CTX.workprec():
        mu = moments(line_weight(Potential.gaussian_line(1), 1), 7, CTX)
        # exp(-2 x**2): mu_{2k} = sqrt(pi/2) (2k-1)!! / 4**k
        base = mpmath.sqrt(mpmath.pi / 2)
        want = [base, 0, base / 4, 0, 3 * base / 16, 0, 15 * base / 64]
        for m, w in zip(mu, want):
            assert abs(m - w) < mpf(10) ** -70


def test_gram_matrix():
    lad = hankel_ladder(line_weight(Potential.quartic_plus_t(), 6), 6, CTX)
    with CTX.workprec():
        assert lad.gram_residual() < mpf(10) ** -60
        c, d = lad.subleading(3)
        # symmetric weight: odd-shift recurrence coefficients vanish
        assert abs(c) < mpf(10) ** -60


@pytest.mark.parametrize("k", [1, 2, 3])
def test_t_derivative_by_finite_difference(k):
    N = 5
    V = Potential.quartic_plus_t(("0.05",))
    exact = log_Z_t_derivative(V, N, k, CTX)
    with CTX.workprec():
        h = mpf(10) ** -20
        up = exact_log_Z(V.perturbed(k, h), N, CTX).log_Z
        dn = exact_log_Z(V.perturbed(k, -h), N, CTX).log_Z
        assert abs((up - dn) / (2 * h) - exact) < mpf(10) ** -30


@pytest.mark.parametrize("n", [1, 2, 3])
def test_parity_factorization(n):
    res = parity_factorization(4, 1, n, CTX)
    assert res["even_residual"] < mpf(10) ** -60
    assert res["odd_residual"] < mpf(10) ** -60


def test_orthogonal_polynomial_parity_identity():
    res = op_identity_check(4, 1, 3, CTX)
    assert res["max_residual"] < mpf(10) ** -50


def test_domain_errors():
    V = Potential.quartic_plus_t()
    with pytest.raises(DomainError):
        exact_log_Z(V, 0, CTX)
    with pytest.raises(DomainError):
        exact_log_Z(V, 49, CTX)
    with pytest.raises(DomainError):
        half_line_weight(1, 4, 1, 3)
    with pytest.raises(DomainError):
        half_line_weight("-1.5", 4, 1, 3, strict=False)
