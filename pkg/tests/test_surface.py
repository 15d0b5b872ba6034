import mpmath
import pytest
from mpmath import mpf

from twocut.equilibrium import Potential, solve_endpoints_twocut
from twocut.errors import DomainError
from twocut.mpnum import PrecisionCtx
from twocut.surface import (
    F1_corrections,
    bidifferential_w,
    periods,
    residue_at_infinity,
    sigma_k,
    surface_data,
    time_derivatives,
    v_hat_eval,
    v_hat_limit,
    vandermonde,
    w_hat_eval,
    w_hat_limit,
)

CTX = PrecisionCtx(128)
with CTX.workprec():
    ASYM = (mpf(-2), mpf("-0.8"), mpf("1.1"), mpf("2.3"))
# mpmath.quad stalls near 1e-20 on inverse square-root edges
QUAD_TOL = mpf(10) ** -18


@pytest.fixture(scope="module")
def asym():
    return surface_data(ASYM, CTX)


@pytest.fixture(scope="module")
def v0_pair():
    with CTX.workprec():
        m = solve_endpoints_twocut(Potential.quartic_plus_t(), [mpf(x) for x in ("-1.8", "-0.9", "1.1", "1.7")], CTX)
        return m, surface_data(m.endpoints, CTX)


def test_periods_against_quad(asym):
    with CTX.workprec():
        a1, a2, a3, a4 = ASYM

        def f(x):
            return 1 / mpmath.sqrt(abs((x - a1) * (x - a2) * (x - a3) * (x - a4)))

        gap = mpmath.quad(f, [a2, a3])
        cut = mpmath.quad(f, [a1, a2])
        assert abs(asym.A_period + 2 * gap) < QUAD_TOL
        assert abs(asym.B - 1j * cut / gap) < QUAD_TOL


def test_periods_against_elliptic_K(asym):
    with CTX.workprec():
        a1, a2, a3, a4 = ASYM
        k2 = (a3 - a2) * (a4 - a1) / ((a3 - a1) * (a4 - a2))
        K = mpmath.ellipk(k2)
        assert abs(asym.A_period + 4 * K / mpmath.sqrt((a4 - a2) * (a3 - a1))) < mpf(10) ** -30
        assert abs(asym.B - 1j * mpmath.ellipk(1 - k2) / K) < mpf(10) ** -30


def test_modulus_shrinks_as_gap_opens():
    with CTX.workprec():
        vals = [mpmath.im(periods((-2, -g, g, 2), CTX)[1]) for g in (mpf("0.2"), mpf("0.5"), mpf(1), mpf("1.5"))]
        assert all(x > y > 0 for x, y in zip(vals, vals[1:]))


def test_vandermonde():
    assert vandermonde((0, 1, 3)) == 1 * 3 * 2


def test_endpoint_validation():
    with pytest.raises(DomainError):
        periods((0, 1, 1, 2), CTX)
    with pytest.raises(DomainError):
        periods((0, 1, 2), CTX)


@pytest.mark.parametrize("j", [1, 2, 3, 4])
@pytest.mark.parametrize("order", [0, 1])
def test_v_hat_product_vs_limit(asym, j, order):
    with CTX.workprec():
        lim = v_hat_limit(ASYM, asym.A_period, j, order, CTX)
        assert abs(v_hat_eval(ASYM, asym.A_period, j, order) - lim) < mpf(10) ** -25


def test_v_hat_sign_pattern(asym):
    with CTX.workprec():
        v = [v_hat_eval(ASYM, asym.A_period, j) for j in range(1, 5)]
        tiny = mpf(10) ** -30
        assert all(abs(mpmath.im(v[j])) < tiny for j in (1, 3))
        assert all(abs(mpmath.re(v[j])) < tiny for j in (0, 2))
        assert mpmath.sign(mpmath.re(v[3])) == mpmath.sign(asym.A_period)
        assert mpmath.sign(mpmath.re(v[1])) == -mpmath.sign(asym.A_period)


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_rauch_variation(asym, j):
    with CTX.workprec():
        h = mpf("1e-10")
        up, dn = list(ASYM), list(ASYM)
        up[j - 1] += h
        dn[j - 1] -= h
        fd = (periods(up, CTX)[1] - periods(dn, CTX)[1]) / (2 * h)
        pred = 4j * mpmath.pi * v_hat_eval(ASYM, asym.A_period, j) ** 2
        assert abs(fd - pred) < mpf(10) ** -12 * abs(pred)


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_korotkin_identity(asym, j):
    # d/da_j log(A**12 * Delta**3) = -S_B(a_j)
    with CTX.workprec():
        def f(x):
            a = list(ASYM)
            a[j - 1] = x
            A, _ = periods(a, CTX)
            return 12 * mpmath.log(abs(A)) + 3 * mpmath.log(abs(vandermonde(a)))

        h = mpf("1e-12")
        fd = (f(ASYM[j - 1] + h) - f(ASYM[j - 1] - h)) / (2 * h)
        assert abs(fd + asym.S_B[j - 1]) < mpf(10) ** -12 * abs(fd)


def test_bidifferential_symmetric_with_double_pole(asym):
    with CTX.workprec():
        p, q = mpmath.mpc(3, 1), mpmath.mpc(-1, 2)
        assert abs(bidifferential_w(p, q, asym) - bidifferential_w(q, p, asym)) < mpf(10) ** -30
        eps = mpf(10) ** -15
        near = bidifferential_w(p, p + eps, asym) * eps ** 2
        assert abs(near - 1) < mpf(10) ** -12


@pytest.mark.parametrize("j", [1, 2, 3, 4])
@pytest.mark.parametrize("order", [0, 1])
def test_w_hat_closed_form_vs_limit(asym, j, order):
    with CTX.workprec():
        z = mpmath.mpc(3, 1)
        ev = w_hat_eval(asym, j, z, order)
        lim = w_hat_limit(asym, j, z, order)
        assert abs(ev - lim) < mpf(10) ** (-22 if order == 0 else -15) * max(1, abs(ev))


@pytest.mark.parametrize("k,f,want", [
    (0, lambda z: 1 / z, -1),
    (1, lambda z: 1 / (z - 1), -1),
    (2, lambda z: 1 / z ** 3, -1),
    (0, lambda z: z ** 2, 0),
])
def test_residue_at_infinity(k, f, want):
    with CTX.workprec():
        assert abs(residue_at_infinity(f, k, ctx=CTX) - want) < mpf(10) ** -30


@pytest.mark.parametrize("k", [1, 2, 3])
def test_sigma_k_normalization(k):
    with CTX.workprec():
        P = sigma_k(ASYM, k, CTX)
        assert P.degree == k + 1 and P.coeffs[-1] == 1
        a1, a2, a3, a4 = ASYM

        def y(z):
            return mpmath.sqrt((z - a1) * (z - a2) * (z - a3) * (z - a4))

        # P/y - z**(k-1) = O(z**-2)
        for z in (mpf(10) ** 6, mpf(10) ** 8):
            assert abs((P(z) / y(z) - z ** (k - 1)) * z) < mpf(10) ** -4
        gap = mpmath.quad(lambda x: P(x) / mpmath.sqrt(abs((x - a1) * (x - a2) * (x - a3) * (x - a4))), [a2, a3])
        assert abs(gap) < QUAD_TOL


def test_v0_F0_third_vanishes(v0_pair):
    m, S = v0_pair
    f11, f03 = F1_corrections(S, m)
    assert abs(f03) < mpf(10) ** -30 and abs(f11) < mpf(10) ** -30


def test_two_forms_of_endpoint_velocity():
    with CTX.workprec():
        m = solve_endpoints_twocut(Potential.quartic_plus_t(("0.05",)), [mpf(x) for x in ("-1.8", "-0.9", "1.1", "1.7")], CTX)
        S = surface_data(m.endpoints, CTX)
        d = time_derivatives(S, m, 2, CTX)
        for x, y in zip(d["da"], d["da_sigma"]):
            assert abs(x - y) < mpf(10) ** -28
