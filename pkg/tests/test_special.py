import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf

from twocut.errors import DomainError
from twocut.mpnum import PrecisionCtx
from twocut.special import (
    ThetaParams,
    elliptic_data,
    elliptic_K,
    log_theta_derivs,
    modular_check,
    modulus_from_endpoints,
    theta,
    theta_derivs,
)

CTX = PrecisionCtx(128)


def _quad_K(k):
    return mpmath.quad(lambda p: 1 / mpmath.sqrt(1 - k * k * mpmath.sin(p) ** 2), [0, mpmath.pi / 2])


def test_K_small_modulus():
    with CTX.workprec():
        assert abs(elliptic_K(mpf("1e-30"), CTX) - mpmath.pi / 2) < mpf(10) ** -30


@pytest.mark.parametrize("k", ["0.1", "0.3", "0.5", "0.7", "0.9"])
def test_K_agm_vs_quadrature(k):
    with CTX.workprec():
        k = mpf(k)
        assert abs(elliptic_K(k, CTX) / _quad_K(k) - 1) < mpf(10) ** -30


def test_K_domain():
    for bad in (0, 1, mpf("1.5"), -mpf("0.2")):
        with pytest.raises(DomainError):
            elliptic_K(bad, CTX)


def test_symmetric_quartic_modulus():
    with CTX.workprec():
        r3 = mpmath.sqrt(3)
        d = modulus_from_endpoints((-r3, mpf(-1), mpf(1), r3), CTX)
        assert abs(d.k - 2 * mpf(3) ** (mpf(1) / 4) / (1 + r3)) < mpf(10) ** -30
        assert abs(d.k ** 2 + d.k_prime ** 2 - 1) < CTX.tol_rel * 10
        assert abs(d.B_modulus - 1j * d.K_prime / d.K) < mpf(10) ** -30


def test_elliptic_data_invariants():
    with CTX.workprec():
        d = elliptic_data(mpf("0.6"), CTX)
        assert abs(d.K - mpmath.ellipk(mpf("0.36"))) < mpf(10) ** -30
        assert mpmath.im(d.B_modulus) > 0 and mpmath.re(d.B_modulus) == 0


def test_theta_even_and_derivative_zero():
    with CTX.workprec():
        p = ThetaParams(mpmath.mpc("0.1", "1.2"), ctx=CTX)
        z = mpmath.mpc("0.23", "0.05")
        assert abs(theta(z, p) - theta(-z, p)) < mpf(10) ** -35
        assert abs(theta_derivs(0, p, 1)) < mpf(10) ** -35


def test_theta_characteristic_period():
    with CTX.workprec():
        delta = mpf("0.3")
        p = ThetaParams(mpmath.mpc(0, "0.9"), delta=delta, epsilon=mpf("0.2"), ctx=CTX)
        z = mpmath.mpc("0.11", "0.02")
        lhs = theta(z + 1, p)
        rhs = theta(z, p) * mpmath.exp(2j * mpmath.pi * delta)
        # truncation_eps sits below the rounding floor at this precision, so allow for rounding too
        assert abs(lhs - rhs) < 10 * p.truncation_eps + mpmath.ldexp(1, 8 - CTX.bits) * max(1, abs(rhs))


def test_theta_against_jtheta():
    # mpmath's jtheta(3, pi z, q) with q = exp(i pi B) is the same series
    with CTX.workprec():
        B = mpmath.mpc("0.15", "0.8")
        z = mpmath.mpc("0.31", "-0.07")
        q = mpmath.exp(1j * mpmath.pi * B)
        ref = mpmath.jtheta(3, mpmath.pi * z, q)
        assert abs(theta(z, ThetaParams(B, ctx=CTX)) - ref) < mpf(10) ** -30


def test_K_theta_identity_k03():
    with CTX.workprec():
        k = mpf("0.3")
        d = elliptic_data(k, CTX)
        t0 = theta(0, ThetaParams(d.B_modulus, ctx=CTX))
        assert abs(mpmath.pi / 2 * t0 ** 2 - d.K) < mpf(10) ** -20


def test_heat_equation_point():
    with CTX.workprec():
        z, B = mpf("0.17"), mpmath.mpc(0, "1.3")
        p = ThetaParams(B, ctx=CTX)
        tzz = theta_derivs(z, p, 2)
        tB = theta_derivs(z, p, 0, 1)
        assert abs(tzz - 4j * mpmath.pi * tB) < mpf(10) ** -10 * abs(tzz)


def test_half_shift_k04():
    with CTX.workprec():
        k = mpf("0.4")
        d = elliptic_data(k, CTX)
        p = ThetaParams(d.B_modulus, ctx=CTX)
        lhs = mpmath.log(theta(mpf(1) / 2, p)) - mpmath.log(theta(0, p))
        assert abs(lhs - mpmath.log(1 - k * k) / 4) < mpf(10) ** -25


def test_log_theta_derivs_consistent():
    with CTX.workprec():
        p = ThetaParams(mpmath.mpc(0, "1.1"), ctx=CTX)
        z = mpf("0.2")
        l = log_theta_derivs(z, p)
        t0, t1, t2 = (theta_derivs(z, p, j) for j in range(3))
        assert abs(l[1] - t1 / t0) < mpf(10) ** -30
        assert abs(l[2] - (t2 / t0 - (t1 / t0) ** 2)) < mpf(10) ** -30


def test_modular_zero_shift():
    m = modular_check(ThetaParams(mpmath.mpc(0, "0.8"), ctx=CTX))
    assert m["theta_residual"] < mpf(10) ** -18


def test_modular_shift_7_5():
    m = modular_check(ThetaParams(mpmath.mpc(0, "1.1"), ctx=CTX), shift=mpf("7.5"))
    assert m["theta_residual"] < mpf(10) ** -15


def test_modular_A_tilde_symmetric_quartic():
    # A_tilde: twice the integral of |R|^(-1/2) over the cut [a1, a2] (sign of A), by mpmath.quad
    with CTX.workprec():
        r3 = mpmath.sqrt(3)
        a = (-r3, mpf(-1), mpf(1), r3)
        d = modulus_from_endpoints(a, CTX)
        A = d.A_period
        cut = mpmath.quad(lambda x: 1 / mpmath.sqrt(abs((x - a[0]) * (x - a[1]) * (x - a[2]) * (x - a[3]))), [a[0], a[1]])
        A_tilde = 2 * cut * mpmath.sign(A)
        m = modular_check(ThetaParams(d.B_modulus, ctx=CTX), A_period=A, A_tilde=A_tilde)
        assert m["A_tilde_residual"] < mpf(10) ** -20


def test_theta_domain():
    with pytest.raises(DomainError):
        ThetaParams(mpmath.mpc(0, -1))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.4, 3.0), st.floats(-0.5, 0.5), st.floats(-1, 1), st.floats(-0.3, 0.3))
def test_theta_periodicities(bi, br, zr, zi):
    with CTX.workprec():
        B = mpmath.mpc(br, bi)
        p = ThetaParams(B, ctx=CTX)
        z = mpmath.mpc(zr, zi)
        t = theta(z, p)
        assert abs(theta(z + 1, p) - t) <= 10 * p.truncation_eps * max(1, abs(t)) + mpf(10) ** -30 * abs(t)
        quasi = mpmath.exp(-1j * mpmath.pi * B - 2j * mpmath.pi * z) * t
        assert abs(theta(z + B, p) - quasi) <= mpf(10) ** -25 * max(1, abs(quasi))
