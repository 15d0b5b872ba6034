"""Large-N asymptotics of ``log Z_N`` for one- and two-cut potentials.

Everything is kept in log space.  The two-cut formula is

    log Z_N ~ gue_block(N) - N**2 F0 - F1 + log theta(N Omega; B),

with ``gue_block`` the potential-independent product of two GUE partition
functions at ``sigma* = 4 e**(3/2)``.  For the symmetric quartic the last two
terms collapse to an explicit even/odd constant.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import mpmath
from mpmath import mpf

from . import surface as surf
from .equilibrium import (
    Potential,
    TwoCutMeasure,
    certify_measure,
    closed_form_F0,
    free_energy_F0,
    integrate_against,
    psi_hat,
    solve_endpoints_twocut,
)
from .errors import CertificateFailure, DomainError, NotTwoCut, TwoCutError
from .mpnum import DEFAULT_CTX, PrecisionCtx
from .special import ThetaParams, theta_derivs

__all__ = [
    "sigma_star",
    "ExpansionResult",
    "GueValue",
    "TDerivative",
    "zeta_prime_minus1",
    "gue_log_partition",
    "gue_value",
    "gue_expansion",
    "gue_block",
    "gue_block_expansion",
    "quartic_ab",
    "parity_constant",
    "F1_value",
    "theta_value",
    "quartic_expansion",
    "general_expansion",
    "t_derivative",
    "g_coefficients",
]


def sigma_star():
    """``4 e**(3/2)`` at the current working precision."""
    return 4 * mpmath.exp(mpf(3) / 2)


def zeta_prime_minus1(ctx: PrecisionCtx | None = None):
    """``zeta'(-1) = 1/12 - log A`` with ``A`` the Glaisher-Kinkelin constant."""
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        return mpf(1) / 12 - mpmath.log(mpmath.glaisher)


def gue_log_partition(N: int, sigma, ctx: PrecisionCtx | None = None):
    """``log[(2 pi)**(N/2) (sigma/(4N))**(N**2/2) prod_{n<=N} n!]``; 0 for N = 0."""
    ctx = ctx or DEFAULT_CTX
    if N < 0:
        raise DomainError("N must be non-negative")
    with ctx.workprec():
        sigma = mpf(sigma)
        if not sigma > 0:
            raise DomainError("sigma must be positive")
        if N == 0:
            return mpf(0)
        n = mpf(N)
        log_superfactorial = mpmath.fsum(mpmath.loggamma(k + 2) for k in range(N))
        return n / 2 * mpmath.log(2 * mpmath.pi) + n * n / 2 * mpmath.log(sigma / (4 * n)) + log_superfactorial


@dataclass(frozen=True)
class GueValue:
    """Exact GUE ``log Z`` next to its large-N expansion."""

    N: int
    sigma: object
    log_Z: object
    expansion: object

    @property
    def residual(self):
        return self.log_Z - self.expansion


def gue_expansion(N: int, sigma, ctx: PrecisionCtx | None = None):
    """Large-N expansion of the GUE ``log Z`` without the ``O(1/N)`` remainder."""
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        n, sigma = mpf(N), mpf(sigma)
        return (
            -n * n * (mpf(3) / 4 - mpmath.log(sigma / 4) / 2)
            + n * mpmath.log(n)
            + n * (mpmath.log(2 * mpmath.pi) - 1)
            + mpf(5) / 12 * mpmath.log(n)
            + mpmath.log(2 * mpmath.pi) / 2
            + zeta_prime_minus1(ctx)
        )


def gue_value(N: int, sigma, ctx: PrecisionCtx | None = None) -> GueValue:
    ctx = ctx or DEFAULT_CTX
    return GueValue(N, mpf(sigma), gue_log_partition(N, sigma, ctx), gue_expansion(N, sigma, ctx))


def gue_block(N: int, ctx: PrecisionCtx | None = None):
    """``log(N!/(floor(N/2)! ceil(N/2)!) Z^GUE_{floor(N/2)} Z^GUE_{ceil(N/2)})`` at ``sigma*``."""
    ctx = ctx or DEFAULT_CTX
    if N < 1:
        raise DomainError("N must be positive")
    with ctx.workprec():
        lo, hi = N // 2, (N + 1) // 2
        ss = sigma_star()
        return (
            mpmath.loggamma(N + 1)
            - mpmath.loggamma(lo + 1)
            - mpmath.loggamma(hi + 1)
            + gue_log_partition(lo, ss, ctx)
            + gue_log_partition(hi, ss, ctx)
        )


def gue_block_expansion(N: int, ctx: PrecisionCtx | None = None):
    """Large-N form of :func:`gue_block` up to ``O(1/N)``."""
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        n = mpf(N)
        return (
            n * mpmath.log(n)
            + (mpmath.log(2 * mpmath.pi) - 1) * n
            + mpmath.log(n) / 3
            + mpmath.log(2 * mpmath.pi) / 2
            + 2 * zeta_prime_minus1(ctx)
            + mpmath.log(2) / 6
        )


def quartic_ab(r, s):
    """``a = (r - 2 sqrt s)/2``, ``b = (r + 2 sqrt s)/2``; requires ``r > 2 sqrt s``."""
    r, s = mpf(r), mpf(s)
    if not s > 0:
        raise DomainError("s must be positive")
    rs = 2 * mpmath.sqrt(s)
    if not r > rs:
        raise DomainError("need r > 2 sqrt(s) for a two-cut symmetric quartic")
    return (r - rs) / 2, (r + rs) / 2


def parity_constant(r, s, N: int, ctx: PrecisionCtx | None = None):
    """Order-one constant of the symmetric quartic, even or odd ``N``."""
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        a, b = quartic_ab(r, s)
        sa, sb = mpmath.sqrt(a), mpmath.sqrt(b)
        den = 2 * (a * b) ** (mpf(1) / 4)
        num = sb + sa if N % 2 == 0 else sb - sa
        return mpmath.log(num / den) / 2


def F1_value(surface: surf.SurfaceData, measure: TwoCutMeasure):
    """``(1/24) log(2**-8 (|A|/(2 pi))**12 |Delta|**3 prod |psi_hat(a_j)|)``."""
    with surface.ctx.workprec():
        prod = mpf(1)
        for j in range(1, 5):
            prod *= abs(psi_hat(measure, j))
        return (
            -8 * mpmath.log(2)
            + 12 * mpmath.log(abs(surface.A_period) / (2 * mpmath.pi))
            + 3 * mpmath.log(abs(surface.vandermonde))
            + mpmath.log(prod)
        ) / 24


def theta_value(z, B, ctx: PrecisionCtx | None = None, z_order: int = 0, b_order: int = 0):
    """Real value of a theta derivative at a real argument with ``B`` on the imaginary axis."""
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        v = theta_derivs(z, ThetaParams(B, ctx=ctx), z_order, b_order)
        return v


@dataclass(frozen=True)
class ExpansionResult:
    """Asymptotic ``log Z_N`` and its ingredients.

    ``total`` is ``gue_block - N**2 F0 + parity_constant`` when the symmetric
    quartic constant is known, otherwise ``gue_block - N**2 F0 - F1 + log
    theta_val``.
    """

    N: int
    F0: object
    F1: object
    omega: object
    B: object
    theta_val: object
    gue_block: object
    total: object
    parity_constant: object = None
    endpoints: tuple = ()
    ctx: PrecisionCtx = field(default=DEFAULT_CTX, repr=False)

    def recompute(self):
        with self.ctx.workprec():
            n2 = mpf(self.N) ** 2
            if self.parity_constant is not None:
                return self.gue_block - n2 * self.F0 + self.parity_constant
            return self.gue_block - n2 * self.F0 - self.F1 + mpmath.log(self.theta_val)

    def theta_form(self):
        """``gue_block - N**2 F0 - F1 + log theta_val`` regardless of the stored form."""
        with self.ctx.workprec():
            return self.gue_block - mpf(self.N) ** 2 * self.F0 - self.F1 + mpmath.log(self.theta_val)


def _real_theta(z, B, ctx):
    v = theta_value(z, B, ctx)
    if abs(mpmath.im(v)) > abs(v) * mpf(10) ** (-mpmath.mp.dps // 2):
        raise TwoCutError("theta at a real argument came out complex; check B")
    v = mpmath.re(v)
    if not v > 0:
        raise TwoCutError("theta at a real argument must be positive")
    return v


@functools.lru_cache(maxsize=64)
def _two_cut_data(V: Potential, seed, bits: int, certify: bool):
    ctx = PrecisionCtx(bits)
    if seed is None:
        from .deform import solve_by_continuation

        m = solve_by_continuation(V, ctx)
    else:
        m = solve_endpoints_twocut(V, seed, ctx)
    if certify:
        cert = certify_measure(m, ctx)
        if not cert.verdict:
            raise NotTwoCut("regularity certificate failed for this potential")
    S = surf.surface_data(m.endpoints, ctx)
    F0 = free_energy_F0(m, V, ctx)["F0"]
    return m, S, F0


def two_cut_data(V: Potential, ctx: PrecisionCtx | None = None, seed=None, certify: bool = True):
    """``(measure, surface, F0)`` for a two-cut potential, cached per precision.

    Raises
    ------
    NotTwoCut
        If the solver leaves the two-cut regime or the certificate fails.
    """
    ctx = ctx or DEFAULT_CTX
    seed = None if seed is None else tuple(mpf(x) for x in seed)
    try:
        return _two_cut_data(V, seed, ctx.bits, certify)
    except NotTwoCut:
        raise
    except (CertificateFailure, TwoCutError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise NotTwoCut(str(exc)) from exc


def quartic_expansion(r, s, N: int, ctx: PrecisionCtx | None = None) -> ExpansionResult:
    """Symmetric quartic ``(x**4 - r x**2)/s``: closed-form F0 and parity constant.

    F1, Omega and B are filled from the branch-point data of the closed-form
    support so the result can be compared term by term with the general form.
    """
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        a, b = quartic_ab(r, s)
        ends = (-mpmath.sqrt(b), -mpmath.sqrt(a), mpmath.sqrt(a), mpmath.sqrt(b))
        V = Potential.quartic_sym(r, s)
        m, S, _ = two_cut_data(V, ctx, seed=ends, certify=False)
        F0 = closed_form_F0(r, s)
        F1 = F1_value(S, m)
        omega = mpf(1) / 2
        th = _real_theta(N * omega, S.B, ctx)
        blk = gue_block(N, ctx)
        pc = parity_constant(r, s, N, ctx)
        total = blk - mpf(N) ** 2 * F0 + pc
        return ExpansionResult(N, F0, F1, omega, S.B, th, blk, total, pc, ends, ctx)


def general_expansion(V: Potential, N: int, ctx: PrecisionCtx | None = None, seed=None) -> ExpansionResult:
    """``gue_block - N**2 F0 - F1 + log theta(N Omega; B)`` for a two-cut regular ``V``.

    Raises
    ------
    NotTwoCut
        If the potential is not certified two-cut regular.
    """
    ctx = ctx or DEFAULT_CTX
    m, S, F0 = two_cut_data(V, ctx, seed=seed)
    with ctx.workprec():
        F1 = F1_value(S, m)
        th = _real_theta(N * m.omega, S.B, ctx)
        blk = gue_block(N, ctx)
        total = blk - mpf(N) ** 2 * F0 - F1 + mpmath.log(th)
        return ExpansionResult(N, F0, F1, m.omega, S.B, th, blk, total, None, m.endpoints, ctx)


@dataclass(frozen=True)
class TDerivative:
    """Asymptotic ``d/dt_k log Z_N`` along ``V -> V + t x**k``.

    ``value`` is the leading-order prediction ``-d/dt[N**2 F0 + F1 - log
    theta(N Omega; B)]``.  ``correction_F1_1`` and ``correction_F0_3`` are the
    two oscillatory order-one terms proportional to ``dOmega`` that the
    leading form absorbs into its error; ``corrected`` adds both, the second
    with sign ``f03_sign``.
    """

    N: int
    k: int
    value: object
    components: dict
    correction_F1_1: object
    correction_F0_3: object
    f03_sign: int

    @property
    def corrected(self):
        return self.value + self.correction_F1_1 + self.f03_sign * self.correction_F0_3


def t_derivative(V: Potential, k: int, N: int, surface=None, measure=None,
                 ctx: PrecisionCtx | None = None, f03_sign: int = -1) -> TDerivative:
    """Leading-order ``d/dt_k log Z_N`` from residue formulas on the surface.

    Components: ``dF0 = int x**k dmu``; ``dF1`` by the chain rule through the
    endpoints (projective connection) and ``psi_hat``; ``dlog_theta`` through
    ``N dOmega`` and ``dB``.
    """
    ctx = ctx or DEFAULT_CTX
    if measure is None or surface is None:
        measure, surface, _ = two_cut_data(V, ctx)
    with ctx.workprec():
        d = surf.time_derivatives(surface, measure, k, ctx)
        dOmega = mpmath.re(d["dOmega"])
        dB = d["dB"]
        da = [mpmath.re(x) for x in d["da"]]
        dF0 = integrate_against(measure, lambda x: x ** k, ctx)
        dF1 = mpf(0)
        for j in range(4):
            ph = psi_hat(measure, j + 1)
            dF1 += -surface.S_B[j] * da[j] + mpmath.re(d["dpsi_hat"][j] / ph)
        dF1 /= 24
        z = N * measure.omega
        tp = ThetaParams(surface.B, ctx=ctx)
        t0, t1, t2, t3, t4 = (theta_derivs(z, tp, p) for p in range(5))
        tB = theta_derivs(z, tp, 0, 1)
        l1 = t1 / t0
        l2 = t2 / t0 - l1 ** 2
        dlog_theta = mpmath.re(N * l1 * dOmega + tB / t0 * dB)
        dF1 = mpmath.re(dF1)
        value = -(N * N * dF0 + dF1 - dlog_theta)
        F11, F03 = surf.F1_corrections(surface, measure)
        # (theta'''/theta)' = theta''''/theta - theta''' theta' / theta**2
        t3p = t4 / t0 - t3 * t1 / t0 ** 2
        corr1 = mpmath.re(l2 * F11 * dOmega)
        corr3 = mpmath.re(F03 / 6 * t3p * dOmega)
        comps = {
            "dF0": dF0,
            "dF1": dF1,
            "dlog_theta": dlog_theta,
            "dOmega": dOmega,
            "dB": dB,
            "da": tuple(da),
            "F1_1": F11,
            "F0_3": F03,
        }
        return TDerivative(N, k, value, comps, corr1, corr3, f03_sign)


def g_coefficients(r, sigma):
    """Leading and sub-leading coefficients of ``d/dalpha log Zh_N(alpha; r, sigma)``.

    ``G0 = (sqrt b - sqrt a)**2 / (2 (sqrt b + sqrt a)**2) + 2 log((sqrt a + sqrt b)/2)`` and
    ``G1 = 2 log((sqrt a + sqrt b) / (2 (ab)**(1/4)))`` with
    ``a, b = (r -+ 2 sqrt sigma)/2``.
    """
    r, sigma = mpf(r), mpf(sigma)
    if not sigma > 0 or not sigma < r * r / 4:
        raise DomainError("need 0 < sigma < r**2/4")
    a, b = quartic_ab(r, sigma)
    sa, sb = mpmath.sqrt(a), mpmath.sqrt(b)
    G0 = (sb - sa) ** 2 / (2 * (sb + sa) ** 2) + 2 * mpmath.log((sa + sb) / 2)
    G1 = 2 * mpmath.log((sa + sb) / (2 * (a * b) ** (mpf(1) / 4)))
    return G0, G1
