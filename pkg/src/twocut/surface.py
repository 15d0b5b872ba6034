"""Quantities on the elliptic curve ``y**2 = R(z)`` with four real branch points.

Conventions
-----------
* ``v = dz / (A y)`` is the holomorphic differential normalized on the cycle
  around the gap; ``A = 2 int_{a2}^{a3} dz / R**(1/2)`` is negative.
* ``B = i * int_{a1}^{a2} |R|**(-1/2) / int_{a2}^{a3} R**(-1/2)``, so ``Im B > 0``.
* Hatted values are limits at ``a_j`` of ``(lambda - a_j)**(1/2)``-rescaled
  objects, approached from the upper half plane.
* ``Res_inf[f] = -(1/(2 pi i)) * (counter-clockwise integral of f dz)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from mpmath import mpf

from . import curve
from .errors import BranchError, DomainError, SingularJacobian
from .mpnum import DEFAULT_CTX, PrecisionCtx, RealPoly, contour_integral, integrate, richardson_limit
from .special import ThetaParams, log_theta_derivs

__all__ = [
    "SurfaceData",
    "periods",
    "surface_data",
    "v_hat_eval",
    "v_hat_limit",
    "projective_connection",
    "vandermonde",
    "gamma_sq",
    "bidifferential_w",
    "w_hat_eval",
    "w_hat_limit",
    "sigma_k",
    "sigma_hat",
    "residue_at_infinity",
    "F1_corrections",
    "time_derivatives",
]


def _check(endpoints):
    a = tuple(mpf(x) for x in endpoints)
    if len(a) != 4 or not all(a[i] < a[i + 1] for i in range(3)):
        raise DomainError("need four strictly increasing real endpoints")
    return a


def periods(endpoints, ctx: PrecisionCtx | None = None):
    """Signed period ``A`` and normalized modulus ``B`` by edge-regular quadrature."""
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        a1, a2, a3, a4 = _check(endpoints)
        gap = integrate(lambda x, dlo, dhi: 1 / mpmath.sqrt((x - a1) * (a4 - x) * dlo * dhi),
                        a2, a3, "chebyshev_substituted", ctx).value
        cut = integrate(lambda x, dlo, dhi: 1 / mpmath.sqrt((a3 - x) * (a4 - x) * dlo * dhi),
                        a1, a2, "chebyshev_substituted", ctx).value
        # R^{1/2} = -sqrt(R) on the gap, hence the sign of A
        A = -2 * gap
        B = mpmath.mpc(0, cut / gap)
        return A, B


def vandermonde(endpoints):
    a = endpoints
    out = mpf(1)
    for j in range(len(a)):
        for k in range(j + 1, len(a)):
            out *= a[k] - a[j]
    return out


def v_hat_eval(endpoints, A, j: int, order: int = 0):
    """``v_hat(a_j)`` (order 0) or ``v_hat'(a_j)`` (order 1) from the closed-form product.

    ``j`` is 1-based.  ``v_hat(a2), v_hat(a4)`` are real, the latter with the sign
    of ``A`` and the former opposite; ``v_hat(a1), v_hat(a3)`` are imaginary.
    """
    a = endpoints
    val = 1 / (A * curve.edge_product(a, j - 1))
    if order == 0:
        return val
    aj = a[j - 1]
    return -val * sum(1 / (aj - ai) for i, ai in enumerate(a) if i != j - 1) / 2


def v_hat_limit(endpoints, A, j: int, order: int = 0, ctx: PrecisionCtx | None = None, h0="1e-2"):
    """Richardson-extrapolated limit defining ``v_hat`` (independent of the product form)."""
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        aj = endpoints[j - 1]
        v0 = None

        def scaled(lam):
            return mpmath.sqrt(lam - aj) / (A * curve.sqrt_R(lam, endpoints))

        if order == 0:
            return richardson_limit(lambda h: scaled(aj + 1j * h), h0, ctx=ctx).value
        v0 = richardson_limit(lambda h: scaled(aj + 1j * h), h0, ctx=ctx).value
        return richardson_limit(lambda h: (scaled(aj + 1j * h) - v0) / (1j * h), h0, ctx=ctx).value


def projective_connection(endpoints, A, B, theta_dd0, j: int):
    """``S_B(a_j) = 3 sum_{i != j} (-1)**(i+j)/(a_j - a_i) - 24 (log theta)''(0) v_hat(a_j)**2``."""
    a = endpoints
    aj = a[j - 1]
    s = mpf(0)
    for i in range(1, 5):
        if i != j:
            s += (-1) ** (i + j) / (aj - a[i - 1])
    return 3 * s - 24 * theta_dd0 * v_hat_eval(a, A, j) ** 2


@dataclass(frozen=True)
class SurfaceData:
    """Periods and branch-point data of the elliptic curve through four real endpoints."""

    endpoints: tuple
    A_period: object
    B: object
    v_hat: tuple
    v_hat_prime: tuple
    S_B: tuple
    vandermonde: object
    theta_dd0: object
    ctx: PrecisionCtx = field(default=DEFAULT_CTX, repr=False)

    @property
    def abs_A(self):
        return abs(self.A_period)

    @property
    def theta_params(self) -> ThetaParams:
        return ThetaParams(self.B, ctx=self.ctx)

    @property
    def radius(self):
        return 2 * max(abs(x) for x in self.endpoints) + 2


def surface_data(endpoints, ctx: PrecisionCtx | None = None) -> SurfaceData:
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        a = _check(endpoints)
        A, B = periods(a, ctx)
        tdd = mpmath.re(log_theta_derivs(0, ThetaParams(B, ctx=ctx))[2])
        vh = tuple(v_hat_eval(a, A, j) for j in range(1, 5))
        if not A < 0:
            raise BranchError("the gap period must be negative")
        curve.check_sign_pattern(vh, ["-iR", "R", "iR", "-R"], "v_hat")
        vhp = tuple(v_hat_eval(a, A, j, 1) for j in range(1, 5))
        S = tuple(projective_connection(a, A, B, tdd, j) for j in range(1, 5))
        return SurfaceData(a, A, B, vh, vhp, S, vandermonde(a), tdd, ctx)


# ---------------------------------------------------------------------------
# bidifferential


def gamma_sq(z, endpoints):
    """``((z-a2)(z-a4)/((z-a1)(z-a3)))**(1/2)`` on sheet 1 (tends to 1 at infinity)."""
    a1, a2, a3, a4 = endpoints
    return mpmath.sqrt(z - a2) * mpmath.sqrt(z - a4) / (mpmath.sqrt(z - a1) * mpmath.sqrt(z - a3))


def bidifferential_w(P, Q, surface: SurfaceData, theta_dd0=None):
    """Coefficient of ``dz(P) dz(Q)`` in the fundamental bidifferential.

    ``P`` and ``Q`` are ``(z, sheet)`` pairs (sheet 1 or 2) or bare complex
    numbers meaning sheet 1.
    """
    tdd = surface.theta_dd0 if theta_dd0 is None else theta_dd0
    with surface.ctx.workprec():
        (zp, sp), (zq, sq) = (_point(P), _point(Q))
        a = surface.endpoints
        gp = gamma_sq(zp, a) * (1 if sp == 1 else -1)
        gq = gamma_sq(zq, a) * (1 if sq == 1 else -1)
        check = gp ** 2 * (zp - a[0]) * (zp - a[2]) - (zp - a[1]) * (zp - a[3])
        if abs(check) > mpf(10) ** (-mpmath.mp.dps // 2) * max(1, abs(zp) ** 2):
            raise BranchError("gamma**4 disagrees with its rational definition")
        vp = _v(zp, sp, surface)
        vq = _v(zq, sq, surface)
        return (gp / gq + 2 + gq / gp) / (4 * (zp - zq) ** 2) - tdd * vp * vq


def _point(P):
    if isinstance(P, tuple):
        return mpmath.mpmathify(P[0]), int(P[1])
    return mpmath.mpmathify(P), 1


def _v(z, sheet, surface):
    val = 1 / (surface.A_period * curve.sqrt_R(z, surface.endpoints))
    return val if sheet == 1 else -val


def _G(a, j, lam):
    """``gamma_sq`` with the ``(lam - a_j)`` factor removed, upper-half-plane limits."""
    out = mpf(1)
    for i in range(4):
        if i == j:
            continue
        root = curve.sqrt_upper(lam - a[i]) if mpmath.im(lam) == 0 else mpmath.sqrt(lam - a[i])
        out = out * root if i % 2 == 1 else out / root
    return out


def w_hat_eval(surface: SurfaceData, j: int, z, order: int = 0, theta_dd0=None):
    """Closed-form ``w_hat(a_j, z)`` (order 0) or ``w_hat'(a_j, z)`` (order 1), z on sheet 1."""
    tdd = surface.theta_dd0 if theta_dd0 is None else theta_dd0
    with surface.ctx.workprec():
        a = surface.endpoints
        i0 = j - 1
        aj = a[i0]
        z = mpmath.mpmathify(z)
        gz = gamma_sq(z, a)
        G = _G(a, i0, aj)
        vz = _v(z, 1, surface)
        even = i0 % 2 == 1  # a2, a4: gamma_sq vanishes at a_j
        d = aj - z
        if order == 0:
            main = gz / (G * d ** 2) if even else G / (gz * d ** 2)
            return main / 4 - tdd * surface.v_hat[i0] * vz
        sgn = [(1 if i % 2 == 1 else -1) for i in range(4)]
        dlogG = sum(sgn[i] / (aj - a[i]) for i in range(4) if i != i0) / 2
        if even:
            main = G / (gz * d ** 2) - gz / (G * d ** 2) * (dlogG + 2 / d)
        else:
            main = G / (d ** 2) * (dlogG - 2 / d) / gz + gz / (G * d ** 2)
        return main / 4 - tdd * surface.v_hat_prime[i0] * vz


def w_hat_limit(surface: SurfaceData, j: int, z, order: int = 0, h0="1e-2", theta_dd0=None):
    """Richardson limit of the defining expression of ``w_hat`` / ``w_hat'``."""
    with surface.ctx.workprec():
        a = surface.endpoints
        aj = a[j - 1]
        z = mpmath.mpmathify(z)

        def scaled(lam):
            return mpmath.sqrt(lam - aj) * bidifferential_w(lam, z, surface, theta_dd0)

        base = richardson_limit(lambda h: scaled(aj + 1j * h), h0, order=0.5, levels=10, ctx=surface.ctx).value
        if order == 0:
            return base

        def deriv(h):
            lam = aj + 1j * h
            r = mpmath.sqrt(lam - aj)
            return (r * (bidifferential_w(lam, z, surface, theta_dd0) - 1 / (2 * (z - lam) ** 2)) - base) / (lam - aj)

        return richardson_limit(deriv, h0, order=0.5, levels=10, ctx=surface.ctx).value


# ---------------------------------------------------------------------------
# second-kind differentials and residues


def sigma_k(endpoints, k: int, ctx: PrecisionCtx | None = None) -> RealPoly:
    """Monic ``P_k`` of degree ``k+1`` with ``P_k dz/y = z**(k-1) dz + O(z**-2) dz``
    at infinity on sheet 1 and vanishing integral over the gap."""
    ctx = ctx or DEFAULT_CTX
    if k < 1:
        raise DomainError("k must be positive")
    with ctx.workprec():
        a = _check(endpoints)
        a1, a2, a3, a4 = a
        n = k + 1  # unknown coefficients p_0..p_k
        rows, rhs = [], []

        def lau(coeffs, power):
            return curve.laurent_of_ratio(coeffs, a, 2 * k + 4).get(power, mpf(0))

        lead = [mpf(0)] * (k + 1) + [mpf(1)]
        for power in range(k - 2, -2, -1):
            row = []
            for i in range(n):
                e = [mpf(0)] * (i + 1)
                e[i] = mpf(1)
                row.append(lau(e, power))
            rows.append(row)
            rhs.append(-lau(lead, power))

        def gap_int(coeffs):
            p = RealPoly(tuple(coeffs))
            return integrate(lambda x, dlo, dhi: p(x) / mpmath.sqrt((x - a1) * (a4 - x) * dlo * dhi),
                             a2, a3, "chebyshev_substituted", ctx).value

        row = []
        for i in range(n):
            e = [mpf(0)] * (i + 1)
            e[i] = mpf(1)
            row.append(gap_int(e))
        rows.append(row)
        rhs.append(-gap_int(lead))
        try:
            sol = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
        except ZeroDivisionError as exc:
            raise SingularJacobian("second-kind differential system is singular") from exc
        return RealPoly(tuple(sol[i] for i in range(n)) + (mpf(1),))


def sigma_hat(endpoints, P: RealPoly, m: int):
    """``lim sqrt(lambda - a_m) P(lambda)/y`` at ``a_m`` (1-based ``m``)."""
    return P(endpoints[m - 1]) / curve.edge_product(endpoints, m - 1)


def residue_at_infinity(f, k: int = 0, radius=None, ctx: PrecisionCtx | None = None, endpoints=None):
    """``Res_inf[z**k f(z) dz] = -(1/(2 pi i)) * ccw integral`` on a large circle.

    The radius defaults to ``2 max|a_j| + 2`` when endpoints are given.
    """
    ctx = ctx or DEFAULT_CTX
    if radius is None:
        radius = 2 * max(abs(mpf(x)) for x in endpoints) + 2 if endpoints is not None else 10
    with ctx.workprec():
        val = contour_integral(lambda z: z ** k * f(z), 0, radius, 256, ctx).value
        return -val / (2j * mpmath.pi)


# ---------------------------------------------------------------------------
# composite quantities


def F1_corrections(surface: SurfaceData, measure, theta_dd0=None):
    """``(F1^(1), F0^(3))`` from the branch-point data.

    ``F1^(1) = 1/2 sum v_hat/psi_hat (psi_hat'/(4 psi_hat) - S_B/6 - v_hat'/(12 v_hat))`` and
    ``F0^(3) = 4 sum v_hat**3 / psi_hat``.
    """
    from .equilibrium import psi_hat

    with surface.ctx.workprec():
        f11 = mpmath.mpc(0)
        f03 = mpmath.mpc(0)
        for j in range(1, 5):
            ph = psi_hat(measure, j)
            php = psi_hat(measure, j, 1)
            vh = surface.v_hat[j - 1]
            vhp = surface.v_hat_prime[j - 1]
            f11 += vh / ph * (php / (4 * ph) - surface.S_B[j - 1] / 6 - vhp / (12 * vh))
            f03 += 4 * vh ** 3 / ph
        f11 /= 2
        for name, val in (("F1^(1)", f11), ("F0^(3)", f03)):
            if abs(mpmath.im(val)) > max(surface.ctx.tol_abs, abs(val) * mpf(10) ** (-mpmath.mp.dps // 2)):
                raise BranchError(f"{name} has imaginary part {mpmath.nstr(mpmath.im(val), 5)}")
        return mpmath.re(f11), mpmath.re(f03)


def time_derivatives(surface: SurfaceData, measure, k: int, ctx: PrecisionCtx | None = None) -> dict:
    """Derivatives along ``V -> V + t x**k`` from residues at infinity.

    Returns a dict with ``dOmega``, ``da`` (4 values), ``dB``, ``dpsi_hat`` (4
    values), the residues ``res_w`` used, and ``da_sigma``, the alternative
    ``-k sigma_hat_k(a_m)/psi_hat(a_m)`` form of ``da``.
    """
    from .equilibrium import psi_hat

    ctx = ctx or surface.ctx
    with ctx.workprec():
        a = surface.endpoints
        R = surface.radius
        dOmega = -residue_at_infinity(lambda z: _v(z, 1, surface), k, R, ctx)
        res_w, res_wp, da, dpsi, da_sigma = [], [], [], [], []
        Pk = sigma_k(a, k, ctx)
        for m in range(1, 5):
            rw = residue_at_infinity(lambda z, m=m: w_hat_eval(surface, m, z, 0), k, R, ctx)
            rwp = residue_at_infinity(lambda z, m=m: w_hat_eval(surface, m, z, 1), k, R, ctx)
            ph = psi_hat(measure, m)
            php = psi_hat(measure, m, 1)
            res_w.append(rw)
            res_wp.append(rwp)
            da.append(2 * rw / ph)
            da_sigma.append(-k * sigma_hat(a, Pk, m) / ph)
            dpsi.append(3 * php / ph * rw - rwp)
        dB = 8j * mpmath.pi * mpmath.fsum(surface.v_hat[m] ** 2 * res_w[m] / psi_hat(measure, m + 1) for m in range(4))
        return {
            "dOmega": _real(dOmega),
            "da": tuple(_real(x) for x in da),
            "da_sigma": tuple(_real(x) for x in da_sigma),
            "dB": dB,
            "dpsi_hat": tuple(dpsi),
            "res_w": tuple(res_w),
            "res_w_prime": tuple(res_wp),
        }


def _real(x):
    x = mpmath.mpmathify(x)
    if abs(mpmath.im(x)) > max(abs(x) * mpf(10) ** (-mpmath.mp.dps // 3), mpf(10) ** (-mpmath.mp.dps // 2)):
        raise BranchError(f"expected a real quantity, got {mpmath.nstr(x, 8)}")
    return mpmath.re(x)
