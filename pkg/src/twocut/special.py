"""Complete elliptic integrals and Jacobi theta functions with characteristics.

The theta series used throughout is

    theta[delta; eps](z; B) = sum_n exp(pi*i*(n+delta)**2*B + 2*pi*i*(z+eps)*(n+delta))

with ``Im B > 0``.  Zero characteristics give the ordinary ``theta(z; B)``, which
is 1-periodic in ``z`` and satisfies the heat equation
``theta_zz = 4*pi*i*theta_B``.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .errors import DomainError
from .mpnum import DEFAULT_CTX, PrecisionCtx

__all__ = [
    "EllipticData",
    "ThetaParams",
    "elliptic_K",
    "elliptic_data",
    "modulus_from_endpoints",
    "theta",
    "theta_derivs",
    "log_theta_derivs",
    "log_theta_dB",
    "modular_check",
]


def elliptic_K(k, ctx: PrecisionCtx | None = None):
    """Complete elliptic integral of the first kind, ``K(k) = pi / (2 agm(1, k'))``.

    Raises
    ------
    DomainError
        If ``k`` is not strictly between 0 and 1.
    """
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        k = mpf(k)
        if not 0 < k < 1:
            raise DomainError(f"elliptic modulus must lie in (0, 1), got {k}")
        kp = mpmath.sqrt((1 - k) * (1 + k))
        return mpmath.pi / (2 * mpmath.agm(1, kp))


@dataclass(frozen=True)
class EllipticData:
    """Modulus, complete integrals and the normalized period ``B = i K'/K``.

    ``A_period`` is only set when the data come from four branch points; it is
    the signed period ``-4K / sqrt((a4-a2)(a3-a1))``.
    """

    k: object
    k_prime: object
    K: object
    K_prime: object
    B_modulus: object
    A_period: object = None


def elliptic_data(k, ctx: PrecisionCtx | None = None, A_period=None) -> EllipticData:
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        k = mpf(k)
        kp = mpmath.sqrt((1 - k) * (1 + k))
        K = elliptic_K(k, ctx)
        Kp = elliptic_K(kp, ctx)
        return EllipticData(k, kp, K, Kp, mpmath.mpc(0, Kp / K), A_period)


def modulus_from_endpoints(endpoints, ctx: PrecisionCtx | None = None) -> EllipticData:
    """Elliptic data of ``y**2 = prod(z - a_j)`` for real ``a1 < a2 < a3 < a4``."""
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        a1, a2, a3, a4 = (mpf(a) for a in endpoints)
        if not a1 < a2 < a3 < a4:
            raise DomainError("endpoints must be strictly increasing")
        k2 = (a3 - a2) * (a4 - a1) / ((a3 - a1) * (a4 - a2))
        k = mpmath.sqrt(k2)
        data = elliptic_data(k, ctx)
        A = -4 * data.K / mpmath.sqrt((a4 - a2) * (a3 - a1))
        return EllipticData(data.k, data.k_prime, data.K, data.K_prime, data.B_modulus, A)


@dataclass(frozen=True)
class ThetaParams:
    """Characteristics, modulus and tail tolerance of a theta series.

    ``truncation_eps`` defaults to ``2**(-bits/2) * tol_rel`` of the context.
    """

    B: object
    delta: object = 0
    epsilon: object = 0
    truncation_eps: object = None
    ctx: PrecisionCtx = DEFAULT_CTX

    def __post_init__(self):
        with self.ctx.workprec():
            B = mpmath.mpc(self.B)
            if not mpmath.im(B) > 0:
                raise DomainError(f"theta modulus needs Im B > 0, got {B}")
            object.__setattr__(self, "B", B)
            object.__setattr__(self, "delta", mpf(self.delta))
            object.__setattr__(self, "epsilon", mpf(self.epsilon))
            eps = self.truncation_eps
            if eps is None:
                eps = mpmath.ldexp(1, -self.ctx.bits // 2) * self.ctx.tol_rel
            object.__setattr__(self, "truncation_eps", mpf(eps))


def _series(z, params: ThetaParams, z_order: int, b_order: int):
    """Truncated series for the (z_order, b_order) derivative; returns (value, tail_bound)."""
    B, d, e = params.B, params.delta, params.epsilon
    z = mpmath.mpmathify(z)
    tb = mpmath.im(B)
    # terms have size exp(-pi*Im B*m**2 - 2*pi*m*Im(z+eps)) with m = n + delta
    m_star = -mpmath.im(z) / tb
    log_eps = mpmath.log(params.truncation_eps)
    # include polynomial factor (2*pi*|m|)**z_order * (pi*m**2)**b_order in the bound
    radius = 1
    while True:
        m = abs(m_star) + radius
        log_term = -mpmath.pi * tb * radius ** 2 + (z_order + 2 * b_order) * mpmath.log(2 * mpmath.pi * m + 1)
        if log_term < log_eps - 5:
            break
        radius += 1
    c = int(mpmath.nint(m_star - d))
    lo, hi = c - radius, c + radius
    zz = z + e
    total = mpmath.mpc(0)
    two_pi_i = 2j * mpmath.pi
    pi_i = 1j * mpmath.pi
    for n in range(lo, hi + 1):
        m = n + d
        t = mpmath.exp(pi_i * m * m * B + two_pi_i * zz * m)
        if z_order:
            t *= (two_pi_i * m) ** z_order
        if b_order:
            t *= (pi_i * m * m) ** b_order
        total += t
    # Gaussian tail beyond the window: geometric bound on the first dropped term
    ratio = mpmath.exp(-mpmath.pi * tb * (2 * radius + 1))
    tail = 2 * mpmath.exp(log_term) / (1 - ratio)
    return total, tail


def theta(z, params: ThetaParams):
    """Value of the theta series with characteristics at ``z``."""
    with params.ctx.workprec():
        val, _ = _series(z, params, 0, 0)
        return val


def theta_derivs(z, params: ThetaParams, z_order: int = 0, b_order: int = 0):
    """``d^z_order/dz^z_order d^b_order/dB^b_order`` of the theta series."""
    if not (0 <= z_order <= 4 and 0 <= b_order <= 1):
        raise DomainError("supported orders: z_order in 0..4, b_order in 0..1")
    with params.ctx.workprec():
        val, _ = _series(z, params, z_order, b_order)
        return val


def log_theta_derivs(z, params: ThetaParams):
    """``[log theta, (log theta)', (log theta)'', (log theta)''']`` in ``z``."""
    with params.ctx.workprec():
        t0, t1, t2, t3 = (theta_derivs(z, params, p) for p in range(4))
        l1 = t1 / t0
        l2 = t2 / t0 - l1 ** 2
        l3 = t3 / t0 - 3 * l1 * t2 / t0 + 2 * l1 ** 3
        return [mpmath.log(t0), l1, l2, l3]


def log_theta_dB(z, params: ThetaParams):
    """``d/dB log theta(z; B)``."""
    with params.ctx.workprec():
        return theta_derivs(z, params, 0, 1) / theta_derivs(z, params, 0, 0)


def modular_check(params: ThetaParams, shift=0, A_period=None, A_tilde=None) -> dict:
    """Residuals of the modular transformation ``B -> -1/B``.

    Compares ``theta(shift; B)`` with ``(-iB)**(-1/2) theta[shift; 0](0; -1/B)``
    and, when periods are supplied, ``A_tilde`` with ``(-iB) * A``.
    """
    with params.ctx.workprec():
        B = params.B
        lhs = theta(shift, ThetaParams(B, 0, 0, params.truncation_eps, params.ctx))
        Bt = -1 / B
        rhs = theta(0, ThetaParams(Bt, shift, 0, params.truncation_eps, params.ctx)) / mpmath.sqrt(-1j * B)
        out = {"theta_lhs": lhs, "theta_rhs": rhs, "theta_residual": abs(lhs - rhs) / abs(lhs)}
        if A_period is not None and A_tilde is not None:
            pred = -1j * B * A_period
            out["A_tilde_predicted"] = pred
            out["A_tilde_residual"] = abs(pred - A_tilde) / abs(A_tilde)
        return out
