"""Branch bookkeeping for ``y**2 = R(z) = prod(z - a_j)`` with real ordered endpoints.

``sqrt_R`` is the product of principal square roots.  With an even number of
endpoints this is analytic off the support intervals, positive to the right of
the last endpoint and behaves like ``z**(n/2)`` at infinity; it is the branch
used for every density, period and differential in the package.
"""

from __future__ import annotations

import mpmath
from mpmath import mpf

from .errors import BranchError


def sqrt_R(z, endpoints):
    z = mpmath.mpmathify(z)
    out = mpmath.mpf(1)
    for a in endpoints:
        out *= mpmath.sqrt(z - a)
    return out


def sqrt_upper(x):
    """Square root of real ``x`` as the boundary value from the upper half plane."""
    return mpmath.mpc(0, mpmath.sqrt(-x)) if x < 0 else mpmath.sqrt(x)


def edge_product(endpoints, j, power=mpf(1) / 2):
    """``prod_{i != j} (a_j - a_i)**power`` with upper-half-plane limits (power = +-1/2)."""
    aj = endpoints[j]
    out = mpmath.mpf(1)
    for i, ai in enumerate(endpoints):
        if i == j:
            continue
        root = sqrt_upper(aj - ai)
        out *= root if power > 0 else 1 / root
    return out


def binomial_inv_sqrt_series(a, order):
    """Coefficients of ``(1 - a*u)**(-1/2)`` up to ``u**order``."""
    out = [mpf(1)]
    c = mpf(1)
    for m in range(1, order + 1):
        c = c * (2 * m - 1) / (2 * m) * a
        out.append(c)
    return out


def _mul_series(p, q, order):
    out = [mpf(0)] * (order + 1)
    for i, x in enumerate(p[: order + 1]):
        if x == 0:
            continue
        for j, y in enumerate(q[: order + 1 - i]):
            out[i + j] += x * y
    return out


def inv_sqrt_series(endpoints, order):
    """Coefficients s_m with ``1/sqrt_R(z) = z**(-n/2) * sum_m s_m z**(-m)``."""
    s = [mpf(1)] + [mpf(0)] * order
    for a in endpoints:
        s = _mul_series(s, binomial_inv_sqrt_series(a, order), order)
    return s


def sqrt_series(endpoints, order):
    """Coefficients with ``sqrt_R(z) = z**(n/2) * sum_m c_m z**(-m)``."""
    s = [mpf(1)] + [mpf(0)] * order
    for a in endpoints:
        # (1 - a u)**(1/2) = 1 - sum C_m a^m u^m
        b = [mpf(1)]
        c = mpf(1)
        for m in range(1, order + 1):
            c = c * (2 * m - 3) / (2 * m) * a
            b.append(c)
        s = _mul_series(s, b, order)
    return s


def laurent_of_ratio(poly_coeffs, endpoints, order):
    """Laurent coefficients at infinity of ``P(z)/sqrt_R(z)``.

    Returns a dict ``{power: coefficient}`` for powers from ``deg P - n/2`` down
    to ``deg P - n/2 - order``.
    """
    half = len(endpoints) // 2
    s = inv_sqrt_series(endpoints, order + len(poly_coeffs))
    out = {}
    top = len(poly_coeffs) - 1 - half
    for power in range(top, top - order - 1, -1):
        acc = mpf(0)
        for k, v in enumerate(poly_coeffs):
            m = k - half - power
            if 0 <= m < len(s):
                acc += v * s[m]
        out[power] = acc
    return out


def laurent_of_product(poly_coeffs, endpoints, order):
    """Laurent coefficients at infinity of ``P(z)*sqrt_R(z)`` (same layout)."""
    half = len(endpoints) // 2
    s = sqrt_series(endpoints, order + len(poly_coeffs))
    out = {}
    top = len(poly_coeffs) - 1 + half
    for power in range(top, top - order - 1, -1):
        acc = mpf(0)
        for k, v in enumerate(poly_coeffs):
            m = k + half - power
            if 0 <= m < len(s):
                acc += v * s[m]
        out[power] = acc
    return out


def check_sign_pattern(values, expect, what):
    """Raise BranchError unless each value is positive real ('R') or in iR+ ('iR')."""
    for j, (val, kind) in enumerate(zip(values, expect)):
        v = mpmath.mpmathify(val)
        re, im = mpmath.re(v), mpmath.im(v)
        scale = abs(v)
        if kind == "R":
            ok = re > 0 and abs(im) <= scale * mpf(10) ** -10
        elif kind == "iR":
            ok = im > 0 and abs(re) <= scale * mpf(10) ** -10
        elif kind == "-iR":
            ok = im < 0 and abs(re) <= scale * mpf(10) ** -10
        else:
            ok = re < 0 and abs(im) <= scale * mpf(10) ** -10
        if not ok:
            raise BranchError(f"{what}[{j + 1}] = {mpmath.nstr(v, 8)} violates the expected {kind} sign")
