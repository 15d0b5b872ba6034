"""Arbitrary-precision substrate: precision context, polynomials, quadrature,
contour integrals and a damped Newton solver.

Values are ``mpmath`` numbers.  Every routine takes a :class:`PrecisionCtx`
and runs under ``mpmath.workprec(ctx.bits)``, so callers never touch the global
mpmath precision themselves.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import mpmath
from mpmath import mpf, mpc
from mpmath.calculus.quadrature import GaussLegendre

from .errors import DivergedNewton, NonConvergence, SingularJacobian

__all__ = [
    "PrecisionCtx",
    "RealPoly",
    "QuadratureRule",
    "Estimate",
    "DEFAULT_CTX",
    "gauss_legendre_rule",
    "tanh_sinh_rule",
    "integrate",
    "contour_integral",
    "newton_solve",
    "richardson_limit",
]


@dataclass(frozen=True)
class PrecisionCtx:
    """Working precision and tolerances.

    Parameters
    ----------
    bits : int
        Mantissa precision in bits, at least 64.
    tol_rel, tol_abs : float or str, optional
        Relative and absolute targets.  Both default to ``2**(-7*bits/8)``.
    """

    bits: int = 128
    tol_rel: object = None
    tol_abs: object = None

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 64:
            raise ValueError(f"bits must be an integer >= 64, got {self.bits!r}")
        default = mpmath.ldexp(1, -(7 * self.bits) // 8)
        for name in ("tol_rel", "tol_abs"):
            val = getattr(self, name)
            val = default if val is None else mpf(val)
            if not val > 0:
                raise ValueError(f"{name} must be positive")
            object.__setattr__(self, name, val)

    def workprec(self):
        """Context manager setting mpmath's working precision to ``bits``."""
        return mpmath.workprec(self.bits)

    def with_bits(self, bits: int) -> "PrecisionCtx":
        """Same relative accuracy request scaled to a different precision."""
        return PrecisionCtx(bits)

    @property
    def eps(self):
        return mpmath.ldexp(1, -self.bits)


DEFAULT_CTX = PrecisionCtx(128)


def _ctx(ctx):
    return DEFAULT_CTX if ctx is None else ctx


class Estimate(NamedTuple):
    """A value together with its estimated absolute error."""

    value: object
    error: object


# ---------------------------------------------------------------------------
# Polynomials


@dataclass(frozen=True)
class RealPoly:
    """Polynomial with coefficients stored lowest degree first.

    Trailing zero coefficients are stripped on construction, so ``degree`` is
    exact.  Coefficients may be real or complex mpmath numbers.
    """

    coeffs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        cs = [mpmath.mpmathify(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_roots(cls, roots, lead=1):
        p = cls((lead,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        acc = mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self) -> "RealPoly":
        return RealPoly(tuple(k * c for k, c in enumerate(self.coeffs))[1:])

    def antiderivative(self) -> "RealPoly":
        """Antiderivative vanishing at 0."""
        return RealPoly((0,) + tuple(c / (k + 1) for k, c in enumerate(self.coeffs)))

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return RealPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return RealPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return RealPoly(())
        out = [mpf(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return RealPoly(tuple(out))

    __rmul__ = __mul__

    def roots(self):
        """All complex roots, via mpmath's Durand-Kerner implementation."""
        if self.degree < 1:
            return []
        if self.degree == 1:
            return [-self.coeffs[0] / self.coeffs[1]]
        return list(
            mpmath.polyroots(list(reversed(self.coeffs)), maxsteps=200, extraprec=2 * mpmath.mp.prec)
        )

    def real(self) -> "RealPoly":
        return RealPoly(tuple(mpmath.re(c) for c in self.coeffs))

    def __repr__(self):
        return "RealPoly(" + ", ".join(mpmath.nstr(c, 12) for c in self.coeffs) + ")"


def _as_poly(x) -> RealPoly:
    return x if isinstance(x, RealPoly) else RealPoly((x,))


# ---------------------------------------------------------------------------
# Quadrature


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on a reference interval.

    ``kind`` is one of ``gauss_legendre`` (reference [-1, 1]),
    ``chebyshev_substituted`` (Gauss-Legendre in the angle on [0, pi]) or
    ``periodic_trapezoid`` (equispaced on [0, 2*pi)) or ``tanh_sinh``
    (reference [0, 1], double-exponential clustering at both ends).
    """

    nodes: tuple
    weights: tuple
    kind: str


_KINDS = ("gauss_legendre", "chebyshev_substituted", "periodic_trapezoid")


@functools.lru_cache(maxsize=64)
def _gl_nodes(level: int, bits: int):
    nodes = GaussLegendre(mpmath.mp).calc_nodes(level, bits + 16)
    return tuple(nodes)


def gauss_legendre_rule(level: int, ctx: PrecisionCtx | None = None) -> QuadratureRule:
    """Gauss-Legendre rule with ``3 * 2**(level-1)`` nodes on [-1, 1]."""
    ctx = _ctx(ctx)
    with ctx.workprec():
        pairs = _gl_nodes(level, ctx.bits)
        return QuadratureRule(
            tuple(+x for x, _ in pairs), tuple(+w for _, w in pairs), "gauss_legendre"
        )


@functools.lru_cache(maxsize=16)
def _ts01_nodes(level: int, bits: int):
    with mpmath.workprec(bits + 20):
        h = mpmath.ldexp(1, -level)
        cut = mpmath.ldexp(1, -(bits + 24))
        quarter_pi = mpmath.pi / 4
        out = []
        k = 0
        while True:
            done = True
            for t in ((k * h,) if k == 0 else (k * h, -k * h)):
                sh = mpmath.sinh(t)
                e = mpmath.exp(-mpmath.pi * sh)
                u = 1 / (1 + e)
                w = h * quarter_pi * mpmath.cosh(t) / mpmath.cosh(mpmath.pi * sh / 2) ** 2
                if w > cut:
                    done = False
                    out.append((u, w))
            if done and k > 0:
                break
            k += 1
        return tuple(sorted(out))


def tanh_sinh_rule(level: int, ctx: PrecisionCtx | None = None) -> QuadratureRule:
    """Tanh-sinh rule on [0, 1] with step ``2**-level``.

    Nodes close to 0 keep full relative accuracy, so weights like ``x**beta``
    with ``beta > -1`` are integrated to working precision.  Nodes near 1
    saturate; use the rule with the singular end at 0.
    """
    ctx = _ctx(ctx)
    with ctx.workprec():
        pairs = _ts01_nodes(level, ctx.bits)
        return QuadratureRule(tuple(+u for u, _ in pairs), tuple(+w for _, w in pairs), "tanh_sinh")


def _chebyshev_rule(level, ctx):
    gl = gauss_legendre_rule(level, ctx)
    half = mpmath.pi / 2
    return QuadratureRule(
        tuple(half * (x + 1) for x in gl.nodes),
        tuple(half * w for w in gl.weights),
        "chebyshev_substituted",
    )


def _apply(kind, f, lo, hi, level, ctx):
    if kind == "gauss_legendre":
        rule = gauss_legendre_rule(level, ctx)
        mid, half = (hi + lo) / 2, (hi - lo) / 2
        return half * mpmath.fsum(w * f(mid + half * x) for x, w in zip(rule.nodes, rule.weights))
    if kind == "chebyshev_substituted":
        rule = _chebyshev_rule(level, ctx)
        mid, half = (hi + lo) / 2, (hi - lo) / 2
        total = []
        for phi, w in zip(rule.nodes, rule.weights):
            c, s = mpmath.cos(phi), mpmath.sin(phi)
            dlo = 2 * half * mpmath.cos(phi / 2) ** 2
            dhi = 2 * half * mpmath.sin(phi / 2) ** 2
            total.append(w * half * s * f(mid + half * c, dlo, dhi))
        return mpmath.fsum(total)
    if kind == "periodic_trapezoid":
        m = 3 * 2 ** (level - 1)
        h = (hi - lo) / m
        return h * mpmath.fsum(f(lo + j * h) for j in range(m))
    raise ValueError(f"unknown quadrature kind {kind!r}; expected one of {_KINDS}")


def integrate(
    f: Callable,
    lo,
    hi,
    kind: str = "gauss_legendre",
    ctx: PrecisionCtx | None = None,
    *,
    start_level: int = 4,
    max_level: int = 9,
    tol=None,
) -> Estimate:
    """Integrate ``f`` over ``[lo, hi]`` with node doubling as error estimate.

    For ``kind="chebyshev_substituted"`` the variable is ``x = mid + half*cos(phi)``
    and ``f`` is called as ``f(x, x - lo, hi - x)`` with both distances computed
    without cancellation, so square-root edge factors can be formed exactly.

    Raises
    ------
    NonConvergence
        If successive levels still differ by more than the tolerance at
        ``max_level``.
    """
    ctx = _ctx(ctx)
    with ctx.workprec():
        lo, hi = mpmath.mpmathify(lo), mpmath.mpmathify(hi)
        tol = ctx.tol_rel if tol is None else mpf(tol)
        prev = _apply(kind, f, lo, hi, start_level, ctx)
        for level in range(start_level + 1, max_level + 1):
            cur = _apply(kind, f, lo, hi, level, ctx)
            err = abs(cur - prev)
            if err <= max(tol * abs(cur), ctx.tol_abs):
                return Estimate(cur, err)
            prev = cur
        raise NonConvergence(
            f"{kind} quadrature on [{mpmath.nstr(lo, 8)}, {mpmath.nstr(hi, 8)}] did not "
            f"converge: last change {mpmath.nstr(err, 5)}"
        )


def contour_integral(
    f: Callable,
    center=0,
    radius=1,
    points: int = 256,
    ctx: PrecisionCtx | None = None,
    *,
    max_points: int = 1 << 14,
    tol=None,
) -> Estimate:
    """Counter-clockwise integral of ``f(z) dz`` over ``|z - center| = radius``.

    Periodic trapezoid rule; ``points`` is doubled (reusing old nodes) until two
    consecutive values agree to ``tol`` relative to the size of the integrand.
    """
    ctx = _ctx(ctx)
    with ctx.workprec():
        c = mpmath.mpmathify(center)
        r = mpf(radius)
        tol = ctx.tol_rel if tol is None else mpf(tol)

        def term(theta):
            e = mpmath.expj(theta)
            return f(c + r * e) * e

        m = int(points)
        thetas = [2 * mpmath.pi * j / m for j in range(m)]
        vals = [term(t) for t in thetas]
        acc = mpmath.fsum(vals)
        scale = max(abs(v) for v in vals) * r * 2 * mpmath.pi
        prev = acc * (2 * mpmath.pi * r * 1j) / m
        while m < max_points:
            new = [term(2 * mpmath.pi * (2 * j + 1) / (2 * m)) for j in range(m)]
            scale = max(scale, max(abs(v) for v in new) * r * 2 * mpmath.pi)
            acc += mpmath.fsum(new)
            m *= 2
            cur = acc * (2 * mpmath.pi * r * 1j) / m
            err = abs(cur - prev)
            if err <= tol * max(scale, ctx.tol_abs):
                return Estimate(cur, err)
            prev = cur
        raise NonConvergence(f"contour integral did not converge with {m} points")


# ---------------------------------------------------------------------------
# Newton


def newton_solve(
    F: Callable[[Sequence], Sequence],
    x0: Sequence,
    ctx: PrecisionCtx | None = None,
    *,
    max_iter: int = 60,
    tol_abs=None,
    jacobian: Callable | None = None,
):
    """Solve ``F(x) = 0`` by damped Newton iteration.

    The Jacobian is built by central differences with step
    ``tol_rel**(1/3) * max(1, |x_i|)`` unless ``jacobian`` is given.  A step that
    increases the residual norm is halved up to 40 times.

    Returns
    -------
    list of mpf
    """
    ctx = _ctx(ctx)
    with ctx.workprec():
        tol = ctx.tol_abs if tol_abs is None else mpf(tol_abs)
        x = [mpf(v) for v in x0]
        n = len(x)
        fx = [mpmath.mpmathify(v) for v in F(x)]
        norm = max(abs(v) for v in fx)
        hscale = mpmath.cbrt(ctx.tol_rel)
        for _ in range(max_iter):
            if norm < tol:
                return x
            if jacobian is not None:
                J = mpmath.matrix(jacobian(x))
            else:
                J = mpmath.matrix(n, n)
                for i in range(n):
                    h = hscale * max(1, abs(x[i]))
                    xp, xm = list(x), list(x)
                    xp[i] += h
                    xm[i] -= h
                    fp, fm = F(xp), F(xm)
                    for r in range(n):
                        J[r, i] = (fp[r] - fm[r]) / (2 * h)
            try:
                dx = mpmath.lu_solve(J, mpmath.matrix([-v for v in fx]))
            except ZeroDivisionError as exc:
                raise SingularJacobian("finite-difference Jacobian is singular") from exc
            if any(not mpmath.isfinite(v) for v in dx):
                raise SingularJacobian("Newton step is not finite")
            lam = mpf(1)
            for _ in range(40):
                xn = [x[i] + lam * dx[i] for i in range(n)]
                try:
                    fn = [mpmath.mpmathify(v) for v in F(xn)]
                    nn = max(abs(v) for v in fn)
                except (ValueError, ZeroDivisionError, ArithmeticError):
                    nn = None
                if nn is not None and (nn < norm or nn < tol):
                    break
                lam /= 2
            else:
                raise DivergedNewton("line search failed to reduce the residual")
            x, fx, norm = xn, fn, nn
        if norm < tol:
            return x
        raise DivergedNewton(
            f"Newton did not converge in {max_iter} iterations (residual {mpmath.nstr(norm, 5)})"
        )


def richardson_limit(g: Callable, h0, ratio: int = 4, levels: int = 8, order: float = 1,
                     ctx: PrecisionCtx | None = None, tol=None) -> Estimate:
    """Limit of ``g(h)`` as ``h -> 0`` by Richardson extrapolation.

    ``g`` is sampled at ``h0 / ratio**m``; the error is assumed to expand in
    powers ``h**(order*j)``.
    """
    ctx = _ctx(ctx)
    with ctx.workprec():
        h0 = mpf(h0)
        rows = []
        best, best_err = None, mpmath.inf
        for m in range(levels):
            row = [g(h0 / mpf(ratio) ** m)]
            for j in range(1, m + 1):
                fac = mpf(ratio) ** (order * j)
                row.append(row[j - 1] + (row[j - 1] - rows[-1][j - 1]) / (fac - 1))
            if m:
                err = abs(row[-1] - rows[-1][-1])
                if err < best_err:
                    best, best_err = row[-1], err
            rows.append(row)
        if tol is not None and best_err > tol:
            raise NonConvergence(f"Richardson extrapolation stalled at {mpmath.nstr(best_err, 5)}")
        return Estimate(best, best_err)


def mpc_sqrt_upper(x):
    """Square root of a real ``x`` taken as the limit from the upper half plane."""
    x = mpmath.mpmathify(x)
    if mpmath.im(x) == 0 and x < 0:
        return mpc(0, mpmath.sqrt(-x))
    return mpmath.sqrt(x)

