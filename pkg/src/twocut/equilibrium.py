"""Equilibrium measures of polynomial potentials on one or two intervals.

The density on the support ``J`` is ``psi(x) = |R(x)|**(1/2) |h(x)| / (2*pi)``
where ``h`` is the polynomial part of ``V'(z) / R(z)**(1/2)`` at infinity.  The
endpoints are fixed by the vanishing of the ``z**-1`` (and, with two cuts,
``z**-2``) Laurent coefficients of that ratio, unit mass, and for two cuts the
gap condition ``int_{a2}^{a3} R**(1/2) h = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from mpmath import mpf

from . import curve
from .errors import CollidedEndpoints, DivergedNewton, DomainError, NonConvergence, SingularJacobian
from .mpnum import DEFAULT_CTX, PrecisionCtx, RealPoly, integrate, newton_solve

__all__ = [
    "Potential",
    "TwoCutMeasure",
    "OneCutMeasure",
    "RegularityCertificate",
    "ZeroSplit",
    "solve_endpoints_twocut",
    "solve_endpoints_onecut",
    "free_energy_F0",
    "closed_form_F0",
    "regularity_certificate",
    "certify_measure",
    "split_zeros",
    "psi_hat",
    "density",
    "integrate_against",
    "variational_function",
    "h_principal_value",
]

COLLISION_GAP = mpf("1e-6")

_BASES = ("gaussian_half", "gaussian_line", "quartic_sym", "quartic_plus_t", "polynomial")


@dataclass(frozen=True)
class Potential:
    """External field ``V`` with ``V(0) = 0``.

    Use the constructors :meth:`quartic_sym`, :meth:`quartic_plus_t`,
    :meth:`gaussian_half`, :meth:`gaussian_line` or :meth:`from_coeffs`.
    ``poly`` holds the coefficients, lowest degree first.
    """

    base: str
    params: tuple
    poly: RealPoly
    alpha: object = 0

    def __post_init__(self):
        if self.base not in _BASES:
            raise DomainError(f"unknown potential base {self.base!r}")
        p = self.poly
        if p.degree < 2 or p.degree % 2:
            raise DomainError(f"potential degree must be even and >= 2, got {p.degree}")
        if not p.coeffs[-1] > 0:
            raise DomainError("leading coefficient must be positive")
        if p.coeffs[0] != 0:
            raise DomainError("potential must satisfy V(0) = 0")
        if self.base == "gaussian_half" and not -0.5 <= float(self.alpha) <= 0.5:
            raise DomainError("alpha must lie in [-1/2, 1/2]")

    # constructors -------------------------------------------------------
    @classmethod
    def quartic_sym(cls, r, s):
        """``(x**4 - r x**2) / s``."""
        r, s = mpf(r), mpf(s)
        if not s > 0:
            raise DomainError("s must be positive")
        return cls("quartic_sym", (("r", r), ("s", s)), RealPoly((0, 0, -r / s, 0, 1 / s)))

    @classmethod
    def quartic_plus_t(cls, t=()):
        """``x**4 - 4 x**2 + sum_j t_j x**j`` with ``t = (t_1, t_2, ...)``."""
        t = tuple(mpf(v) for v in t)
        coeffs = [mpf(0), mpf(0), mpf(-4), mpf(0), mpf(1)]
        coeffs += [mpf(0)] * max(0, len(t) + 1 - len(coeffs))
        for j, v in enumerate(t, start=1):
            coeffs[j] += v
        return cls("quartic_plus_t", (("t", t),), RealPoly(tuple(coeffs)))

    @classmethod
    def gaussian_half(cls, r, sigma, alpha=0):
        """``(2/sigma)(x**2 - r x)`` on the half line, with weight factor ``x**alpha``."""
        r, sigma = mpf(r), mpf(sigma)
        if not sigma > 0:
            raise DomainError("sigma must be positive")
        return cls(
            "gaussian_half",
            (("r", r), ("sigma", sigma)),
            RealPoly((0, -2 * r / sigma, 2 / sigma)),
            mpf(alpha),
        )

    @classmethod
    def gaussian_line(cls, sigma):
        """``2 x**2 / sigma`` on the whole line (rescaled GUE)."""
        sigma = mpf(sigma)
        if not sigma > 0:
            raise DomainError("sigma must be positive")
        return cls("gaussian_line", (("sigma", sigma),), RealPoly((0, 0, 2 / sigma)))

    @classmethod
    def from_coeffs(cls, coeffs):
        """Arbitrary polynomial, coefficients lowest degree first; ``V(0)`` is dropped."""
        cs = [mpf(c) for c in coeffs]
        cs[0] = mpf(0)
        return cls("polynomial", (("coeffs", tuple(cs)),), RealPoly(tuple(cs)))

    # accessors ----------------------------------------------------------
    @property
    def half_line(self) -> bool:
        return self.base == "gaussian_half"

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def symmetric(self) -> bool:
        return not self.half_line and all(c == 0 for c in self.poly.coeffs[1::2])

    def param(self, name):
        return dict(self.params)[name]

    def __call__(self, x):
        return self.poly(x)

    def derivative(self) -> RealPoly:
        return self.poly.derivative()

    def perturbed(self, k: int, eps) -> "Potential":
        """Same potential plus ``eps * x**k`` (returned as a plain polynomial)."""
        cs = list(self.poly.coeffs) + [mpf(0)] * max(0, k + 1 - len(self.poly.coeffs))
        cs[k] += mpf(eps)
        if self.base == "quartic_plus_t" and len(cs) <= 5 + len(self.param("t")):
            t = list(self.param("t")) + [mpf(0)] * max(0, k - len(self.param("t")))
            t[k - 1] += mpf(eps)
            return Potential.quartic_plus_t(t)
        return Potential.from_coeffs(cs)

    def reflected(self) -> "Potential":
        """``V(-x)``."""
        return Potential.from_coeffs([c if k % 2 == 0 else -c for k, c in enumerate(self.poly.coeffs)])


@dataclass(frozen=True)
class TwoCutMeasure:
    """Equilibrium measure supported on ``[a1,a2] U [a3,a4]``.

    Attributes
    ----------
    endpoints : tuple of mpf
    h : RealPoly
        Polynomial part of ``V'/R**(1/2)``; the density is ``|R**(1/2) h| / (2 pi)``.
    omega : mpf
        Mass of ``[a3, a4]``.
    ell : mpf
        Lagrange constant of the variational equality.
    c : mpf
        Normalization ``int_J |R**(1/2) h_monic|`` of the monic density polynomial.
    """

    V: Potential
    endpoints: tuple
    h: RealPoly
    omega: object
    ell: object
    c: object
    mass: object
    loop_residual: object
    ctx: PrecisionCtx = field(default=DEFAULT_CTX, repr=False)

    cuts = 2


@dataclass(frozen=True)
class OneCutMeasure:
    """Equilibrium measure supported on a single interval ``[a, b]``."""

    V: Potential
    endpoints: tuple
    h: RealPoly
    ell: object
    c: object
    mass: object
    ctx: PrecisionCtx = field(default=DEFAULT_CTX, repr=False)

    cuts = 1


# ---------------------------------------------------------------------------
# endpoint equations


def _moment_residuals(dV: RealPoly, endpoints):
    """Laurent coefficients that must vanish (or equal 2) at the true endpoints."""
    half = len(endpoints) // 2
    lau = curve.laurent_of_ratio(dV.coeffs, endpoints, dV.degree - half + half + 2)
    out = []
    for p in range(1, half + 1):
        out.append(lau.get(-p, mpf(0)))
    out.append(lau.get(-half - 1, mpf(0)) - 2)
    return out


def _h_from_series(dV: RealPoly, endpoints):
    half = len(endpoints) // 2
    top = dV.degree - half
    lau = curve.laurent_of_ratio(dV.coeffs, endpoints, top + 1)
    return RealPoly(tuple(lau[p] for p in range(0, top + 1)))


def _gap_integrand(h, endpoints):
    a1, a2, a3, a4 = endpoints

    def f(x, dlo, dhi):
        return mpmath.sqrt((x - a1) * dlo * dhi * (a4 - x)) * h(x)

    return f


def _unpack(y):
    a1 = y[0]
    g = [mpmath.exp(v) for v in y[1:]]
    out = [a1]
    for gi in g:
        out.append(out[-1] + gi)
    return out


def _pack(endpoints):
    return [endpoints[0]] + [mpmath.log(endpoints[i + 1] - endpoints[i]) for i in range(len(endpoints) - 1)]


def solve_endpoints_twocut(V: Potential, seed, ctx: PrecisionCtx | None = None) -> TwoCutMeasure:
    """Endpoints ``a1 < a2 < a3 < a4`` and the associated two-cut measure.

    Newton runs in the coordinates ``(a1, log(a2-a1), log(a3-a2), log(a4-a3))`` so
    the ordering can never flip.

    Raises
    ------
    DivergedNewton, SingularJacobian
        When the iteration fails from ``seed``.
    CollidedEndpoints
        When a gap shrinks below ``1e-6``.
    """
    ctx = ctx or DEFAULT_CTX
    if V.half_line:
        raise DomainError("half-line weights are one-cut")
    with ctx.workprec():
        dV = V.derivative()
        seed = [mpf(a) for a in seed]
        if not all(seed[i] < seed[i + 1] for i in range(3)):
            raise DomainError("seed endpoints must be strictly increasing")
        quad_ctx = PrecisionCtx(ctx.bits + 16, tol_rel=ctx.tol_rel / 16)

        def F(y):
            a = _unpack(y)
            if min(a[i + 1] - a[i] for i in range(3)) < COLLISION_GAP:
                raise CollidedEndpoints(f"endpoint gap below {COLLISION_GAP}")
            res = _moment_residuals(dV, a)
            h = _h_from_series(dV, a)
            loop = integrate(_gap_integrand(h, a), a[1], a[2], "chebyshev_substituted", quad_ctx).value
            return res + [loop]

        try:
            y = newton_solve(F, _pack(seed), ctx)
        except CollidedEndpoints:
            raise
        except (DivergedNewton, SingularJacobian, NonConvergence) as exc:
            raise DivergedNewton(f"two-cut endpoint solve failed from seed: {exc}") from exc
        a = tuple(_unpack(y))
        if min(a[i + 1] - a[i] for i in range(3)) < COLLISION_GAP:
            raise CollidedEndpoints("endpoints collided at the solution")
        h = _h_from_series(dV, a)
        loop = integrate(_gap_integrand(h, a), a[1], a[2], "chebyshev_substituted", ctx).value
        parts = _support_integrals(lambda x: 1, h, a, ctx)
        mass = parts[0] + parts[1]
        omega = parts[1]
        c = 2 * mpmath.pi / h.coeffs[-1]
        ell = _ell_twocut(V, h, a, ctx)
        return TwoCutMeasure(V, a, h, omega, ell, c, mass, loop, ctx)


def solve_endpoints_onecut(V: Potential, ctx: PrecisionCtx | None = None, seed=None) -> OneCutMeasure:
    """Endpoints ``(a, b)`` of a one-cut measure.

    The Gaussian bases use their closed forms; other potentials are solved by
    Newton from ``seed`` (by default a Gaussian fit around the global minimum).
    """
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        dV = V.derivative()
        if V.base in ("gaussian_half", "gaussian_line"):
            sigma = V.param("sigma")
            r = V.param("r") if V.half_line else mpf(0)
            a = (r - 2 * mpmath.sqrt(sigma)) / 2
            b = (r + 2 * mpmath.sqrt(sigma)) / 2
            if V.half_line and not a > 0:
                raise DomainError("half-line weight needs sigma < r**2/4")
        else:
            if seed is None:
                seed = _onecut_seed(V)
            a0, b0 = (mpf(v) for v in seed)

            def F(y):
                ends = [y[0], y[0] + mpmath.exp(y[1])]
                return _moment_residuals(dV, ends)

            try:
                y = newton_solve(F, [a0, mpmath.log(b0 - a0)], ctx)
            except (SingularJacobian, NonConvergence) as exc:
                raise DivergedNewton(f"one-cut endpoint solve failed: {exc}") from exc
            a, b = y[0], y[0] + mpmath.exp(y[1])
        ends = (a, b)
        h = _h_from_series(dV, ends)
        mass = _support_integrals(lambda x: 1, h, ends, ctx)[0]
        c = 2 * mpmath.pi / h.coeffs[-1]
        ell = _ell_onecut(V, h, ends, ctx)
        return OneCutMeasure(V, ends, h, ell, c, mass, ctx)


def _onecut_seed(V):
    grid = [mpf(x) / 20 for x in range(-200, 201)]
    xm = min(grid, key=V.poly)
    curv = V.poly.derivative().derivative()(xm)
    rad = 2 / mpmath.sqrt(max(curv, mpf("0.1")))
    return xm - rad, xm + rad


# ---------------------------------------------------------------------------
# integrals against the density


def _intervals(endpoints):
    return [(endpoints[i], endpoints[i + 1]) for i in range(0, len(endpoints), 2)]


def _abs_density_integrand(f, h, endpoints, lo, hi):
    others = [a for a in endpoints if a != lo and a != hi]

    def g(x, dlo, dhi):
        w = dlo * dhi
        for a in others:
            w *= abs(x - a)
        return f(x) * mpmath.sqrt(w) * abs(h(x)) / (2 * mpmath.pi)

    return g


def _support_integrals(f, h, endpoints, ctx):
    return [
        integrate(_abs_density_integrand(f, h, endpoints, lo, hi), lo, hi, "chebyshev_substituted", ctx).value
        for lo, hi in _intervals(endpoints)
    ]


def integrate_against(measure, f, ctx: PrecisionCtx | None = None):
    """``int f dmu`` for a function smooth on the support."""
    ctx = ctx or measure.ctx
    with ctx.workprec():
        return mpmath.fsum(_support_integrals(f, measure.h, measure.endpoints, ctx))


def density(measure, x):
    """Equilibrium density at a real point (zero off the support)."""
    with measure.ctx.workprec():
        x = mpf(x)
        if not any(lo <= x <= hi for lo, hi in _intervals(measure.endpoints)):
            return mpf(0)
        w = mpf(1)
        for a in measure.endpoints:
            w *= abs(x - a)
        return mpmath.sqrt(w) * abs(measure.h(x)) / (2 * mpmath.pi)


def _log_energy(x0, V, h, endpoints, ctx):
    """``2 int log|x0 - y| dmu(y) - V(x0)`` for ``x0`` off the support."""
    parts = _support_integrals(lambda y: mpmath.log(abs(x0 - y)), h, endpoints, ctx)
    return 2 * mpmath.fsum(parts) - V(x0)


def _ell_twocut(V, h, a, ctx):
    a1, a2, a3, a4 = a
    x0 = (a2 + a3) / 2
    e0 = _log_energy(x0, V, h, a, ctx)

    def f(x, dlo, dhi):
        return h(x) * mpmath.sqrt((x - a1) * dlo * (a3 - x) * (a4 - x))

    # E'(x) = h(x) sqrt(R(x)) in the gap and E(a2) = ell
    return e0 - integrate(f, a2, x0, "chebyshev_substituted", ctx).value


def _ell_onecut(V, h, ends, ctx):
    a, b = ends
    x0 = b + (b - a) / 2
    e0 = _log_energy(x0, V, h, ends, ctx)

    def f(x, dlo, dhi):
        return h(x) * mpmath.sqrt(dlo * (x - a))

    # E'(x) = -h(x) sqrt(R(x)) to the right of b and E(b) = ell
    return e0 + integrate(f, b, x0, "chebyshev_substituted", ctx).value


def variational_function(measure, x, ctx: PrecisionCtx | None = None):
    """``2 int log|x-y| dmu(y) - V(x)`` at a real point off the support."""
    ctx = ctx or measure.ctx
    with ctx.workprec():
        return _log_energy(mpf(x), measure.V, measure.h, measure.endpoints, ctx)


def closed_form_F0(r, s):
    """``3/8 - log(s/4)/4 - r**2/(4 s)`` for the symmetric quartic."""
    r, s = mpf(r), mpf(s)
    return mpf(3) / 8 - mpmath.log(s / 4) / 4 - r * r / (4 * s)


def free_energy_F0(measure, V: Potential | None = None, ctx: PrecisionCtx | None = None):
    """``F0 = (int V dmu - ell) / 2``.

    Returns
    -------
    dict
        ``{"F0": numeric value, "closed_form": value or None}``; the closed form is
        filled for the symmetric quartic and Gaussian bases.
    """
    V = V or measure.V
    ctx = ctx or measure.ctx
    with ctx.workprec():
        iv = integrate_against(measure, V, ctx)
        F0 = (iv - measure.ell) / 2
        closed = None
        if V.base == "quartic_sym":
            closed = closed_form_F0(V.param("r"), V.param("s"))
        elif V.base == "quartic_plus_t" and not any(V.param("t")):
            closed = closed_form_F0(4, 1)
        elif V.base == "gaussian_line":
            closed = mpf(3) / 4 - mpmath.log(V.param("sigma") / 4) / 2
        return {"F0": F0, "closed_form": closed}


# ---------------------------------------------------------------------------
# branch-point data


def psi_hat(measure: TwoCutMeasure, j: int, order: int = 0):
    """``lim h(z)/2 * prod_{i != j} (z - a_i)**(1/2)`` at ``a_j`` and its derivative.

    ``j`` is 1-based.  The factor 1/2 makes ``|psi_hat(a_j)| * |x - a_j|**(1/2)``
    equal ``pi`` times the density near the edge.  Values at ``a2, a4`` are
    positive and at ``a1, a3`` lie in ``iR+``.

    Raises
    ------
    BranchError
        If the computed values violate that sign pattern.
    """
    with measure.ctx.workprec():
        a = measure.endpoints
        vals = []
        for i in range(len(a)):
            vals.append(measure.h(a[i]) / 2 * curve.edge_product(a, i))
        expect = ["iR", "R", "iR", "R"] if len(a) == 4 else ["iR", "R"]
        curve.check_sign_pattern(vals, expect, "psi_hat")
        val = vals[j - 1]
        if order == 0:
            return val
        aj = a[j - 1]
        dh = measure.h.derivative()(aj) / measure.h(aj)
        ds = sum(1 / (aj - ai) for i, ai in enumerate(a) if i != j - 1) / 2
        return val * (dh + ds)


def h_principal_value(measure, x, ctx: PrecisionCtx | None = None):
    """Density polynomial at a point of the support from the principal-value formula.

    Evaluates ``-(1/(2 pi i)) PV int_J V'(y) / (R_+**(1/2)(y) (y - x)) dy``, which
    equals ``h(x)/2``.  Because the principal value of ``1/(R_+**(1/2)(y)(y-x))``
    over ``J`` vanishes, the integrand reduces to the regular difference quotient
    of ``V'``.
    """
    ctx = ctx or measure.ctx
    with ctx.workprec():
        x = mpf(x)
        a = measure.endpoints
        dV = measure.V.derivative()
        dvx = dV(x)
        total = mpf(0)
        for idx, (lo, hi) in enumerate(_intervals(a)):
            others = [e for e in a if e != lo and e != hi]

            def f(y, dlo, dhi, others=others):
                w = dlo * dhi
                for e in others:
                    w *= abs(y - e)
                q = (dV(y) - dvx) / (y - x) if y != x else dV.derivative()(x)
                return q / mpmath.sqrt(w)

            val = integrate(f, lo, hi, "chebyshev_substituted", ctx).value
            # 1/R_+^{1/2} is -i/|R|^{1/2} on the last interval, alternating leftwards
            last = idx == len(a) // 2 - 1
            total += val if last else -val
        return total / (2 * mpmath.pi)


# ---------------------------------------------------------------------------
# regularity


@dataclass(frozen=True)
class ZeroSplit:
    """Real odd-multiplicity zeros of ``h`` sorted per interval, plus the rest."""

    gamma: tuple
    xi: tuple
    eta: tuple
    complex_pairs: tuple
    on_support: tuple


def split_zeros(h: RealPoly, endpoints, tol=None) -> ZeroSplit:
    """Classify the zeros of ``h`` relative to the support.

    Nearly equal real pairs count as a double zero and go to ``complex_pairs``.
    """
    tol = tol if tol is not None else mpf(10) ** (-(mpmath.mp.dps // 3))
    roots = h.roots()
    real = sorted(mpmath.re(z) for z in roots if abs(mpmath.im(z)) <= tol * max(1, abs(z)))
    cplx = [z for z in roots if mpmath.im(z) > tol * max(1, abs(z))]
    pairs = list(cplx)
    singles = []
    i = 0
    while i < len(real):
        if i + 1 < len(real) and abs(real[i + 1] - real[i]) <= tol * 10:
            pairs.append(mpmath.mpc((real[i] + real[i + 1]) / 2, 0))
            i += 2
        else:
            singles.append(real[i])
            i += 1
    a = endpoints
    gamma = tuple(sorted((x for x in singles if x < a[0]), reverse=True))
    eta = tuple(sorted(x for x in singles if x > a[-1]))
    xi = tuple(sorted(x for x in singles if len(a) == 4 and a[1] < x < a[2]))
    on = tuple(x for x in singles if any(lo <= x <= hi for lo, hi in _intervals(a)))
    return ZeroSplit(gamma, xi, eta, tuple(pairs), on)


@dataclass(frozen=True)
class RegularityCertificate:
    """Alternating partial sums of the m-integrals and the gap balance."""

    m_sums: tuple
    m_tilde_sums: tuple
    m_hat_sums: tuple
    hat_balance: object
    verdict: bool
    m: tuple = ()
    m_tilde: tuple = ()
    m_hat: tuple = ()


def _abs_RH_integral(h, endpoints, lo, hi, ctx):
    """``int_lo^hi |R**(1/2) h|`` where ``lo``/``hi`` may be endpoints or zeros."""
    others = [e for e in endpoints if e != lo and e != hi]
    lo_edge = lo in endpoints
    hi_edge = hi in endpoints

    def f(x, dlo, dhi):
        w = mpf(1)
        for e in others:
            w *= abs(x - e)
        if lo_edge:
            w *= dlo
        if hi_edge:
            w *= dhi
        return mpmath.sqrt(w) * abs(h(x))

    return integrate(f, lo, hi, "chebyshev_substituted", ctx).value


def _alt_partial(ms):
    out, acc = [], mpf(0)
    for k, m in enumerate(ms):
        acc += m if k % 2 == 0 else -m
        if (k + 1) % 2 == 0:
            out.append(acc)
    return out


def regularity_certificate(h: RealPoly, endpoints, ctx: PrecisionCtx | None = None,
                           zeros: ZeroSplit | None = None) -> RegularityCertificate:
    """Check the alternating-sum conditions characterizing regular equilibrium measures.

    The zeros of ``h`` are classified by :func:`split_zeros` unless given.  The
    verdict requires every even partial sum to be positive (margin above
    ``tol_abs``), no zero of ``h`` on the support, and for two cuts a vanishing
    gap balance.  Integrals use ``|h|`` as given; only signs matter.
    """
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        a = tuple(mpf(e) for e in endpoints)
        z = zeros or split_zeros(h, a)
        tol = ctx.tol_abs
        ends_hi = (a[-1],) + z.eta
        m = [_abs_RH_integral(h, a, ends_hi[j], ends_hi[j + 1], ctx) for j in range(len(z.eta))]
        ends_lo = (a[0],) + z.gamma
        mt = [_abs_RH_integral(h, a, ends_lo[j + 1], ends_lo[j], ctx) for j in range(len(z.gamma))]
        mh = []
        balance = mpf(0)
        if len(a) == 4:
            xs = (a[1],) + z.xi + (a[2],)
            mh = [_abs_RH_integral(h, a, xs[j], xs[j + 1], ctx) for j in range(len(xs) - 1)]
            balance = mpmath.fsum(v if j % 2 == 0 else -v for j, v in enumerate(mh))
        ms, mts = _alt_partial(m), _alt_partial(mt)
        mhs = _alt_partial(mh[:-1]) if mh else []
        scale = max([mpf(1)] + [abs(v) for v in m + mt + mh])
        ok = all(v > tol for v in ms + mts + mhs) and not z.on_support
        if len(a) == 4:
            ok = ok and abs(balance) < max(tol, ctx.tol_rel) * scale * 1000 and len(z.xi) % 2 == 1
        ok = ok and len(z.eta) % 2 == 0 and len(z.gamma) % 2 == 0
        return RegularityCertificate(tuple(ms), tuple(mts), tuple(mhs), balance, bool(ok),
                                     tuple(m), tuple(mt), tuple(mh))


def certify_measure(measure, ctx: PrecisionCtx | None = None) -> RegularityCertificate:
    """Regularity certificate of a solved measure (h sign fixed on the support)."""
    return regularity_certificate(measure.h, measure.endpoints, ctx or measure.ctx)
