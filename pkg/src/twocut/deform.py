"""Regular deformation paths between equilibrium measures and reference fields.

A measure is described by its support endpoints and the zeros of a *monic*
polynomial ``h`` (density ``|R**(1/2) h| / c``).  Moving the zeros and
endpoints moves the measure, and :func:`measure_to_potential` turns every
intermediate measure back into a polynomial field.  Paths are certified
sample by sample with the alternating-sum regularity test, so a returned
path is a chain of fields that are known to stay regular.

Orientation: ``tau = 0`` is the reference field (``x**2/2`` for one cut,
``x**4 - 4x**2`` for two cuts) and ``tau = 1`` is the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from mpmath import mpf

from . import curve
from .equilibrium import (
    Potential,
    TwoCutMeasure,
    ZeroSplit,
    regularity_certificate,
    solve_endpoints_twocut,
    split_zeros,
)
from .errors import (
    CertificateFailure,
    CollidedEndpoints,
    DivergedNewton,
    DomainError,
    NonConvergence,
    RootBracketError,
)
from .mpnum import DEFAULT_CTX, PrecisionCtx, RealPoly, contour_integral, integrate

__all__ = [
    "ZeroConfiguration",
    "PathSample",
    "DeformationPath",
    "KINDS",
    "measure_to_potential",
    "gap_balance",
    "balance_root",
    "build_one_cut_path",
    "build_two_cut_path",
    "continuation_seeds",
    "solve_by_continuation",
    "v0_configuration",
    "gaussian_configuration",
]

KINDS = ("one_cut_basis", "one_cut_merge", "two_cut_basis", "two_cut_merge_case1", "two_cut_merge_case2")

S_MIN = mpf("0.02")
SCAN_POINTS = 64


def _real(x):
    return x if isinstance(x, mpf) else mpf(x)


@dataclass(frozen=True)
class ZeroConfiguration:
    """Support endpoints plus the zeros of the monic density polynomial.

    ``gamma`` lists real odd zeros left of the support (nearest first, so
    decreasing), ``xi`` the odd zeros in the gap (increasing, two cuts only),
    ``eta`` those right of the support (increasing).  ``complex_pairs`` holds
    one representative ``z`` with ``Im z >= 0`` per factor ``(x-z)(x-conj z)``;
    a real entry is a double zero.
    """

    endpoints: tuple
    gamma: tuple = ()
    xi: tuple = ()
    eta: tuple = ()
    complex_pairs: tuple = ()

    def __post_init__(self):
        # keep mpf inputs as they are: converting would round to the ambient precision
        a = tuple(_real(e) for e in self.endpoints)
        object.__setattr__(self, "endpoints", a)
        object.__setattr__(self, "gamma", tuple(_real(x) for x in self.gamma))
        object.__setattr__(self, "xi", tuple(_real(x) for x in self.xi))
        object.__setattr__(self, "eta", tuple(_real(x) for x in self.eta))
        object.__setattr__(self, "complex_pairs", tuple(
            z if isinstance(z, mpmath.mpc) else mpmath.mpc(_real(z), 0) if isinstance(z, mpf)
            else mpmath.mpc(z) for z in self.complex_pairs))
        if len(a) not in (2, 4) or not all(a[i] < a[i + 1] for i in range(len(a) - 1)):
            raise DomainError("endpoints must be 2 or 4 strictly increasing reals")
        chain = tuple(reversed(self.gamma)) + (a[0],)
        if len(a) == 4:
            chain += (a[1],) + self.xi + (a[2],)
        elif self.xi:
            raise DomainError("one-cut configurations have no gap zeros")
        chain += (a[-1],) + self.eta
        if not all(chain[i] < chain[i + 1] for i in range(len(chain) - 1)):
            raise DomainError("real zeros are not ordered relative to the support")
        if len(self.gamma) % 2 or len(self.eta) % 2:
            raise DomainError("the number of real odd zeros outside the support must be even")
        if len(a) == 4 and len(self.xi) % 2 == 0:
            raise DomainError("the number of gap zeros must be odd")
        for z in self.complex_pairs:
            if mpmath.im(z) < 0:
                raise DomainError("complex pairs are stored with Im z >= 0")
            if mpmath.im(z) == 0 and any(lo <= mpmath.re(z) <= hi for lo, hi in self.intervals):
                raise DomainError("double zero on the support")

    @property
    def cuts(self) -> int:
        return len(self.endpoints) // 2

    @property
    def intervals(self):
        a = self.endpoints
        return [(a[i], a[i + 1]) for i in range(0, len(a), 2)]

    @property
    def odd_count(self) -> int:
        return len(self.gamma) + len(self.xi) + len(self.eta)

    @property
    def degree(self) -> int:
        """Degree of the potential this configuration induces."""
        return self.odd_count + 2 * len(self.complex_pairs) + self.cuts + 1

    def h_monic(self) -> RealPoly:
        p = RealPoly.from_roots(self.gamma + self.xi + self.eta)
        for z in self.complex_pairs:
            p = p * RealPoly((abs(z) ** 2, -2 * mpmath.re(z), 1))
        return p

    def zero_split(self) -> ZeroSplit:
        return ZeroSplit(self.gamma, self.xi, self.eta, self.complex_pairs, ())

    def replace(self, **kw) -> "ZeroConfiguration":
        d = dict(endpoints=self.endpoints, gamma=self.gamma, xi=self.xi, eta=self.eta,
                 complex_pairs=self.complex_pairs)
        d.update(kw)
        return ZeroConfiguration(**d)

    @classmethod
    def from_measure(cls, measure) -> "ZeroConfiguration":
        """Configuration of a solved measure (zeros classified by ``split_zeros``)."""
        with measure.ctx.workprec():
            z = split_zeros(measure.h, measure.endpoints)
            if z.on_support:
                raise CertificateFailure("density polynomial vanishes on the support")
            return cls(measure.endpoints, z.gamma, z.xi, z.eta, z.complex_pairs)


def v0_configuration() -> ZeroConfiguration:
    """Support ``(-sqrt3, -1, 1, sqrt3)`` with one gap zero at 0 (at the current precision)."""
    r3 = mpmath.sqrt(3)
    return ZeroConfiguration((-r3, -1, 1, r3), xi=(0,))


def gaussian_configuration() -> ZeroConfiguration:
    return ZeroConfiguration((-2, 2))


@dataclass(frozen=True)
class PathSample:
    tau: object
    kind: str
    config: ZeroConfiguration
    potential: Potential
    certificate: object


@dataclass(frozen=True)
class DeformationPath:
    """Certified samples ordered by increasing ``tau``.

    A composite path (several merge steps and a basis segment) keeps the kind
    of every segment; ``kind`` is the segment touching the target.
    """

    kind: str
    samples: tuple
    segments: tuple = field(default=())

    def __len__(self):
        return len(self.samples)

    @property
    def target(self) -> PathSample:
        return self.samples[-1]


# ---------------------------------------------------------------------------
# measure -> potential


def _normalization(config: ZeroConfiguration, h: RealPoly, ctx: PrecisionCtx):
    a = config.endpoints
    total = mpf(0)
    for lo, hi in config.intervals:
        others = [e for e in a if e != lo and e != hi]

        def f(x, dlo, dhi, others=others):
            w = dlo * dhi
            for e in others:
                w *= abs(x - e)
            return mpmath.sqrt(w) * abs(h(x))

        total += integrate(f, lo, hi, "chebyshev_substituted", ctx).value
    return total


def measure_to_potential(config: ZeroConfiguration, ctx: PrecisionCtx | None = None,
                         *, method: str = "contour") -> Potential:
    """The polynomial field whose equilibrium measure is ``|R**(1/2) h| dx / c``.

    ``V'`` is ``2 pi / c`` times the polynomial part of ``R**(1/2) h`` at
    infinity.  ``method="contour"`` reads the Taylor coefficients off a circle
    enclosing the support; ``method="series"`` uses the binomial expansion of
    ``R**(1/2)`` and serves as a cross-check.  ``V(0) = 0``.
    """
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        h = config.h_monic()
        a = config.endpoints
        half = config.cuts
        top = h.degree + half
        if method == "series":
            lau = curve.laurent_of_product(h.coeffs, a, top + 1)
            poly = [lau[p] for p in range(top + 1)]
        elif method == "contour":
            rho = 2 * max(abs(e) for e in a) + 1
            poly = []
            for n in range(top + 1):
                val = contour_integral(
                    lambda z, n=n: curve.sqrt_R(z, a) * h(z) / z ** (n + 1),
                    0, rho, points=4 * (top + 8), ctx=ctx,
                ).value
                poly.append(mpmath.re(val / (2j * mpmath.pi)))
            # the top coefficient is exactly 1 for monic h
            poly[-1] = mpf(1)
        else:
            raise DomainError(f"unknown method {method!r}")
        c = _normalization(config, h, ctx)
        dV = RealPoly(tuple(2 * mpmath.pi / c * v for v in poly))
        return Potential.from_coeffs(dV.antiderivative().coeffs)


# ---------------------------------------------------------------------------
# gap balance


def _signed_gap_moments(config: ZeroConfiguration, skip: int, ctx: PrecisionCtx):
    """``int_{a2}^{a3} |R|**(1/2) g(x) x**k dx`` for k = 0, 1 where ``h = (x - xi_skip) g``."""
    a1, a2, a3, a4 = config.endpoints
    g = RealPoly.from_roots(config.gamma + config.xi[:skip] + config.xi[skip + 1:] + config.eta)
    for z in config.complex_pairs:
        g = g * RealPoly((abs(z) ** 2, -2 * mpmath.re(z), 1))
    out = []
    for k in (0, 1):
        def f(x, dlo, dhi, k=k):
            return mpmath.sqrt((x - a1) * dlo * dhi * (a4 - x)) * g(x) * x ** k
        out.append(integrate(f, a2, a3, "chebyshev_substituted", ctx).value)
    return out


def gap_balance(config: ZeroConfiguration, ctx: PrecisionCtx | None = None):
    """Alternating sum of the gap integrals between consecutive gap zeros."""
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        cert = regularity_certificate(config.h_monic(), config.endpoints, ctx, zeros=config.zero_split())
        return cert.hat_balance


def balance_root(config: ZeroConfiguration, index: int, ctx: PrecisionCtx | None = None, *,
                 lo=None, hi=None, scan: bool = True):
    """Position of gap zero ``index`` restoring the gap balance, others fixed.

    The signed gap integral is affine in the moving zero, so the root is a
    ratio of two integrals.  With ``scan`` the balance is sampled at 64
    points of ``(lo, hi)`` (default: between the neighbouring gap zeros) and
    exactly one sign change, bracketing the root, is required.

    Raises
    ------
    RootBracketError
        If the root falls outside ``(lo, hi)`` or the scan is ambiguous.
    """
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        a = config.endpoints
        xs = (a[1],) + config.xi + (a[2],)
        lo = xs[index] if lo is None else mpf(lo)
        hi = xs[index + 2] if hi is None else mpf(hi)
        i0, i1 = _signed_gap_moments(config, index, ctx)
        if i0 == 0:
            raise RootBracketError("gap balance does not depend on the moving zero")
        root = i1 / i0
        if not lo < root < hi:
            raise RootBracketError(
                f"balance root {mpmath.nstr(root, 10)} left ({mpmath.nstr(lo, 10)}, {mpmath.nstr(hi, 10)})"
            )
        if scan:
            _scan_unique(config, index, lo, hi, root, ctx)
        return root


def _scan_unique(config, index, lo, hi, root, ctx):
    """Sign scan of the alternating-sum balance (absolute-value form)."""
    xi = list(config.xi)
    signs = []
    grid = [lo + (hi - lo) * (k + mpf(1) / 2) / SCAN_POINTS for k in range(SCAN_POINTS)]
    low_ctx = PrecisionCtx(max(64, ctx.bits // 2))
    with low_ctx.workprec():
        for x in grid:
            xi[index] = x
            b = gap_balance(config.replace(xi=tuple(xi)), low_ctx)
            signs.append(mpmath.sign(b))
    changes = [k for k in range(len(signs) - 1) if signs[k] * signs[k + 1] < 0]
    if len(changes) != 1:
        raise RootBracketError(f"balance scan found {len(changes)} sign changes")
    k = changes[0]
    if not grid[k] <= root <= grid[k + 1]:
        raise RootBracketError("balance root is not bracketed by the sign scan")


# ---------------------------------------------------------------------------
# sampling


def _chebyshev_s(steps: int, s_lo):
    """``steps`` parameters in ``[s_lo, 1]``, clustered near ``s_lo``, decreasing."""
    if steps < 2:
        return [mpf(1)]
    out = []
    for i in range(steps):
        u = 1 - mpmath.cos(mpmath.pi * i / (2 * (steps - 1)))
        out.append(s_lo + (1 - s_lo) * u)
    return list(reversed(out))


def _sample(kind, s, config, ctx, tau=None):
    with ctx.workprec():
        V = measure_to_potential(config, ctx)
        cert = regularity_certificate(config.h_monic(), config.endpoints, ctx, zeros=config.zero_split())
        if not cert.verdict:
            raise CertificateFailure(f"{kind} sample at s={mpmath.nstr(s, 6)} is not regular")
        return PathSample(s if tau is None else tau, kind, config, V, cert)


def _escape(pairs, s):
    return tuple(z + mpmath.mpc(0, (1 - s) / s) for z in pairs)


def _lerp(x, y, s):
    return s * x + (1 - s) * y


def _one_cut_basis(cfg, steps, ctx):
    a, b = cfg.endpoints
    out = [_sample("one_cut_basis", mpf(0), gaussian_configuration(), ctx)]
    for s in reversed(_chebyshev_s(steps - 1, S_MIN)):
        c = cfg.replace(endpoints=(_lerp(a, -2, s), _lerp(b, 2, s)), complex_pairs=_escape(cfg.complex_pairs, s))
        out.append(_sample("one_cut_basis", s, c, ctx))
    return out


def _one_cut_merge(cfg, steps, ctx):
    """Slide the innermost outer zero onto its neighbour (right side first)."""
    side = "eta" if cfg.eta else "gamma"
    zs = getattr(cfg, side)
    out = []
    for s in _chebyshev_s(steps, mpf(0)):
        moved = _lerp(zs[0], zs[1], s)
        if s == 0:
            c = cfg.replace(**{side: zs[2:]}, complex_pairs=cfg.complex_pairs + (mpmath.mpc(zs[1]),))
        else:
            c = cfg.replace(**{side: (moved,) + zs[1:]})
        out.append(_sample("one_cut_merge", s, c, ctx))
    return list(reversed(out))


def _two_cut_basis(cfg, steps, ctx):
    a1, a2, a3, a4 = cfg.endpoints
    r3 = mpmath.sqrt(3)
    out = [_sample("two_cut_basis", mpf(0), v0_configuration(), ctx)]
    for s in reversed(_chebyshev_s(steps - 1, S_MIN)):
        ends = (_lerp(a1, -r3, s), _lerp(a2, -1, s), _lerp(a3, 1, s), _lerp(a4, r3, s))
        c = cfg.replace(endpoints=ends, xi=(cfg.xi[0] if s == 1 else (ends[1] + ends[2]) / 2,),
                        complex_pairs=_escape(cfg.complex_pairs, s))
        if s < 1:
            c = c.replace(xi=(balance_root(c, 0, ctx),))
        out.append(_sample("two_cut_basis", s, c, ctx))
    return out


def _case1_state(cfg, s, ctx):
    xi = list(cfg.xi)
    xi[0] = cfg.xi[0] + (1 - s)
    n = len(xi)
    trial = cfg.replace(xi=tuple(xi)) if xi[0] < xi[1] else None
    if trial is None:
        return None, None
    a = cfg.endpoints
    i0, i1 = _signed_gap_moments(trial, n - 1, ctx)
    root = i1 / i0
    xi[-1] = root
    ok = root < a[2] and xi[-2] < root
    return xi, ok


def _case1_gap(cfg, s, ctx):
    xi, ok = _case1_state(cfg, s, ctx)
    if xi is None:
        return mpf(-1)
    return min(xi[1] - xi[0], xi[-1] - xi[-2])


def _two_cut_case1(cfg, steps, ctx):
    """Push the first gap zero right at unit speed until two gap zeros meet."""
    # first collision: scan downward in s, then bisect on the gap function
    lo_s, hi_s = mpf(0), mpf(1)
    grid = [1 - mpf(k) / 64 for k in range(65)]
    prev = grid[0]
    for s in grid[1:]:
        if _case1_gap(cfg, s, ctx) <= 0:
            lo_s, hi_s = s, prev
            break
        prev = s
    else:
        raise RootBracketError("no gap-zero collision found on s in [0, 1]")
    for _ in range(int(ctx.bits * 0.6)):
        mid = (lo_s + hi_s) / 2
        if _case1_gap(cfg, mid, ctx) <= 0:
            lo_s = mid
        else:
            hi_s = mid
    s0 = hi_s
    xi0, _ = _case1_state(cfg, s0, ctx)
    # which pair met
    if xi0[1] - xi0[0] <= xi0[-1] - xi0[-2]:
        point, keep = (xi0[0] + xi0[1]) / 2, xi0[2:]
    else:
        point, keep = (xi0[-1] + xi0[-2]) / 2, xi0[:-2]
    end_cfg = cfg.replace(xi=tuple(keep), complex_pairs=cfg.complex_pairs + (mpmath.mpc(point),))
    out = [_sample("two_cut_merge_case1", s0, end_cfg, ctx)]
    prev_last = None
    for s in reversed(_chebyshev_s(steps - 1, s0)):
        if s == s0:
            continue
        xi, ok = _case1_state(cfg, s, ctx)
        if not ok:
            raise RootBracketError("compensating gap zero left its interval before the collision")
        if prev_last is not None and not xi[-1] > prev_last:
            raise CertificateFailure("compensating gap zero is not increasing in s")
        prev_last = xi[-1]
        out.append(_sample("two_cut_merge_case1", s, cfg.replace(xi=tuple(xi)), ctx))
    return out


def _two_cut_case2(cfg, steps, ctx):
    """Merge the innermost outer zero with its neighbour, rebalancing the gap zero."""
    side = "eta" if cfg.eta else "gamma"
    zs = getattr(cfg, side)
    out = []
    for s in _chebyshev_s(steps, mpf(0)):
        if s == 0:
            c = cfg.replace(**{side: zs[2:]}, complex_pairs=cfg.complex_pairs + (mpmath.mpc(zs[1]),))
        else:
            c = cfg.replace(**{side: (_lerp(zs[0], zs[1], s),) + zs[1:]})
        if s < 1:
            c = c.replace(xi=(balance_root(c, 0, ctx),))
        out.append(_sample("two_cut_merge_case2", s, c, ctx))
    return list(reversed(out))


def _compose(segments):
    """Concatenate segments (reference side first) on a common tau axis."""
    m = len(segments)
    samples = []
    for k, seg in enumerate(segments):
        ss = [p.tau for p in seg]
        lo, hi = min(ss), max(ss)
        for j, p in enumerate(seg):
            if k and j == 0:
                continue  # shared with the previous segment's last sample
            u = (p.tau - lo) / (hi - lo) if hi > lo else mpf(1)
            samples.append(PathSample((k + u) / m, p.kind, p.config, p.potential, p.certificate))
    kinds = tuple(seg[0].kind for seg in segments)
    return DeformationPath(kinds[-1], tuple(samples), kinds)


def _is_reference(cfg, ref, ctx):
    if cfg.cuts != ref.cuts or cfg.complex_pairs or cfg.gamma or cfg.eta or len(cfg.xi) != len(ref.xi):
        return False
    tol = ctx.tol_abs * 100
    return all(abs(x - y) < tol for x, y in zip(cfg.endpoints + cfg.xi, ref.endpoints + ref.xi))


def build_one_cut_path(target: ZeroConfiguration, steps: int = 20,
                       ctx: PrecisionCtx | None = None) -> DeformationPath:
    """Certified path from ``x**2/2`` to a one-cut regular target.

    Each merge removes two real odd zeros outside the support; the final basis
    segment sends the remaining complex pairs to infinity while the support
    relaxes to ``[-2, 2]``.

    Raises
    ------
    CertificateFailure
        If any sample fails the regularity test.
    """
    ctx = ctx or DEFAULT_CTX
    if target.cuts != 1:
        raise DomainError("one-cut path needs a one-cut configuration")
    with ctx.workprec():
        if _is_reference(target, gaussian_configuration(), ctx):
            return DeformationPath("one_cut_basis", (_sample("one_cut_basis", mpf(1), target, ctx),),
                                   ("one_cut_basis",))
        segments = []
        cfg = target
        while cfg.odd_count:
            seg = _one_cut_merge(cfg, steps, ctx)
            segments.append(seg)
            cfg = seg[0].config
        segments.append(_one_cut_basis(cfg, steps, ctx))
        return _compose(list(reversed(segments)))


def build_two_cut_path(target: ZeroConfiguration, steps: int = 20,
                       ctx: PrecisionCtx | None = None) -> DeformationPath:
    """Certified path from ``x**4 - 4x**2`` to a two-cut regular target.

    Merge steps reduce the real odd zeros to a single gap zero (moving one gap
    zero at unit speed while another restores the balance, or merging outer
    zeros while the lone gap zero rebalances).  The basis segment then moves
    the endpoints to ``(-sqrt3, -1, 1, sqrt3)`` and the complex pairs to
    infinity, with the gap zero rebalanced at each sample.  The basis segment
    holds ``steps`` samples, including the analytic ``s = 0`` limit.

    Raises
    ------
    CertificateFailure, RootBracketError
    """
    ctx = ctx or DEFAULT_CTX
    if target.cuts != 2:
        raise DomainError("two-cut path needs a two-cut configuration")
    with ctx.workprec():
        if _is_reference(target, v0_configuration(), ctx):
            return DeformationPath("two_cut_basis", (_sample("two_cut_basis", mpf(1), target, ctx),),
                                   ("two_cut_basis",))
        segments = []
        cfg = target
        while cfg.odd_count > 1:
            seg = _two_cut_case1(cfg, steps, ctx) if len(cfg.xi) > 1 else _two_cut_case2(cfg, steps, ctx)
            segments.append(seg)
            cfg = seg[0].config
        segments.append(_two_cut_basis(cfg, steps, ctx))
        return _compose(list(reversed(segments)))


def continuation_seeds(path: DeformationPath):
    """Endpoint tuples along the path in increasing ``tau``."""
    return [p.config.endpoints for p in path.samples]


# ---------------------------------------------------------------------------
# homotopy from the reference quartic


def solve_by_continuation(V: Potential, ctx: PrecisionCtx | None = None, steps: int = 8,
                          min_step=mpf(1) / 1024) -> TwoCutMeasure:
    """Two-cut measure of ``V`` by walking ``x**4 - 4x**2 + tau (V - x**4 + 4x**2)``.

    Each solve is seeded by the previous endpoints (linearly extrapolated);
    failed steps are halved.

    Raises
    ------
    DivergedNewton
        When the step falls below ``min_step``.
    CollidedEndpoints
        When the homotopy leaves the two-cut region.
    """
    ctx = ctx or DEFAULT_CTX
    with ctx.workprec():
        base = Potential.quartic_plus_t().poly.coeffs
        target = V.poly.coeffs
        n = max(len(base), len(target))
        base = list(base) + [mpf(0)] * (n - len(base))
        target = list(target) + [mpf(0)] * (n - len(target))

        def field_at(tau):
            if tau == 1:
                return V
            return Potential.from_coeffs([b + tau * (t - b) for b, t in zip(base, target)])

        try:
            return solve_endpoints_twocut(V, v0_configuration().endpoints, ctx)
        except (DivergedNewton, CollidedEndpoints):
            pass
        tau, step = mpf(0), mpf(1) / steps
        ends, prev = v0_configuration().endpoints, None
        m = None
        while tau < 1:
            nxt = min(mpf(1), tau + step)
            seed = ends
            if prev is not None:
                seed = tuple(e + (e - p) * (nxt - tau) / step for e, p in zip(ends, prev))
                if not all(seed[i] < seed[i + 1] for i in range(3)):
                    seed = ends
            try:
                m = solve_endpoints_twocut(field_at(nxt), seed, ctx)
            except (DivergedNewton, CollidedEndpoints, NonConvergence, DomainError):
                step /= 2
                prev = None
                if step < min_step:
                    raise DivergedNewton(f"continuation stalled at tau = {mpmath.nstr(tau, 6)}")
                continue
            prev, ends, tau = ends, m.endpoints, nxt
        return m
