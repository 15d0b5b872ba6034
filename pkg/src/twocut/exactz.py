"""Finite-N partition functions from orthogonal polynomials.

For a weight ``w(x) = x**alpha * exp(-n V(x))`` on the line or half line,

    Z_N = N! * det[mu_{i+j}]_{i,j<N} = N! * prod_{n<N} h_n,   h_n = kappa_n**-2,

where ``mu_k`` are the moments and ``h_n`` the squared norms of the monic
orthogonal polynomials.  Two independent routes compute the ``h_n``:

* Hankel: LDL^T pivots of the moment matrix (primary);
* Stieltjes: the discretized Stieltjes procedure run directly on the
  quadrature nodes (cross-check).

Both start from the same discretization of the weight on a window outside of
which the integrand drops below ``2**(-2*bits)``: a nested trapezoidal rule
for line weights, panel Gauss-Legendre in ``u = sqrt(x)`` on the half line.  Moments are taken in a centred and scaled variable
``y = (x - c)/s`` to keep the Hankel matrix reasonably conditioned; the
Jacobian factors are restored exactly when the logs are assembled.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import mpmath
from mpmath import mpf

from .equilibrium import Potential
from .errors import DomainError, NonConvergence, PrecisionExhausted
from .mpnum import PrecisionCtx, RealPoly, gauss_legendre_rule, tanh_sinh_rule

__all__ = [
    "EXACT_CTX",
    "DEFAULT_MAX_N",
    "Weight",
    "DiscreteMeasure",
    "HankelLadder",
    "ExactLog",
    "line_weight",
    "half_line_weight",
    "discretize",
    "moments",
    "hankel_ladder",
    "exact_log_Z",
    "exact_log_Z_half",
    "log_Z_t_derivative",
    "log_Z_half_alpha_derivative",
    "parity_factorization",
    "op_identity_check",
]

EXACT_CTX = PrecisionCtx(512)
DEFAULT_MAX_N = 48
_GUARD = 32
_PANEL_LEVEL = 5  # 48 Gauss-Legendre nodes per panel
_ASYMPTOTIC_RATE = mpmath.ldexp(1, -80)


@dataclass(frozen=True)
class Weight:
    """``x**alpha * exp(-n_scale * V(x))`` on the line or on ``[0, inf)``."""

    poly: RealPoly
    n_scale: object
    half_line: bool = False
    alpha: object = 0

    @property
    def symmetric(self) -> bool:
        return not self.half_line and all(c == 0 for c in self.poly.coeffs[1::2])

    @property
    def singular_origin(self) -> bool:
        # x = u**2 turns x**alpha dx into 2 u**(2 alpha + 1) du
        beta = 2 * mpf(self.alpha) + 1
        return self.half_line and beta != int(beta)


def line_weight(V: Potential, N) -> Weight:
    """Weight ``exp(-N V)`` of the N-point ensemble on the real line."""
    if V.half_line:
        return half_line_weight(V.alpha, V.param("r"), V.param("sigma"), N)
    return Weight(V.poly, mpf(N))


def half_line_weight(alpha, r, sigma, N, strict: bool = True) -> Weight:
    """``x**alpha exp(-(2N/sigma)(x**2 - r x))`` on ``[0, inf)``.

    ``strict`` restricts ``alpha`` to [-1/2, 1/2]; otherwise any ``alpha > -1``
    (integrable) is accepted, which finite differences in ``alpha`` need.
    """
    alpha = mpf(alpha)
    if strict and not -0.5 <= alpha <= 0.5:
        raise DomainError("alpha must lie in [-1/2, 1/2]")
    if not alpha > -1:
        raise DomainError("alpha must exceed -1")
    r, sigma = mpf(r), mpf(sigma)
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    return Weight(RealPoly((0, -2 * r / sigma, 2 / sigma)), mpf(N), True, alpha)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Quadrature image of a weight in the variable ``y = (x - shift)/scale``.

    ``sum_i weights[i] * f(nodes[i])`` approximates
    ``exp(-log_factor) / scale * integral f((x - shift)/scale) w(x) dx``.
    """

    nodes: tuple
    weights: tuple
    shift: object
    scale: object
    log_factor: object
    panels: int


def _real_minimum(poly: RealPoly, lo=None):
    crit = [mpmath.re(z) for z in poly.derivative().roots() if abs(mpmath.im(z)) < mpf(10) ** -20]
    if lo is not None:
        crit = [x for x in crit if x >= lo] + [mpf(lo)]
    vals = [(poly(x), x) for x in crit]
    return min(vals)


def _window_edge(excess, start, direction, threshold):
    """First x beyond ``start`` (in ``direction``) with ``excess(x) > threshold``."""
    step = mpf(1) / 4
    inner = start
    x = start + direction * step
    while excess(x) <= threshold:
        inner = x
        step *= 2
        x = start + direction * step
    for _ in range(60):
        mid = (inner + x) / 2
        if excess(mid) > threshold:
            x = mid
        else:
            inner = mid
    return x


def _window(weight: Weight, count: int, bits: int):
    """Truncation window ``[lo, hi]`` in x and the minimum of V on it."""
    n = weight.n_scale
    vmin, xmin = _real_minimum(weight.poly, 0 if weight.half_line else None)
    threshold = 2 * bits * mpmath.ln2 + 40

    def excess(x):
        return n * (weight.poly(x) - vmin) - count * mpmath.log(2 + abs(x))

    hi = _window_edge(excess, max(xmin, 0) if weight.symmetric else xmin, 1, threshold)
    if weight.symmetric:
        lo = -hi
    elif weight.half_line:
        lo = mpf(0)
        if excess(0) > threshold:
            lo = -_window_edge(lambda x: excess(-x), -xmin, 1, threshold)
    else:
        lo = -_window_edge(lambda x: excess(-x), -xmin, 1, threshold)
    return lo, hi, vmin


def _build(weight: Weight, lo, hi, vmin, panels: int, level: int, bits: int, coarser=None) -> DiscreteMeasure:
    n = weight.n_scale
    shift = (lo + hi) / 2 if not weight.symmetric else mpf(0)
    scale = (hi - lo) / 2
    gl = gauss_legendre_rule(level, PrecisionCtx(bits))
    nodes, weights = [], []
    if weight.half_line and lo == 0:
        # x = u**2 on [0, sqrt(hi)]; x**alpha dx = 2 u**(2 alpha + 1) du.  A
        # non-integer power at u = 0 gets one tanh-sinh segment over the first
        # quarter so the Gauss panels never sit next to the branch point.
        beta = 2 * weight.alpha + 1
        U = mpmath.sqrt(hi)
        start = mpf(0)
        pts = []
        if weight.singular_origin:
            start = U / 4
            ts = tanh_sinh_rule(level + 2, PrecisionCtx(bits))
            pts += [(start * t, start * w) for t, w in zip(ts.nodes, ts.weights)]
        width = (U - start) / panels
        for p in range(panels):
            mid = start + (p + mpf(1) / 2) * width
            pts += [(mid + width / 2 * t, width / 2 * w) for t, w in zip(gl.nodes, gl.weights)]
        for u, w in pts:
            x = u * u
            lw = -n * (weight.poly(x) - vmin)
            nodes.append((x - shift) / scale)
            weights.append(2 * w * u ** beta * mpmath.exp(lw) / scale)
    else:
        # exp(-n V) is entire and negligible at both window ends, where the
        # trapezoidal rule converges geometrically in 1/width; levels nest, so
        # a doubling only evaluates the new midpoints
        width = (hi - lo) / panels
        if coarser is not None and coarser.panels * 2 == panels:
            old = iter(zip(coarser.nodes, coarser.weights))
            fresh = range(1, panels, 2)
        else:
            old = None
            fresh = range(panels + 1)
        new = {}
        for j in fresh:
            x = lo + j * width
            lw = -n * (weight.poly(x) - vmin)
            new[j] = ((x - shift) / scale, width * mpmath.exp(lw) / scale)
        for j in range(panels + 1):
            if j in new:
                y, w = new[j]
            else:
                y, w = next(old)
                w = w / 2
            if j in (0, panels):
                w = w / 2 if old is None else w
            nodes.append(y)
            weights.append(w)
    return DiscreteMeasure(tuple(nodes), tuple(weights), shift, scale, -n * vmin, panels)


def _fixed_moments(dm: DiscreteMeasure, count: int, bits: int):
    """``sum_i w_i y_i**k`` for k < count in fixed-point integer arithmetic.

    All nodes lie in [-1, 1] and all weights are below the largest one, so a
    common binary point keeps every partial product's absolute error at
    ``2**-bits`` times the largest weight.
    """
    wmax = max(dm.weights)
    one = 1 << bits
    acc = [0] * count
    for y, w in zip(dm.nodes, dm.weights):
        Y = int(mpmath.nint(mpmath.ldexp(y, bits)))
        p = int(mpmath.nint(mpmath.ldexp(w / wmax, bits)))
        if p == 0:
            continue
        for k in range(count):
            acc[k] += p
            p = (p * Y) >> bits
    return [mpmath.ldexp(a, -bits) * wmax for a in acc]


def _moment_vector(dm, count, bits, symmetric):
    m = _fixed_moments(dm, count, bits)
    if symmetric:
        m = [v if k % 2 == 0 else mpf(0) for k, v in enumerate(m)]
    return m


@functools.lru_cache(maxsize=256)
def _converged_measure(weight: Weight, count: int, bits: int):
    """Discretize with panel doubling until the scaled moments stabilize."""
    with mpmath.workprec(bits):
        lo, hi, vmin = _window(weight, count, bits)
        panels = 4 + int(mpmath.ceil(mpmath.sqrt(weight.n_scale) * (hi - lo) / 4))
        if not weight.half_line:
            panels *= 8
        prev = None
        last_diff = None
        target = mpmath.ldexp(1, -(bits - _GUARD // 2))
        for _ in range(8):
            dm = _build(weight, lo, hi, vmin, panels, _PANEL_LEVEL, bits, prev[0] if prev else None)
            mom = _moment_vector(dm, count, bits, weight.symmetric)
            if prev is not None:
                diff = max(abs(a - b) for a, b in zip(mom, prev[1])) / mom[0]
                if diff < target:
                    return prev[0], prev[1], diff
                # both rules converge at least like panels**-96 (composite
                # Gauss-Legendre) or geometrically (trapezoid); once two successive
                # changes show such a rate the finer level's error is at most
                # about diff * (diff / last_diff)
                if last_diff is not None and diff < last_diff * _ASYMPTOTIC_RATE:
                    est = diff * diff / last_diff
                    if est < target:
                        return dm, mom, est
                last_diff = diff
            prev = (dm, mom)
            panels *= 2
        raise NonConvergence("moment quadrature did not converge under panel doubling")


def discretize(weight: Weight, count: int, ctx: PrecisionCtx | None = None) -> DiscreteMeasure:
    ctx = ctx or EXACT_CTX
    return _converged_measure(weight, count, ctx.bits + _GUARD)[0]


def moments(weight: Weight, count: int, ctx: PrecisionCtx | None = None):
    """Moments ``integral x**k w(x) dx`` for ``k < count``.

    Odd moments of symmetric weights are set to zero exactly.
    """
    ctx = ctx or EXACT_CTX
    bits = ctx.bits + _GUARD
    dm, scaled, _ = _converged_measure(weight, count, bits)
    with mpmath.workprec(bits):
        c, s = dm.shift, dm.scale
        factor = s * mpmath.exp(dm.log_factor)
        out = []
        for k in range(count):
            # x**k = sum_j binom(k, j) c**(k-j) s**j y**j
            acc = mpmath.fsum(mpmath.binomial(k, j) * c ** (k - j) * s ** j * scaled[j] for j in range(k + 1))
            out.append(acc * factor)
        if weight.symmetric:
            out = [v if k % 2 == 0 else mpf(0) for k, v in enumerate(out)]
    with ctx.workprec():
        return tuple(+v for v in out)


def _ldl_pivots(m, size):
    """Pivots of the LDL^T factorization of the Hankel matrix ``[m_{i+j}]``."""
    L = [[mpf(0)] * size for _ in range(size)]
    d = []
    for j in range(size):
        v = m[2 * j] - mpmath.fsum(L[j][k] ** 2 * d[k] for k in range(j))
        if not v > 0:
            raise PrecisionExhausted(f"Hankel pivot {j} lost positivity; raise the precision")
        d.append(v)
        for i in range(j + 1, size):
            L[i][j] = (m[i + j] - mpmath.fsum(L[i][k] * L[j][k] * d[k] for k in range(j))) / v
    return d


def _stieltjes(dm: DiscreteMeasure, size: int, symmetric: bool):
    """Monic recurrence ``p_{n+1} = (y - a_n) p_n - b_n p_{n-1}`` and norms on the nodes."""
    ys, ws = dm.nodes, dm.weights
    prev = [mpf(0)] * len(ys)
    cur = [mpf(1)] * len(ys)
    a, b, h = [], [], []
    h_prev = None
    for n in range(size):
        sq = [w * p * p for w, p in zip(ws, cur)]
        hn = mpmath.fsum(sq)
        if not hn > 0:
            raise PrecisionExhausted(f"Stieltjes norm {n} lost positivity")
        an = mpf(0) if symmetric else mpmath.fsum(q * y for q, y in zip(sq, ys)) / hn
        bn = hn / h_prev if h_prev is not None else mpf(0)
        a.append(an)
        b.append(bn)
        h.append(hn)
        prev, cur = cur, [(y - an) * p - bn * q for y, p, q in zip(ys, cur, prev)]
        h_prev = hn
    return a, b, h


@dataclass(frozen=True)
class HankelLadder:
    """Moments, Hankel determinants and recurrence data of one weight.

    ``log_hankel[n] = log D_n`` for the n x n moment determinant (``D_0 = 1``);
    ``kappa[n]`` are the leading coefficients of the orthonormal polynomials,
    ``rec_a``/``rec_b`` the monic three-term recurrence in the x variable, all
    from the Hankel route except ``rec_a``/``rec_b`` and ``log_norms_stieltjes``
    which come from the Stieltjes procedure.
    """

    weight: Weight
    size: int
    moments: tuple
    log_hankel: tuple
    kappa: tuple
    rec_a: tuple
    rec_b: tuple
    log_norms_hankel: tuple
    log_norms_stieltjes: tuple
    quadrature_error: object
    ctx: PrecisionCtx = field(repr=False, default=EXACT_CTX)

    def subleading(self, n: int):
        """``(c_n, d_n)`` with ``p_n = x**n + c_n x**(n-1) + d_n x**(n-2) + ...`` (monic)."""
        a, b = self.rec_a, self.rec_b
        c = -mpmath.fsum(a[:n])
        d = mpmath.fsum(a[i] * a[j] for i in range(n) for j in range(i + 1, n)) - mpmath.fsum(b[1:n])
        return c, d

    def orthonormal(self, x, n_max: int | None = None):
        """Values ``P_0(x) .. P_{n_max}(x)`` of the orthonormal polynomials."""
        n_max = self.size - 1 if n_max is None else n_max
        with self.ctx.workprec():
            out = [self.kappa[0]]
            prev, cur = mpf(0), mpf(1)
            for n in range(n_max):
                prev, cur = cur, (x - self.rec_a[n]) * cur - self.rec_b[n] * prev
                out.append(cur * self.kappa[n + 1])
            return out

    def gram_residual(self, n_max: int | None = None):
        """Largest deviation of the orthonormal Gram matrix from the identity on a finer grid."""
        n_max = self.size - 1 if n_max is None else n_max
        bits = self.ctx.bits + _GUARD
        count = 2 * self.size + 1
        dm = _converged_measure(self.weight, count, bits)[0]
        with mpmath.workprec(bits):
            fine = _build(self.weight, *_window(self.weight, count, bits), dm.panels * 2, _PANEL_LEVEL, bits)
            factor = fine.scale * mpmath.exp(fine.log_factor)
            worst = mpf(0)
            vals = [self.orthonormal(fine.shift + fine.scale * y, n_max) for y in fine.nodes]
            for i in range(n_max + 1):
                for j in range(i, n_max + 1):
                    g = factor * mpmath.fsum(w * v[i] * v[j] for w, v in zip(fine.weights, vals))
                    worst = max(worst, abs(g - (1 if i == j else 0)))
            return worst


def hankel_ladder(weight: Weight, size: int, ctx: PrecisionCtx | None = None) -> HankelLadder:
    """Hankel and Stieltjes data for the first ``size`` orthogonal polynomials."""
    ctx = ctx or EXACT_CTX
    bits = ctx.bits + _GUARD
    dm, scaled, qerr = _converged_measure(weight, 2 * size + 1, bits)
    with mpmath.workprec(bits):
        s, lf = dm.scale, dm.log_factor
        log_s = mpmath.log(s)
        piv = _ldl_pivots(scaled, size + 1)
        a_y, b_y, h_y = _stieltjes(dm, size + 1, weight.symmetric)
        # h_n(x) = s**(2n+1) e**lf h_n(y); the scaled weights already hold 1/s
        log_norm_h = [mpmath.log(p) + (2 * n + 1) * log_s + lf for n, p in enumerate(piv)]
        log_norm_s = [mpmath.log(p) + (2 * n + 1) * log_s + lf for n, p in enumerate(h_y)]
        log_D = [mpf(0)]
        for v in log_norm_h[:size]:
            log_D.append(log_D[-1] + v)
        kappa = [mpmath.exp(-v / 2) for v in log_norm_h]
        rec_a = [dm.shift + s * v for v in a_y]
        rec_b = [s * s * v for v in b_y]
    with ctx.workprec():
        return HankelLadder(
            weight,
            size,
            moments(weight, 2 * size + 1, ctx),
            tuple(+v for v in log_D),
            tuple(+v for v in kappa),
            tuple(+v for v in rec_a),
            tuple(+v for v in rec_b),
            tuple(+v for v in log_norm_h),
            tuple(+v for v in log_norm_s),
            +qerr,
            ctx,
        )


@dataclass(frozen=True)
class ExactLog:
    """``log Z`` with the precision it was computed at and an error bound.

    ``stieltjes`` holds the cross-check value from the second route.
    """

    N: int
    log_Z: object
    precision_used: int
    error_bound: object
    stieltjes: object = None


def _assemble(weight, N, ctx, with_factorial: bool) -> ExactLog:
    lad = hankel_ladder(weight, N, ctx)
    bits = ctx.bits + _GUARD
    with mpmath.workprec(bits):
        lf = mpmath.loggamma(N + 1) if with_factorial else mpf(0)
        lz_h = lf + mpmath.fsum(lad.log_norms_hankel[:N])
        lz_s = lf + mpmath.fsum(lad.log_norms_stieltjes[:N])
        gap = abs(lz_h - lz_s)
        floor = mpmath.ldexp(1, -ctx.bits) * max(1, abs(lz_h))
        # the relative moment error propagates through N^2-scaled condition growth
        err = gap + floor
        if gap > mpmath.ldexp(1, -ctx.bits // 4) * max(1, abs(lz_h)):
            raise PrecisionExhausted(
                f"Hankel and Stieltjes routes disagree by {mpmath.nstr(gap, 3)} at N={N}; raise the precision"
            )
    with ctx.workprec():
        return ExactLog(N, +lz_h, ctx.bits, +err, +lz_s)


def exact_log_Z(V: Potential, N: int, ctx: PrecisionCtx | None = None, max_n: int = DEFAULT_MAX_N) -> ExactLog:
    """``log Z_N(V)`` for the N-fold integral with weight ``exp(-N V)``.

    Raises
    ------
    DomainError
        If ``N`` is outside ``1..max_n``.
    PrecisionExhausted
        If a Hankel pivot loses positivity or the two routes disagree.
    """
    ctx = ctx or EXACT_CTX
    if not 1 <= N <= max_n:
        raise DomainError(f"N must lie in 1..{max_n}, got {N}")
    if V.half_line:
        return exact_log_Z_half(V.alpha, V.param("r"), V.param("sigma"), N, ctx, max_n)
    return _assemble(line_weight(V, N), N, ctx, True)


def exact_log_Z_half(alpha, r, sigma, N: int, ctx: PrecisionCtx | None = None, max_n: int = DEFAULT_MAX_N) -> ExactLog:
    """``log`` of ``(1/N!) * integral over [0, inf)^N`` of
    ``prod (x_i - x_j)**2 prod x**alpha exp(-(2N/sigma)(x**2 - r x))``."""
    ctx = ctx or EXACT_CTX
    if not 1 <= N <= max_n:
        raise DomainError(f"N must lie in 1..{max_n}, got {N}")
    return _assemble(half_line_weight(alpha, r, sigma, N), N, ctx, False)


def log_Z_half_alpha_derivative(alpha, r, sigma, N: int, ctx: PrecisionCtx | None = None, step=None):
    """Central difference ``d/dalpha log Zh_N(alpha; r, sigma)``.

    The default step ``2**(-bits/5)`` leaves a truncation error far below the
    rounding error of the two partition functions.
    """
    ctx = ctx or EXACT_CTX
    with ctx.workprec():
        alpha = mpf(alpha)
        step = mpmath.ldexp(1, -ctx.bits // 5) if step is None else mpf(step)
        up = _assemble(half_line_weight(alpha + step, r, sigma, N, strict=False), N, ctx, False).log_Z
        dn = _assemble(half_line_weight(alpha - step, r, sigma, N, strict=False), N, ctx, False).log_Z
        return (up - dn) / (2 * step)


def log_Z_t_derivative(V: Potential, N: int, k: int, ctx: PrecisionCtx | None = None):
    """Exact ``d/dt log Z_N(V + t x**k)`` at ``t = 0``.

    Equals ``-N * E[sum_i x_i**k] = -N * trace((J**k)[:N, :N])`` with ``J`` the
    Jacobi matrix of the orthonormal recurrence, which needs ``N + k//2``
    recurrence steps.
    """
    ctx = ctx or EXACT_CTX
    size = N + k // 2 + 1
    lad = hankel_ladder(line_weight(V, N), size, ctx)
    with mpmath.workprec(ctx.bits + _GUARD):
        J = mpmath.zeros(size, size)
        for n in range(size):
            J[n, n] = lad.rec_a[n]
            if n + 1 < size:
                off = mpmath.sqrt(lad.rec_b[n + 1])
                J[n, n + 1] = J[n + 1, n] = off
        Jk = J ** k
        tr = mpmath.fsum(Jk[n, n] for n in range(N))
    with ctx.workprec():
        return -N * tr


def parity_factorization(r, s, N: int, ctx: PrecisionCtx | None = None) -> dict:
    """Residuals of the even/odd splitting of the symmetric quartic partition function.

    ``log Z_{2N} = log (2N)! + log Zh_N(-1/2; r, s) + log Zh_N(1/2; r, s)`` and
    ``log Z_{2N+1} = log (2N+1)! + log Zh_{N+1}(-1/2; r, s_+) + log Zh_N(1/2; r, s_-)``
    with ``s_pm = s (1 pm 1/(2N+1))``.  Each side is computed from its own
    moment ladder (line weight versus half-line weights).
    """
    ctx = ctx or EXACT_CTX
    with ctx.workprec():
        r, s = mpf(r), mpf(s)
        V = Potential.quartic_sym(r, s)
        if N == 0:
            even_lhs = even_rhs = mpf(0)
        else:
            even_lhs = exact_log_Z(V, 2 * N, ctx).log_Z
            even_rhs = (
                mpmath.loggamma(2 * N + 1)
                + exact_log_Z_half(-mpf(1) / 2, r, s, N, ctx).log_Z
                + exact_log_Z_half(mpf(1) / 2, r, s, N, ctx).log_Z
            )
        sp = s * (1 + mpf(1) / (2 * N + 1))
        sm = s * (1 - mpf(1) / (2 * N + 1))
        odd_lhs = exact_log_Z(V, 2 * N + 1, ctx).log_Z
        odd_rhs = mpmath.loggamma(2 * N + 2) + exact_log_Z_half(-mpf(1) / 2, r, sp, N + 1, ctx).log_Z
        if N > 0:
            odd_rhs += exact_log_Z_half(mpf(1) / 2, r, sm, N, ctx).log_Z
        return {
            "N": N,
            "even_lhs": even_lhs,
            "even_rhs": even_rhs,
            "even_residual": abs(even_lhs - even_rhs),
            "odd_lhs": odd_lhs,
            "odd_rhs": odd_rhs,
            "odd_residual": abs(odd_lhs - odd_rhs),
        }


def op_identity_check(r, s, N: int, ctx: PrecisionCtx | None = None, n_max: int | None = None, points=None) -> dict:
    """Compare the line orthonormal polynomials for ``exp(-2N V_{r,s})`` with the
    half-line families for ``alpha = -1/2, 1/2``:

        P_{2n}(u) = p_n(u**2; -1/2),   P_{2n+1}(u) = u p_n(u**2; 1/2),

    together with the leading-coefficient relations between the two.
    """
    ctx = ctx or EXACT_CTX
    n_max = N - 1 if n_max is None else n_max
    with ctx.workprec():
        r, s = mpf(r), mpf(s)
        line = hankel_ladder(line_weight(Potential.quartic_sym(r, s), 2 * N), 2 * n_max + 2, ctx)
        even = hankel_ladder(half_line_weight(-mpf(1) / 2, r, s, N), n_max + 1, ctx)
        odd = hankel_ladder(half_line_weight(mpf(1) / 2, r, s, N), n_max + 1, ctx)
        if points is None:
            points = [mpf(k) / 4 - mpf(9) / 8 for k in range(10)]
        poly_res = mpf(0)
        for u in points:
            P = line.orthonormal(u, 2 * n_max + 1)
            pe = even.orthonormal(u * u, n_max)
            po = odd.orthonormal(u * u, n_max)
            for n in range(n_max + 1):
                poly_res = max(poly_res, abs(P[2 * n] - pe[n]) / max(1, abs(pe[n])))
                poly_res = max(poly_res, abs(P[2 * n + 1] - u * po[n]) / max(1, abs(u * po[n])))
        kappa_res = mpf(0)
        for n in range(n_max + 1):
            kappa_res = max(kappa_res, abs(line.kappa[2 * n] / even.kappa[n] - 1))
            kappa_res = max(kappa_res, abs(line.kappa[2 * n + 1] / odd.kappa[n] - 1))
        return {"N": N, "n_max": n_max, "poly_residual": poly_res, "kappa_residual": kappa_res,
                "max_residual": max(poly_res, kappa_res)}
