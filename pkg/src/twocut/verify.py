"""Verification suites: numeric identities checked against independent routes.

Every suite returns a list of :class:`Check` records (residual, threshold).
The CLI ``verify`` command and the acceptance tests drive these.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .deform import ZeroConfiguration, build_two_cut_path, measure_to_potential, solve_by_continuation
from .equilibrium import Potential, solve_endpoints_twocut
from .exactz import EXACT_CTX, parity_factorization
from .mpnum import PrecisionCtx
from .special import ThetaParams, elliptic_K, modular_check, theta, theta_derivs
from .surface import periods, surface_data, v_hat_eval, vandermonde, time_derivatives

__all__ = ["Check", "SUITES", "run_suite", "theta_suite", "surface_suite", "derivatives_suite",
           "proposition21_suite", "deform_suite", "DEGREE6_TARGET"]

ASYM_ENDS = (mpf("-2"), mpf("-0.8"), mpf("1.1"), mpf("2.3"))
# degree-6 two-cut field used by the deformation suite
DEGREE6_TARGET = (0, 0, -4, mpf("0.05"), 1, 0, mpf("0.02"))


@dataclass(frozen=True)
class Check:
    name: str
    value: object
    threshold: object

    @property
    def passed(self) -> bool:
        v = mpmath.mpmathify(self.value)
        return bool(mpmath.isfinite(v) and abs(v) < self.threshold)


def _v0_ends():
    r3 = mpmath.sqrt(3)
    return (-r3, mpf(-1), mpf(1), r3)


def _rel(a, b):
    return abs(a - b) / max(abs(b), mpf(10) ** -30)


def _fd4(f, x, h):
    """Fourth-order central first derivative."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


# ---------------------------------------------------------------------------


def theta_suite(ctx: PrecisionCtx | None = None):
    """Heat equation, quasi-periodicity, K-theta relations and the modular map."""
    ctx = ctx or PrecisionCtx(128)
    out = []
    with ctx.workprec():
        h = mpf("1e-5")
        worst = mpf(0)
        for bi in (mpf("0.6"), mpf("0.8"), mpf(1), mpf("1.3"), mpf("1.7")):
            for z in (mpf(0), mpf("0.13"), mpf("0.25"), mpf("0.4"), mpf("0.5")):
                tzz = theta_derivs(z, ThetaParams(mpmath.mpc(0, bi), ctx=ctx), 2)

                def tb(b, z=z):
                    return theta(z, ThetaParams(mpmath.mpc(0, b), ctx=ctx))

                # dB = i d(Im B) on the imaginary axis
                dB = _fd4(tb, bi, h) / 1j
                worst = max(worst, abs(tzz - 4j * mpmath.pi * dB) / abs(tzz))
        out.append(Check("heat_equation", worst, mpf("1e-10")))

        B = mpmath.mpc("0.2", "0.9")
        p = ThetaParams(B, ctx=ctx)
        z = mpmath.mpc("0.3", "0.1")
        out.append(Check("period_1", _rel(theta(z + 1, p), theta(z, p)), mpf("1e-30")))
        quasi = mpmath.exp(-1j * mpmath.pi * B - 2j * mpmath.pi * z) * theta(z, p)
        out.append(Check("period_B", _rel(theta(z + B, p), quasi), mpf("1e-30")))

        for k in ("0.2", "0.5", "0.8"):
            k = mpf(k)
            K = elliptic_K(k, ctx)
            Kp = elliptic_K(mpmath.sqrt(1 - k * k), ctx)
            Bk = mpmath.mpc(0, Kp / K)
            pk = ThetaParams(Bk, ctx=ctx)
            t0 = mpmath.re(theta(0, pk))
            out.append(Check(f"K_theta_k{mpmath.nstr(k, 2)}", _rel(mpmath.pi / 2 * t0 ** 2, K), mpf("1e-12")))
            half = mpmath.log(mpmath.re(theta(mpf(1) / 2, pk))) - mpmath.log(t0)
            out.append(Check(f"half_shift_k{mpmath.nstr(k, 2)}", abs(half - mpmath.log(1 - k * k) / 4), mpf("1e-12")))
            out.append(Check(f"K_vs_mpmath_k{mpmath.nstr(k, 2)}", _rel(K, mpmath.ellipk(k * k)), mpf("1e-30")))
        m = modular_check(ThetaParams(mpmath.mpc(0, "0.7"), ctx=ctx), shift=mpf("0.3"))
        out.append(Check("modular", m["theta_residual"], mpf("1e-30")))
    return out


def _log_A12_D3(a, ctx):
    A, _ = periods(a, ctx)
    return 12 * mpmath.log(abs(A)) + 3 * mpmath.log(abs(vandermonde(a)))


def surface_suite(ctx: PrecisionCtx | None = None):
    """Korotkin identity by finite differences, period cross-checks, Rauch formula."""
    ctx = ctx or PrecisionCtx(128)
    out = []
    with ctx.workprec():
        for tag, ends in (("sym", _v0_ends()), ("asym", ASYM_ENDS)):
            ends = tuple(mpf(e) for e in ends)
            S = surface_data(ends, ctx)
            h = mpf("1e-6")
            for j in range(4):
                def f(x, j=j):
                    a = list(ends)
                    a[j] = x
                    return _log_A12_D3(a, ctx)

                fd = (f(ends[j] + h) - f(ends[j] - h)) / (2 * h)
                out.append(Check(f"korotkin_{tag}_a{j + 1}", _rel(fd, -S.S_B[j]), mpf("1e-6")))
            a1, a2, a3, a4 = ends
            k2 = (a3 - a2) * (a4 - a1) / ((a3 - a1) * (a4 - a2))
            K = mpmath.ellipk(k2)
            A_closed = -4 * K / mpmath.sqrt((a4 - a2) * (a3 - a1))
            out.append(Check(f"A_closed_form_{tag}", _rel(S.A_period, A_closed), mpf("1e-25")))
            B_closed = 1j * mpmath.ellipk(1 - k2) / K
            out.append(Check(f"B_closed_form_{tag}", _rel(S.B, B_closed), mpf("1e-25")))
            # Rauch: dB/da_j = 4 pi i v_hat(a_j)**2
            hr = mpf("1e-8")
            for j in range(4):
                up = list(ends)
                dn = list(ends)
                up[j] += hr
                dn[j] -= hr
                fd = (periods(up, ctx)[1] - periods(dn, ctx)[1]) / (2 * hr)
                pred = 4j * mpmath.pi * v_hat_eval(ends, S.A_period, j + 1) ** 2
                out.append(Check(f"rauch_{tag}_a{j + 1}", _rel(fd, pred), mpf("1e-10")))
        S = surface_data(tuple(mpf(e) for e in _v0_ends()), ctx)
        t0 = mpmath.re(theta(0, S.theta_params))
        out.append(Check("A_symmetric_theta", _rel(S.A_period, -2 * mpmath.pi * t0 ** 2 / (mpmath.sqrt(3) + 1)),
                         mpf("1e-25")))
    return out


def derivatives_suite(ctx: PrecisionCtx | None = None, ks=(1, 2, 3), eps="1e-6"):
    """Residue-form time derivatives versus central differences of the endpoint solver."""
    ctx = ctx or PrecisionCtx(256)
    out = []
    with ctx.workprec():
        eps = mpf(eps)
        V = Potential.quartic_plus_t()
        m = solve_endpoints_twocut(V, _v0_ends(), ctx)
        S = surface_data(m.endpoints, ctx)
        for k in ks:
            d = time_derivatives(S, m, k, ctx)
            mp_ = solve_endpoints_twocut(V.perturbed(k, eps), m.endpoints, ctx)
            mm_ = solve_endpoints_twocut(V.perturbed(k, -eps), m.endpoints, ctx)
            fd_omega = (mp_.omega - mm_.omega) / (2 * eps)
            fd_B = (periods(mp_.endpoints, ctx)[1] - periods(mm_.endpoints, ctx)[1]) / (2 * eps)
            pairs = [("dOmega", d["dOmega"], fd_omega), ("dB", d["dB"], fd_B)]
            for j in range(4):
                fd_a = (mp_.endpoints[j] - mm_.endpoints[j]) / (2 * eps)
                pairs.append((f"da{j + 1}", d["da"][j], fd_a))
            scale = max(abs(v) for _, v, _ in pairs)
            for name, an, fd in pairs:
                # relative to the size of the derivative vector: symmetric zeros stay meaningful
                err = abs(an - fd) / max(abs(fd), scale * mpf("1e-3"))
                out.append(Check(f"k{k}_{name}", err, mpf("1e-5")))
    return out


def proposition21_suite(ctx: PrecisionCtx | None = None, r=4, s=1, n_max: int = 8):
    """Even/odd splitting of the symmetric quartic into half-line integrals, sizes 1..n_max."""
    ctx = ctx or EXACT_CTX
    out = []
    for half in range(0, n_max // 2 + 1):
        res = parity_factorization(r, s, half, ctx)
        if 1 <= 2 * half <= n_max:
            out.append(Check(f"even_N{2 * half}", res["even_residual"], mpf("1e-30")))
        if 2 * half + 1 <= n_max:
            out.append(Check(f"odd_N{2 * half + 1}", res["odd_residual"], mpf("1e-30")))
    return out


def deform_suite(ctx: PrecisionCtx | None = None, steps: int = 20):
    """Certified path to a degree-6 field and the measure/potential round trip."""
    ctx = ctx or PrecisionCtx(128)
    out = []
    with ctx.workprec():
        V = Potential.from_coeffs(DEGREE6_TARGET)
        m = solve_by_continuation(V, ctx)
        cfg = ZeroConfiguration.from_measure(m)
        back = measure_to_potential(cfg, ctx)
        err = max(abs(x - y) for x, y in zip(back.poly.coeffs, V.poly.coeffs))
        out.append(Check("roundtrip_coefficients", err, mpf("1e-8")))
        series = measure_to_potential(cfg, ctx, method="series")
        err = max(abs(x - y) for x, y in zip(back.poly.coeffs, series.poly.coeffs))
        out.append(Check("contour_vs_series", err, mpf("1e-25")))
        path = build_two_cut_path(cfg, steps, ctx)
        failed = sum(0 if p.certificate.verdict else 1 for p in path.samples)
        out.append(Check("uncertified_samples", failed, mpf("0.5")))
        out.append(Check("sample_count_gap", abs(len(path) - steps), mpf("0.5")))
        worst = max(abs(p.certificate.hat_balance) for p in path.samples)
        out.append(Check("max_gap_balance", worst, ctx.tol_rel * 1000))
        seeds = [p.config.endpoints for p in path.samples]
        drift = mpf(0)
        for p, seed in zip(path.samples[1:], seeds[:-1]):
            sol = solve_endpoints_twocut(p.potential, seed, ctx)
            drift = max(drift, max(abs(x - y) for x, y in zip(sol.endpoints, p.config.endpoints)))
        out.append(Check("seeded_resolve_drift", drift, mpf("1e-20")))
    return out


SUITES = {
    "theta": theta_suite,
    "surface": surface_suite,
    "derivatives": derivatives_suite,
    "proposition21": proposition21_suite,
    "deform": deform_suite,
}


def run_suite(name: str, **kw):
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return fn(**kw)
