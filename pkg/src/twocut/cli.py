"""``twocut`` command line: endpoints, exact-vs-asymptotic tables, verification suites.

Reports are written as JSON (validated by ``schemas/report.schema.json``) or
as RFC-4180 CSV with a header row.  Every number leaves the program as a
decimal string whose digit count follows from the working precision, so two
runs with the same configuration produce byte-identical files.

Exit codes: 0 ok, 1 usage or parse error, 2 solver failure, 3 certification
failure, 4 precision exhausted, 5 verification failure.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import click
import mpmath
import tomli
from mpmath import mpf

from . import __version__
from .equilibrium import certify_measure, free_energy_F0, solve_endpoints_onecut, solve_endpoints_twocut
from .errors import (
    BranchError,
    CertificateFailure,
    CollidedEndpoints,
    DivergedNewton,
    DomainError,
    NonConvergence,
    NotTwoCut,
    PrecisionExhausted,
    RootBracketError,
    SingularJacobian,
)
from .estimators import make_potential
from .exactz import DEFAULT_MAX_N, exact_log_Z
from .expansion import general_expansion, gue_block, gue_log_partition, quartic_ab, quartic_expansion
from .mpnum import PrecisionCtx
from .verify import SUITES, run_suite

__all__ = ["RunConfig", "load_config", "main", "run", "ENDPOINT_COLUMNS", "COMPARE_COLUMNS", "VERIFY_COLUMNS",
           "SCHEMA_ID", "EXIT_OK", "EXIT_PARSE", "EXIT_SOLVER", "EXIT_CERT", "EXIT_PRECISION", "EXIT_VERIFY"]

EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_CERT, EXIT_PRECISION, EXIT_VERIFY = range(6)
SCHEMA_ID = "twocut-report/1"

BASES = ("quartic-sym", "quartic-plus-t", "v0", "gaussian-half", "gaussian-line", "gue", "polynomial")
COMMANDS = ("endpoints", "compare", "verify")
FORMATS = ("json", "csv")

ENDPOINT_COLUMNS = ("quantity", "value")
COMPARE_COLUMNS = (
    "N",
    "parity",
    "exact_log_Z",
    "exact_error_bound",
    "asymptotic",
    "residual",
    "residual_times_N",
    "oscillatory_exact",
    "oscillatory_model",
)
VERIFY_COLUMNS = ("check", "value", "threshold", "passed")

_SOLVER_ERRORS = (DivergedNewton, SingularJacobian, NonConvergence, CollidedEndpoints, BranchError, RootBracketError)
_CERT_ERRORS = (CertificateFailure, NotTwoCut)


class ReportedFailure(Exception):
    """A command finished with a report but a nonzero exit status."""

    def __init__(self, code, report, message):
        super().__init__(message)
        self.code = code
        self.report = report


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run.

    Numeric parameters are kept as the decimal strings the user typed so that
    serialization is lossless; they are parsed into mpf at the working
    precision of each command.
    """

    command: str = "endpoints"
    base: str = "quartic-plus-t"
    r: str = "4"
    s: str = "1"
    sigma: str = "1"
    t: tuple = ()
    alpha: str = "0"
    n_min: int = 8
    n_max: int = 16
    bits: int | None = None
    asym_bits: int = 128
    tol: str | None = None
    format: str = "json"
    out: str | None = None
    suite: str = "theta"
    jobs: int = 1
    steps: int = 20

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise click.BadParameter(f"unknown command {self.command!r}")
        if self.base not in BASES:
            raise click.BadParameter(f"base must be one of {', '.join(BASES)}; got {self.base!r}")
        if self.format not in FORMATS:
            raise click.BadParameter(f"format must be json or csv; got {self.format!r}")
        if self.suite not in SUITES:
            raise click.BadParameter(f"suite must be one of {', '.join(SUITES)}; got {self.suite!r}")
        for name in ("r", "s", "sigma", "alpha"):
            object.__setattr__(self, name, _decimal(getattr(self, name), name))
        if self.tol is not None:
            object.__setattr__(self, "tol", _decimal(self.tol, "tol"))
        object.__setattr__(self, "t", parse_t(self.t))
        for name in ("n_min", "n_max", "asym_bits", "jobs", "steps"):
            object.__setattr__(self, name, _integer(getattr(self, name), name))
        if self.bits is not None:
            object.__setattr__(self, "bits", _integer(self.bits, "bits"))
            if self.bits < 64:
                raise click.BadParameter("bits must be at least 64")
        if self.asym_bits < 64:
            raise click.BadParameter("asym_bits must be at least 64")
        if not 1 <= self.n_min <= self.n_max:
            raise click.BadParameter(f"need 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}")
        if self.jobs < 1 or self.steps < 2:
            raise click.BadParameter("jobs must be >= 1 and steps >= 2")

    # serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        d = asdict(self)
        d["t"] = list(self.t)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise click.BadParameter(f"unknown configuration keys: {', '.join(sorted(extra))}")
        return cls(**d)

    def to_toml(self) -> str:
        lines = []
        for k, v in self.to_dict().items():
            if v is None:
                continue
            if isinstance(v, list):
                lines.append(f"{k} = [{', '.join(json.dumps(x) for x in v)}]")
            elif isinstance(v, int):
                lines.append(f"{k} = {v}")
            else:
                lines.append(f"{k} = {json.dumps(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_toml(cls, text: str) -> "RunConfig":
        try:
            data = tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            raise click.BadParameter(f"config file is not valid TOML: {exc}") from None
        return cls.from_dict(_normalize_keys(data))

    # derived ------------------------------------------------------------
    def ctx(self, default_bits: int) -> PrecisionCtx:
        bits = self.bits or default_bits
        return PrecisionCtx(bits, self.tol, self.tol)

    def potential(self):
        with mpmath.workprec(max(self.bits or 0, 512)):
            return make_potential(self.base, mpf(self.r), mpf(self.s), mpf(self.sigma),
                                  tuple(mpf(x) for x in self.t), mpf(self.alpha))


_DECIMAL = re.compile(r"^[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")


def _decimal(v, name):
    if isinstance(v, bool) or not isinstance(v, (str, int, float)):
        raise click.BadParameter(f"{name} must be a decimal number, got {v!r}")
    s = str(v).strip()
    if not _DECIMAL.match(s):
        raise click.BadParameter(f"{name} must be a finite decimal number, got {v!r}")
    return s


def _integer(v, name):
    if isinstance(v, bool):
        raise click.BadParameter(f"{name} must be an integer")
    try:
        out = int(str(v).strip())
    except ValueError:
        raise click.BadParameter(f"{name} must be an integer, got {v!r}") from None
    return out


def parse_t(value) -> tuple:
    """Comma-separated (or list) t-vector to a tuple of decimal strings."""
    if value is None or value == "":
        return ()
    if isinstance(value, str):
        items = value.split(",")
    elif isinstance(value, (list, tuple)):
        items = list(value)
    else:
        raise click.BadParameter(f"t must be a comma-separated string or a list, got {value!r}")
    return tuple(_decimal(x, "t") for x in items)


def _normalize_keys(d):
    return {str(k).replace("-", "_"): v for k, v in d.items()}


def load_config(command: str, cli_values: dict, config_path: str | None = None) -> RunConfig:
    """Merge defaults, the TOML file and CLI flags (flags win)."""
    merged = {}
    if config_path is not None:
        try:
            with open(config_path, "rb") as fh:
                data = tomli.load(fh)
        except OSError as exc:
            raise click.BadParameter(f"cannot read config file: {exc}") from None
        except tomli.TOMLDecodeError as exc:
            raise click.BadParameter(f"config file is not valid TOML: {exc}") from None
        merged.update(_normalize_keys(data))
        merged.pop("command", None)
    merged.update({k: v for k, v in cli_values.items() if v is not None})
    merged["command"] = command
    return RunConfig.from_dict(merged)


# ---------------------------------------------------------------------------
# number formatting


def _digits(bits: int) -> int:
    return max(15, int(bits * math.log10(2)) - 3)


def _fmt(x, digits):
    if x is None:
        return None
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = mpmath.mpmathify(x)
    if isinstance(x, mpmath.mpc):
        raise TypeError("complex values are reported as separate real and imaginary parts")
    if x == 0:
        return "0.0"
    return mpmath.nstr(x, digits, min_fixed=-4, max_fixed=digits)


# ---------------------------------------------------------------------------
# commands


def _report(cfg: RunConfig, columns, rows, summary=None, status="ok", error=None):
    return {
        "schema": SCHEMA_ID,
        "version": __version__,
        "command": cfg.command,
        "config": cfg.to_dict(),
        "status": status,
        "error": error,
        "columns": list(columns),
        "rows": rows,
        "summary": summary or {},
    }


def _solve_measure(cfg, V, ctx):
    if V.base in ("gaussian_half", "gaussian_line"):
        return solve_endpoints_onecut(V, ctx)
    if V.base == "quartic_sym":
        a, b = quartic_ab(V.param("r"), V.param("s"))
        seed = (-mpmath.sqrt(b), -mpmath.sqrt(a), mpmath.sqrt(a), mpmath.sqrt(b))
        return solve_endpoints_twocut(V, seed, ctx)
    from .deform import solve_by_continuation

    return solve_by_continuation(V, ctx)


def cmd_endpoints(cfg: RunConfig):
    ctx = cfg.ctx(128)
    digits = _digits(ctx.bits)
    with ctx.workprec():
        V = cfg.potential()
        m = _solve_measure(cfg, V, ctx)
        cert = certify_measure(m, ctx)
        F0 = free_energy_F0(m, V, ctx)["F0"]
        rows = []
        for j, a in enumerate(m.endpoints, start=1):
            rows.append([f"a{j}", _fmt(a, digits)])
        if m.cuts == 2:
            rows.append(["omega", _fmt(m.omega, digits)])
        rows.append(["ell", _fmt(m.ell, digits)])
        rows.append(["F0", _fmt(F0, digits)])
        rows.append(["cuts", str(m.cuts)])
        rows.append(["regular", _fmt(bool(cert.verdict), digits)])
        report = _report(cfg, ENDPOINT_COLUMNS, rows, {"bits": str(ctx.bits)})
    if not cert.verdict:
        report["status"] = "error"
        report["error"] = "regularity certificate failed"
        raise ReportedFailure(EXIT_CERT, report, "regularity certificate failed")
    return report


def _compare_row(cfg_dict, N):
    """One table row; runs in a worker process when ``jobs > 1``."""
    cfg = RunConfig.from_dict(cfg_dict)
    ctx = cfg.ctx(512)
    actx = PrecisionCtx(cfg.asym_bits)
    V = cfg.potential()
    ex = exact_log_Z(V, N, ctx)
    with actx.workprec():
        if V.base == "gaussian_line":
            asym = gue_log_partition(N, V.param("sigma"), actx)
            return N, ex.log_Z, ex.error_bound, asym, None, None
        if V.base == "quartic_sym":
            e = quartic_expansion(V.param("r"), V.param("s"), N, actx)
            model = e.parity_constant
        else:
            e = general_expansion(V, N, actx)
            model = -e.F1 + mpmath.log(e.theta_val)
        smooth = gue_block(N, actx) - mpf(N) ** 2 * e.F0
    with ctx.workprec():
        return N, ex.log_Z, ex.error_bound, e.total, ex.log_Z - smooth, model


def _fit_summary(res, digits):
    """Least-squares ``|r| ~ C/N``, the spread of ``|r| N / C`` and the log-log decay slope."""
    Ns = [mpf(n) for n, _ in res]
    ab = [abs(r) for _, r in res]
    C = mpmath.fsum(a / n for n, a in zip(Ns, ab)) / mpmath.fsum(1 / (n * n) for n in Ns)
    out = {"fit_C": _fmt(C, digits)}
    if C > 0:
        out["max_residual_times_N_over_C"] = _fmt(max(a * n for n, a in zip(Ns, ab)) / C, 6)
    nz = [(mpmath.log(n), mpmath.log(a)) for n, a in zip(Ns, ab) if a > 0]
    if len(nz) >= 2:
        mx = mpmath.fsum(x for x, _ in nz) / len(nz)
        my = mpmath.fsum(y for _, y in nz) / len(nz)
        sxx = mpmath.fsum((x - mx) ** 2 for x, _ in nz)
        if sxx > 0:
            slope = mpmath.fsum((x - mx) * (y - my) for x, y in nz) / sxx
            out["decay_exponent"] = _fmt(-slope, 6)
    return out


def cmd_compare(cfg: RunConfig):
    if cfg.base == "gaussian-half":
        raise click.BadParameter("compare supports two-cut bases and the Gaussian line")
    if cfg.n_max > DEFAULT_MAX_N:
        raise click.BadParameter(f"n_max must not exceed {DEFAULT_MAX_N}")
    ctx = cfg.ctx(512)
    digits = _digits(min(ctx.bits, cfg.asym_bits))
    Ns = list(range(cfg.n_min, cfg.n_max + 1))
    d = cfg.to_dict()
    results, failure = [], None
    if cfg.jobs == 1:
        for N in Ns:
            try:
                results.append(_compare_row(d, N))
            except PrecisionExhausted as exc:
                failure = (N, exc)
                break
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(_compare_row, d, N) for N in Ns]
            for N, fut in zip(Ns, futures):
                try:
                    results.append(fut.result())
                except PrecisionExhausted as exc:
                    failure = (N, exc)
                    for f in futures:
                        f.cancel()
                    break
    rows, res = [], []
    with ctx.workprec():
        for N, ex, err, asym, osc, model in results:
            r = ex - asym
            res.append((N, r))
            rows.append([
                str(N), "even" if N % 2 == 0 else "odd", _fmt(ex, digits), _fmt(err, 6), _fmt(asym, digits),
                _fmt(r, digits), _fmt(r * N, digits), _fmt(osc, digits), _fmt(model, digits),
            ])
        summary = {"completed_n_max": str(results[-1][0]) if results else None}
        if res:
            summary.update(_fit_summary(res, digits))
            summary["max_abs_residual"] = _fmt(max(abs(r) for _, r in res), digits)
            for parity, want in (("even", 0), ("odd", 1)):
                last = [row for row in results if row[0] % 2 == want and row[4] is not None]
                if last:
                    N, _, _, _, osc, model = last[-1]
                    summary[f"{parity}_N"] = str(N)
                    summary[f"{parity}_oscillatory_exact"] = _fmt(osc, digits)
                    summary[f"{parity}_oscillatory_model"] = _fmt(model, digits)
    report = _report(cfg, COMPARE_COLUMNS, rows, summary)
    if failure is not None:
        N, exc = failure
        msg = f"precision exhausted at N={N}; largest completed N is {summary['completed_n_max']}: {exc}"
        report["status"] = "error"
        report["error"] = msg
        raise ReportedFailure(EXIT_PRECISION, report, msg)
    return report


def cmd_verify(cfg: RunConfig):
    kw = {}
    if cfg.bits is not None:
        kw["ctx"] = cfg.ctx(cfg.bits)
    if cfg.suite == "deform":
        kw["steps"] = cfg.steps
    checks = run_suite(cfg.suite, **kw)
    rows = []
    for c in checks:
        rows.append([c.name, _fmt(mpmath.mpmathify(c.value), 6), _fmt(mpmath.mpmathify(c.threshold), 6),
                     _fmt(c.passed, 6)])
    failed = [c.name for c in checks if not c.passed]
    summary = {"checks": str(len(checks)), "failed": str(len(failed))}
    report = _report(cfg, VERIFY_COLUMNS, rows, summary)
    if failed:
        report["status"] = "error"
        report["error"] = "failed checks: " + ", ".join(failed)
        raise ReportedFailure(EXIT_VERIFY, report, report["error"])
    return report


# ---------------------------------------------------------------------------
# output


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(report["columns"])
    for row in report["rows"]:
        w.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def _emit(report, cfg):
    text = render(report, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


_RUNNERS = {"endpoints": cmd_endpoints, "compare": cmd_compare, "verify": cmd_verify}


def _execute(command, ctx_obj, values):
    cfg = load_config(command, values, ctx_obj.get("config"))
    try:
        report = _RUNNERS[command](cfg)
    except ReportedFailure as exc:
        _emit(exc.report, cfg)
        click.echo(f"error: {exc}", err=True)
        return exc.code
    except DomainError as exc:
        raise click.BadParameter(str(exc)) from None
    except _CERT_ERRORS as exc:
        click.echo(f"certification failure: {exc}", err=True)
        return EXIT_CERT
    except PrecisionExhausted as exc:
        click.echo(f"precision exhausted: {exc}", err=True)
        return EXIT_PRECISION
    except _SOLVER_ERRORS as exc:
        click.echo(f"solver failure: {exc}", err=True)
        return EXIT_SOLVER
    _emit(report, cfg)
    return EXIT_OK


def _potential_options(f):
    opts = [
        click.option("--base", type=str, default=None, help=f"Potential family: {', '.join(BASES)}."),
        click.option("--r", type=str, default=None),
        click.option("--s", type=str, default=None),
        click.option("--sigma", type=str, default=None),
        click.option("--t", "t", type=str, default=None, help="Comma-separated t_1,t_2,... (coefficients for 'polynomial')."),
        click.option("--alpha", type=str, default=None),
        click.option("--bits", type=int, default=None, help="Working precision in bits."),
        click.option("--tol", type=str, default=None, help="Relative and absolute tolerance."),
        click.option("--format", "format", type=str, default=None, help="json or csv."),
        click.option("--out", type=str, default=None, help="Output file (stdout if omitted)."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


@click.group()
@click.version_option(__version__, prog_name="twocut")
@click.option("--config", "config", type=str, default=None, help="TOML file with flat key = value pairs.")
@click.pass_context
def cli(ctx, config):
    """Two-cut matrix model partition functions: exact and asymptotic."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = config


@cli.command()
@_potential_options
@click.pass_context
def endpoints(ctx, **values):
    """Support endpoints, filling fraction, Lagrange constant, F0 and regularity."""
    return _execute("endpoints", ctx.obj, values)


@cli.command()
@_potential_options
@click.option("--n-min", "n_min", type=int, default=None)
@click.option("--n-max", "n_max", type=int, default=None)
@click.option("--asym-bits", "asym_bits", type=int, default=None, help="Precision of the asymptotic side.")
@click.option("--jobs", type=int, default=None, help="Worker processes for the N sweep.")
@click.pass_context
def compare(ctx, **values):
    """Exact log Z_N against the large-N expansion over an N range."""
    return _execute("compare", ctx.obj, values)


@cli.command()
@click.option("--suite", type=str, default=None, help=f"One of {', '.join(SUITES)}.")
@click.option("--bits", type=int, default=None)
@click.option("--tol", type=str, default=None)
@click.option("--steps", type=int, default=None, help="Path samples for the deform suite.")
@click.option("--format", "format", type=str, default=None)
@click.option("--out", type=str, default=None)
@click.pass_context
def verify(ctx, **values):
    """Run a verification suite; exit 5 if any check fails."""
    return _execute("verify", ctx.obj, values)


def run(argv=None) -> int:
    """Run the CLI and return the exit code instead of exiting."""
    try:
        rv = cli.main(args=argv, prog_name="twocut", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_PARSE
    except click.ClickException as exc:
        exc.show()
        return EXIT_PARSE
    return rv if isinstance(rv, int) else EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
