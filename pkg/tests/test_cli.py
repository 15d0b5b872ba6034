import csv
import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twocut.cli import (
    EXIT_CERT,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_PRECISION,
    EXIT_SOLVER,
    EXIT_VERIFY,
    RunConfig,
    _fmt,
    load_config,
    run,
)
from twocut.deform import solve_by_continuation
from twocut.equilibrium import Potential
from twocut.mpnum import PrecisionCtx

SCHEMA = json.loads(resources.files("twocut").joinpath("schemas/report.schema.json").read_text())


def _run(args, capsys):
    code = run(args)
    out, err = capsys.readouterr()
    return code, out, err


def _json(args, capsys):
    code, out, err = _run(args, capsys)
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    return code, report, err


def _table(report):
    return {row[0]: row[1] for row in report["rows"]}


def test_version(capsys):
    code, out, _ = _run(["--version"], capsys)
    assert code == EXIT_OK and "twocut" in out


def test_endpoints_symmetric_quartic(capsys):
    code, report, _ = _json(["endpoints", "--base", "quartic-sym", "--r", "4", "--s", "1"], capsys)
    assert code == EXIT_OK and report["status"] == "ok"
    rows = _table(report)
    assert rows["a4"].startswith("1.7320508075688772935274463")
    assert rows["omega"].startswith("0.5") and rows["regular"] == "true" and rows["cuts"] == "2"
    assert report["config"]["r"] == "4"


def test_endpoints_bit_equal_to_library(capsys):
    code, report, _ = _json(["endpoints", "--t", "0.05,0,0"], capsys)
    assert code == EXIT_OK
    ctx = PrecisionCtx(128)
    with ctx.workprec():
        m = solve_by_continuation(Potential.quartic_plus_t(("0.05", "0", "0")), ctx)
        digits = max(15, int(128 * 0.30102999566398120) - 3)
        want = [_fmt(a, digits) for a in m.endpoints]
    rows = _table(report)
    assert [rows[f"a{j}"] for j in range(1, 5)] == want


def test_gaussian_line_is_one_cut(capsys):
    code, report, _ = _json(["endpoints", "--base", "gue", "--sigma", "1"], capsys)
    rows = _table(report)
    assert code == EXIT_OK and rows["cuts"] == "1"
    assert mpmath.mpf(rows["a1"]) == -1 and mpmath.mpf(rows["a2"]) == 1


def test_csv_output_is_rfc4180(capsys):
    code, out, _ = _run(["endpoints", "--base", "quartic-sym", "--format", "csv"], capsys)
    assert code == EXIT_OK
    assert out.endswith("\r\n") and "\n" not in out.replace("\r\n", "")
    rows = list(csv.reader(io.StringIO(out, newline="")))
    assert rows[0] == ["quantity", "value"]
    assert all(len(r) == 2 for r in rows)


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = _run(["endpoints", "--base", "quartic-sym", "--out", str(target)], capsys)
    assert code == EXIT_OK and out == ""
    jsonschema.validate(json.loads(target.read_text()), SCHEMA)


@pytest.mark.parametrize("args", [
    ["endpoints", "--t", "x"],
    ["endpoints", "--t", "nan"],
    ["endpoints", "--bogus"],
    ["endpoints", "--base", "sextic"],
    ["endpoints", "--format", "xml"],
    ["endpoints", "--base", "quartic-sym", "--r", "1", "--s", "1"],
    ["endpoints", "--bits", "32"],
    ["compare", "--n-min", "9", "--n-max", "8"],
    ["compare", "--n-max", "49"],
    ["compare", "--base", "gaussian-half"],
    ["compare", "--jobs", "0"],
    ["verify", "--suite", "nope"],
    ["frobnicate"],
])
def test_parse_errors(args, capsys):
    code, _, err = _run(args, capsys)
    assert code == EXIT_PARSE
    assert err


def test_parse_error_in_subprocess():
    proc = subprocess.run([sys.executable, "-m", "twocut.cli", "endpoints", "--t", "1,,2"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_PARSE


def test_solver_failure_exit(capsys):
    # the continuation from the reference quartic stalls before reaching a one-cut field
    code, out, err = _run(["endpoints", "--base", "polynomial", "--t", "0,0.5", "--bits", "64"], capsys)
    assert code == EXIT_SOLVER and "solver failure" in err and out == ""


def test_not_two_cut_is_certificate_failure(capsys):
    # x**2/2 has a one-cut equilibrium measure
    code, _, err = _run(["compare", "--base", "polynomial", "--t", "0,0.5", "--n-min", "4", "--n-max", "4"], capsys)
    assert code == EXIT_CERT and "certification" in err


def test_precision_exhausted_reports_partial(capsys):
    code, report, err = _json(["compare", "--base", "quartic-sym", "--n-min", "30", "--n-max", "30",
                               "--bits", "64"], capsys)
    assert code == EXIT_PRECISION
    assert report["status"] == "error" and "N=30" in report["error"]
    assert report["rows"] == []


def test_verify_failure_exit(capsys):
    code, report, _ = _json(["verify", "--suite", "theta", "--bits", "64"], capsys)
    assert code == EXIT_VERIFY and report["status"] == "error"
    assert any(row[3] == "false" for row in report["rows"])


def test_verify_theta_passes(capsys):
    code, report, _ = _json(["verify", "--suite", "theta"], capsys)
    assert code == EXIT_OK
    assert report["summary"]["failed"] == "0"
    assert all(row[3] == "true" for row in report["rows"])


def test_compare_gue_sanity(capsys):
    code, report, _ = _json(["compare", "--base", "gue", "--n-min", "6", "--n-max", "7"], capsys)
    assert code == EXIT_OK
    for row in report["rows"]:
        assert abs(mpmath.mpf(row[5])) < mpmath.mpf(10) ** -30


def test_compare_parallel_is_bit_identical(tmp_path, capsys):
    base = ["compare", "--base", "quartic-sym", "--n-min", "8", "--n-max", "9"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(base + ["--jobs", "1", "--out", str(a)]) == EXIT_OK
    assert run(base + ["--jobs", "2", "--out", str(b)]) == EXIT_OK
    capsys.readouterr()
    ja, jb = json.loads(a.read_text()), json.loads(b.read_text())
    jsonschema.validate(ja, SCHEMA)
    for j in (ja, jb):
        j["config"].pop("jobs")
        j["config"].pop("out")
    assert ja == jb
    assert [r[0] for r in ja["rows"]] == ["8", "9"]


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('base = "quartic-sym"\nbits = 96\nr = "5"\ns = "2"\n')
    c = load_config("endpoints", {"bits": 80}, str(cfg))
    assert c.bits == 80 and c.r == "5" and c.base == "quartic-sym"
    c = load_config("endpoints", {}, str(cfg))
    assert c.bits == 96
    d = load_config("endpoints", {}, None)
    assert d.bits is None and d.base == "quartic-plus-t"
    code, report, _ = _json(["--config", str(cfg), "endpoints", "--bits", "80"], capsys)
    assert code == EXIT_OK and report["config"]["bits"] == 80 and report["config"]["r"] == "5"


@pytest.mark.parametrize("text", ['bits = "lots"\n', "unknown_key = 1\n", "bits = [\n"])
def test_bad_config_file(tmp_path, text, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text(text)
    code, _, _ = _run(["--config", str(cfg), "endpoints"], capsys)
    assert code == EXIT_PARSE


def test_missing_config_file(tmp_path, capsys):
    code, _, _ = _run(["--config", str(tmp_path / "none.toml"), "endpoints"], capsys)
    assert code == EXIT_PARSE


decimals = st.decimals(min_value=-100, max_value=100, allow_nan=False, places=6).map(str)


@settings(max_examples=40, deadline=None)
@given(
    base=st.sampled_from(["quartic-sym", "quartic-plus-t", "gue", "polynomial"]),
    r=decimals,
    t=st.lists(decimals, max_size=4),
    bits=st.one_of(st.none(), st.integers(64, 2048)),
    n=st.tuples(st.integers(1, 48), st.integers(0, 10)),
    fmt=st.sampled_from(["json", "csv"]),
    jobs=st.integers(1, 8),
)
def test_config_toml_roundtrip(base, r, t, bits, n, fmt, jobs):
    cfg = RunConfig(command="compare", base=base, r=r, t=tuple(t), bits=bits,
                    n_min=n[0], n_max=min(48, n[0] + n[1]), format=fmt, jobs=jobs)
    back = RunConfig.from_toml(cfg.to_toml())
    assert back == cfg
    assert RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
