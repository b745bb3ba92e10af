import json

import sympy

from apps.cli import main as cli
from packages.seqform.sequence import constant, parse_coefficient
from packages.symexpr.rational import RationalFunction
from packages.symmetry.generator import SymmetryGenerator


def _write_json(path, payload: dict) -> str:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def test_verify_catalog_generator() -> None:
    report = cli.run(["verify", "--eq", "dP5", "--gen", "2"])
    assert report.status == cli.STATUS_OK
    assert report.exit_code == 0
    assert report.payload["report"]["residues_checked"] == [0, 1, 2]
    assert report.payload["equation"]["name"] == "dP5/default"
    assert report.elapsed_ms is not None


def test_verify_label_combination() -> None:
    report = cli.run(["verify", "--eq", "dP2/zero", "--gen", "X2+i*X3"])
    assert report.status == cli.STATUS_OK
    assert report.payload["generator"]["provenance"] == "X2+i*X3"
    missing = cli.run(["verify", "--eq", "dP2/zero", "--gen", "X9"])
    assert missing.status == cli.STATUS_ERROR


def test_verify_failing_generator_file_exits_two(tmp_path) -> None:
    generator = SymmetryGenerator.make((0, 0), {2: constant(1)}, provenance="u^2")
    path = _write_json(tmp_path / "gen.json", generator.to_json())
    report = cli.run(["verify", "--eq", "dP2/zero", "--gen", path, "--mode", "numeric", "--samples", "10"])
    assert report.status == cli.STATUS_FAILED
    assert report.exit_code == 2
    assert report.payload["report"]["witness"] is not None


def test_equation_file_with_parameters(tmp_path) -> None:
    path = _write_json(tmp_path / "eq.json", {"omega": "-u(0)-u(1)+(a*n+b)/u(1)", "p": 2, "params": ["a", "b"]})
    report = cli.run(["simulate", "--eq", path, "--param", "a=1", "--param", "b=0", "--init", "1,1", "--steps", "2"])
    assert report.status == cli.STATUS_OK
    assert [row["re"] for row in report.payload["trajectory"]] == ["1", "1", "-2", "1/2"]
    unbound = cli.run(["simulate", "--eq", path, "--init", "1,1"])
    assert unbound.status == cli.STATUS_ERROR
    assert "a, b" in unbound.payload["error"]


def test_unknown_catalog_id_is_an_error() -> None:
    report = cli.run(["verify", "--eq", "dP9", "--gen", "1"])
    assert report.status == cli.STATUS_ERROR
    assert report.exit_code == 1
    assert "dP9" in report.payload["error"]


def test_simulate_csv_output() -> None:
    report = cli.run(["simulate", "--eq", "dP1/zero", "--init", "1,1", "--steps", "3", "--out", "csv"])
    rendered = cli.render_report(report, "json")
    assert rendered.splitlines() == ["n,re,im,flag", "0,1,0,ok", "1,1,0,ok", "2,-2,0,ok", "3,1,0,ok", "4,1,0,ok"]


def test_main_prints_json_and_returns_exit_code(capsys) -> None:
    code = cli.main(["solve-recurrence", "--coeffs", "1,1,1"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["status"] == "ok"
    assert len(out["payload"]["display"]) == 2


def test_text_format() -> None:
    report = cli.run(["catalog", "list", "--format", "text"])
    rendered = cli.render_report(report, report.output_format)
    assert rendered.startswith("status: ok\n")
    assert "total_generators: 29" in rendered


def test_parse_reports_offset() -> None:
    report = cli.run(["parse", "--expr", "1 + * 2"])
    assert report.status == cli.STATUS_ERROR
    assert report.payload["offset"] == 4
    ok = cli.run(["parse", "--expr", "(u(0)^2 - 1)/(u(0) - 1)"])
    assert ok.payload["symbols"] == ["U0"]
    assert RationalFunction.from_text(ok.payload["canonical"]) == RationalFunction.from_text("u(0) + 1")


def test_determine_and_transform() -> None:
    report = cli.run(["determine", "--eq", "dP3/bcase", "--show-system"])
    assert report.status == cli.STATUS_OK
    assert any(line.startswith("degree 1:") for line in report.payload["constraints"])
    assert "equations" in report.payload["system"]
    transformed = cli.run(["transform", "--eq", "dP4/zero", "--kind", "reciprocal"])
    assert RationalFunction.from_text(transformed.payload["omega"]) == RationalFunction.from_text("-u(0) - u(1)")


def test_reduce_with_audit_marks_failure() -> None:
    report = cli.run(["reduce", "--eq", "dP4/zero", "--gen", "1", "--audit", "ceiling"])
    assert report.status == cli.STATUS_FAILED
    assert report.payload["map"]["kind"] == "moebius"
    assert report.payload["v"]["period"] == 3
    assert report.payload["audit"][0]["formula_id"] == "dP4-ceiling"
    assert report.payload["audit"][0]["first_fail_n"] == 0
    plain = cli.run(["reduce", "--eq", "dP4/zero", "--gen", "1", "--u0", "1", "--u1", "2"])
    assert plain.status == cli.STATUS_OK
    values = [RationalFunction.from_text(v) for v in plain.payload["u"]["values"][:3]]
    assert values == [RationalFunction.from_text(v) for v in ["1", "2", "-2/3"]]


def test_catalog_export_needs_id() -> None:
    assert cli.run(["catalog", "export"]).status == cli.STATUS_ERROR
    report = cli.run(["catalog", "export", "--id", "dp3"])
    assert report.payload["branch"] == "reciprocal_case"
    assert report.command == ["catalog", "export", "dp3", "reciprocal_case"]


def test_singular_tolerance_from_environment(monkeypatch) -> None:
    monkeypatch.setenv("DSYM_FLOAT_SINGULAR_TOL", "0.5")
    assert cli._default_singular_tol() == 0.5
    monkeypatch.setenv("DSYM_FLOAT_SINGULAR_TOL", "tiny")
    assert cli._default_singular_tol() == cli.DEFAULT_SINGULAR_TOL


def test_selftest_is_deterministic() -> None:
    first = cli.run(["selftest"])
    second = cli.run(["selftest"])
    assert first.status == cli.STATUS_OK
    assert first.elapsed_ms is None
    assert cli.render_report(first, "json") == cli.render_report(second, "json")
    assert all(item["as_expected"] for item in first.payload["generators"])
    assert len(first.payload["audits"]) == 7


def test_reduce_with_label_combination() -> None:
    report = cli.run(["reduce", "--eq", "dP2/zero", "--gen", "X2+i*X3"])
    assert report.status == cli.STATUS_OK
    assert report.payload["generator"]["provenance"] == "X2+i*X3"
    assert report.payload["map"]["kind"] == "linear"
    assert parse_coefficient(report.payload["map"]["r"]) == -sympy.I
    assert parse_coefficient(report.payload["map"]["s"]) == 0
    values = [parse_coefficient(v) for v in report.payload["u"]["values"][:4]]
    assert [sympy.expand(got - want) for got, want in zip(values, [1, 3, -1, -3])] == [0, 0, 0, 0]
