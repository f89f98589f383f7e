"""End-to-end CLI tests driven through click's test runner.

Exit codes are the public contract: 0 on domain success, 1 on domain failure
(findings, halted plans, unknown entities), 2 on input failure (unreadable or
malformed files, bad flag values).
"""

import json
from pathlib import Path

import jsonschema
import pytest
from click.testing import CliRunner

from sourceq import (PostcondConfig, analyze_progression, canonical_json,
                     export_json, parse_plan)
from sourceq.cli import main
from conftest import build_scn1_before, build_scn1_progression

SCENARIOS = Path(__file__).parent.parent / "scenarios"
SCHEMA = json.loads(
    (Path(__file__).parent.parent / "schema" / "sourceq.schema.json")
    .read_text(encoding="utf-8"))

BACK_EQ = """\
unit A {
  subunit B {
  }
}
unit X {
  subunit Y {
    source p1: persons level 8 holder A
  }
}
"""

BACK_PLAN = """\
use "back.meq"

plan back scope(A=X, B=Y, X=A, Y=B, sources=p1) {
  thread main {
    transfer p1 to B level 1;
  }
}
"""

HALTING_PLAN = """\
use "scn1.meq"

plan bad scope(A=A, B=B, X=X, Y=Y, sources=p1) {
  thread main {
    transfer ghost to Y level 8;
  }
}
"""


def assert_valid(payload, def_name):
    jsonschema.validate(
        instance=payload,
        schema={"$ref": f"#/$defs/{def_name}", "$defs": SCHEMA["$defs"]},
        cls=jsonschema.Draft202012Validator)


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_validate_clean_document():
    result = invoke("validate", SCENARIOS / "scn1.meq")
    assert result.exit_code == 0
    assert "ok:" in result.stdout and "0 finding(s)" in result.stdout


def test_validate_clean_document_json():
    result = invoke("--format", "json", "validate", SCENARIOS / "scn1.meq")
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload == {"ok": True, "findings": []}
    assert_valid(payload, "validation_report")


def test_validate_semantic_findings_exit_one(tmp_path):
    doc = tmp_path / "loop.meq"
    doc.write_text("unit A {\n  subunit B {\n  }\n}\n"
                   "money from A to A amount 1.0\n")
    result = invoke("validate", doc)
    assert result.exit_code == 1
    assert "invalid:" in result.stdout and "1 finding(s)" in result.stdout
    result = invoke("--format", "json", "validate", doc)
    assert result.exit_code == 1
    payload = json.loads(result.stdout)
    assert payload["ok"] is False
    assert payload["findings"][0]["rule"] == "document"
    assert_valid(payload, "validation_report")


def test_validate_syntax_error_exit_two(tmp_path):
    doc = tmp_path / "broken.meq"
    doc.write_text("unit {\n")
    result = invoke("validate", doc)
    assert result.exit_code == 2
    assert "error:" in result.stderr


def test_validate_unreadable_file_exit_two(tmp_path):
    result = invoke("validate", tmp_path / "absent.meq")
    assert result.exit_code != 0
    assert "cannot read" in result.stderr


def test_classify_text_report():
    result = invoke("classify", SCENARIOS / "scn1.meq", SCENARIOS / "scn1.mpl")
    assert result.exit_code == 0
    assert "classification: UnitToUnitOutsourcing" in result.stdout
    assert "insourcing reading: UnitToUnitInsourcing" in result.stdout
    assert "postcondition: pass (weight 15 -> -6, theta 0.25)" in result.stdout
    assert "  properly_outsourced: h1, p1" in result.stdout
    assert "  unsourced: l1" in result.stdout
    assert "reversibility: Technically" in result.stdout


def test_classify_json_matches_library_analysis():
    result = invoke("--format", "json", "classify",
                    SCENARIOS / "scn1.meq", SCENARIOS / "scn1.mpl")
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    _, report = analyze_progression(
        build_scn1_before(), build_scn1_progression(),
        config=PostcondConfig(theta=0.25, growth_reading=True))
    assert payload == json.loads(canonical_json(report.to_dict()))
    assert_valid(payload, "transformation_report")


def test_classify_history_unlocks_backsourcing(tmp_path):
    (tmp_path / "back.meq").write_text(BACK_EQ)
    plan = tmp_path / "back.mpl"
    plan.write_text(BACK_PLAN)
    history = tmp_path / "history.json"
    history.write_text(json.dumps({
        "scope": {"outsourcer": "A", "outsourcing_subunit": "B",
                  "insourcer": "X", "insourcing_subunit": "Y"},
        "partition": {"properly_outsourced": ["p1"]},
        "classification": "UnitToUnitOutsourcing",
    }))
    bare = invoke("classify", tmp_path / "back.meq", plan)
    assert "classification: UnitToUnitOutsourcing" in bare.stdout
    result = invoke("classify", tmp_path / "back.meq", plan,
                    "--history", history)
    assert result.exit_code == 0
    assert "classification: Backsourcing" in result.stdout


def test_classify_bad_history_file_exit_two(tmp_path):
    history = tmp_path / "history.json"
    history.write_text("{not json")
    result = invoke("classify", SCENARIOS / "scn1.meq",
                    SCENARIOS / "scn1.mpl", "--history", history)
    assert result.exit_code == 2
    assert "bad history file" in result.stderr


def test_classify_requires_plan_scope(tmp_path):
    plan = tmp_path / "bare.mpl"
    plan.write_text('plan bare {\n  thread main {\n'
                    '    pay X to A amount 1.0;\n  }\n}\n')
    result = invoke("classify", SCENARIOS / "scn1.meq", plan)
    assert result.exit_code == 2
    assert "declares no scope" in result.stderr


def test_classify_halted_plan_exit_one(tmp_path):
    plan = tmp_path / "bad.mpl"
    plan.write_text(HALTING_PLAN)
    result = invoke("classify", SCENARIOS / "scn1.meq", plan)
    assert result.exit_code == 1
    assert "halted:" in result.stderr


def test_metrics_text_table():
    result = invoke("metrics", SCENARIOS / "scn1.meq", "A")
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0] == "unit A"
    assert ("  cost B: total=85 (capital=20 operational=5 lease=10 "
            "personnel=50)") in lines
    assert "  cost Ops: total=0" in lines
    assert "    persons: 1.0000 / n/a" in lines
    assert "  service degree: 1.0000 (internal 10, external 0)" in lines


def test_metrics_json_payload():
    result = invoke("--format", "json", "metrics",
                    SCENARIOS / "scn1.meq", "A")
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["unit"] == "A"
    assert payload["costs"]["B"]["personnel"] == 50.0
    assert payload["costs"]["B"]["total"] == 85.0
    assert payload["internal_degrees"]["persons"] == {"abs": 1.0, "rel": None}
    assert payload["internal_degrees"]["finance"]["abs"] is None
    assert payload["services"]["degree_internal"] == 1.0
    assert_valid(payload, "metrics")


def test_metrics_benchmark_rel_column(tmp_path):
    bench = tmp_path / "bench.json"
    bench.write_text(json.dumps({"entries": [
        {"type": "persons", "external": 0.5},
        {"type": "ipr", "external": 1.0},
    ]}))
    result = invoke("--benchmark", bench, "metrics",
                    SCENARIOS / "scn1.meq", "A")
    assert result.exit_code == 0
    assert "    persons: 1.0000 / 2.0000" in result.stdout
    # A fully external benchmark makes any internal holding infinitely over.
    assert "    ipr: 1.0000 / inf" in result.stdout
    result = invoke("--benchmark", bench, "--format", "json", "metrics",
                    SCENARIOS / "scn1.meq", "A")
    payload = json.loads(result.stdout)
    assert payload["internal_degrees"]["persons"]["rel"] == 2.0
    assert payload["internal_degrees"]["ipr"]["rel"] == "inf"
    assert payload["internal_degrees"]["tools"]["rel"] is None
    assert_valid(payload, "metrics")


def test_metrics_unknown_unit_exit_one():
    result = invoke("metrics", SCENARIOS / "scn1.meq", "Nowhere")
    assert result.exit_code == 1
    assert "unknown unit 'Nowhere'" in result.stderr


def test_run_plan_emits_one_json_line_per_turn():
    result = invoke("run-plan", SCENARIOS / "scn1.mpl")
    assert result.exit_code == 0
    lines = [json.loads(line) for line in result.stdout.splitlines()]
    turns, summary = lines[:-1], lines[-1]
    assert [t["turn"] for t in turns] == [1, 2, 3, 4, 5]
    assert [t["kind"] for t in turns] == ["transfer", "retitle", "abandon",
                                          "move-service", "pay"]
    assert all(t["outcome"] == "applied" for t in turns)
    assert summary == {"status": "Completed", "turns": 5, "logical_time": 5}
    for turn in turns:
        assert_valid(turn, "run_plan_turn")
    assert_valid(summary, "run_plan_summary")


def test_run_plan_random_strategy_with_override():
    result = invoke("--seed", 3, "run-plan", SCENARIOS / "scn1.mpl",
                    "--equilibrium", SCENARIOS / "scn1.meq",
                    "--strategy", "random")
    assert result.exit_code == 0
    summary = json.loads(result.stdout.splitlines()[-1])
    assert summary["status"] == "Completed"


def test_run_plan_without_use_needs_equilibrium_flag(tmp_path):
    plan = tmp_path / "nouse.mpl"
    plan.write_text('plan nouse {\n  thread main {\n'
                    '    pay X to A amount 1.0;\n  }\n}\n')
    result = invoke("run-plan", plan)
    assert result.exit_code == 2
    assert "pass --equilibrium" in result.stderr
    result = invoke("run-plan", plan, "--equilibrium", SCENARIOS / "scn1.meq")
    assert result.exit_code == 0


def test_run_plan_halt_reports_reason_and_exit_one(tmp_path):
    plan = tmp_path / "bad.mpl"
    plan.write_text(HALTING_PLAN)
    result = invoke("run-plan", plan,
                    "--equilibrium", SCENARIOS / "scn1.meq")
    assert result.exit_code == 1
    lines = [json.loads(line) for line in result.stdout.splitlines()]
    assert lines[0]["outcome"].startswith("failed:")
    summary = lines[-1]
    assert summary["status"] == "Halted"
    assert "halt_reason" in summary
    assert_valid(lines[0], "run_plan_turn")
    assert_valid(summary, "run_plan_summary")


@pytest.mark.parametrize("args, message", [
    (("evolve", "--units", 1, "--steps", 5), "--units must be at least 2"),
    (("evolve", "--units", 4, "--steps", 0), "--steps must be at least 1"),
    (("evolve", "--units", 4, "--steps", 5, "--checkpoint", 0),
     "--checkpoint must be at least 1"),
])
def test_evolve_flag_validation(args, message):
    result = invoke(*args)
    assert result.exit_code == 2
    assert message in result.stderr


def test_evolve_json_payload_and_csv(tmp_path):
    csv_path = tmp_path / "checkpoints.csv"
    result = invoke("--format", "json", "evolve", "--units", 6,
                    "--steps", 20, "--checkpoint", 10, "--csv", csv_path)
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["steps"] == 20
    assert [c["step"] for c in payload["checkpoints"]] == [10, 20]
    assert sum(payload["classifications"].values()) == 20
    assert_valid(payload, "evolution_stats")
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("step,n_units,n_edges,max_in_degree,")
    assert len(lines) == 3
    assert lines[1].startswith("10,") and lines[2].startswith("20,")


def test_evolve_text_output_names_policy():
    result = invoke("evolve", "--units", 6, "--steps", 20,
                    "--policy", "preferential", "--exponent", 1.0,
                    "--checkpoint", 10)
    assert result.exit_code == 0
    assert result.stdout.startswith("policy preferential(1) seed 0: 20 steps")
    assert "UnitToUnitOutsourcing:" in result.stdout


def test_export_equilibrium_and_plan_documents():
    result = invoke("export", SCENARIOS / "scn1.meq")
    assert result.exit_code == 0
    assert result.stdout == export_json(build_scn1_before())
    assert_valid(json.loads(result.stdout), "equilibrium_export")
    plan_result = invoke("export", SCENARIOS / "scn1.mpl")
    assert plan_result.exit_code == 0
    parsed = parse_plan((SCENARIOS / "scn1.mpl").read_text(encoding="utf-8"))
    assert plan_result.stdout == export_json(parsed.value)
    assert_valid(json.loads(plan_result.stdout), "plan_export")


def test_export_rejects_malformed_documents(tmp_path):
    doc = tmp_path / "broken.meq"
    doc.write_text("unit A { subunit { }\n")
    result = invoke("export", doc)
    assert result.exit_code == 2
    assert "error:" in result.stderr


@pytest.mark.parametrize("theta", ["0", "1", "-0.5"])
def test_theta_must_sit_strictly_inside_unit_interval(theta):
    result = invoke("--theta", theta, "classify",
                    SCENARIOS / "scn1.meq", SCENARIOS / "scn1.mpl")
    assert result.exit_code == 2
    assert "--theta must lie strictly between 0 and 1" in result.stderr


def test_bad_weight_and_benchmark_files_exit_two(tmp_path):
    weights = tmp_path / "weights.json"
    weights.write_text(json.dumps({"personnel": {"1": 1.0, "2": 5.0}}))
    result = invoke("--weights", weights, "validate", SCENARIOS / "scn1.meq")
    assert result.exit_code == 2
    assert "bad weight table" in result.stderr
    bench = tmp_path / "bench.json"
    bench.write_text(json.dumps({"entries": [{"type": "persons",
                                              "external": 1.5}]}))
    result = invoke("--benchmark", bench, "validate", SCENARIOS / "scn1.meq")
    assert result.exit_code == 2
    assert "bad benchmark file" in result.stderr


def test_scaled_weight_table_scales_the_postcondition(tmp_path):
    from sourceq import default_weight_table
    weights = tmp_path / "weights.json"
    weights.write_text(json.dumps(default_weight_table().scaled(2.0).to_dict()))
    result = invoke("--weights", weights, "classify",
                    SCENARIOS / "scn1.meq", SCENARIOS / "scn1.mpl")
    assert result.exit_code == 0
    assert "postcondition: pass (weight 30 -> -12, theta 0.25)" in result.stdout
