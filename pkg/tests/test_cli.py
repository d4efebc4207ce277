# tests/test_cli.py
import json

import pytest

import app
from denjoy_invariants.circle_core import exact_equal
from denjoy_invariants.commands import classify as classify_command
from denjoy_invariants.commands.report_components import Report
from denjoy_invariants.data_loader import (
    SPEC_DIR,
    build_action,
    document_for,
    dump_action_spec,
    load_action_spec,
    parse_action_spec,
)
from denjoy_invariants.errors import (
    EXIT_BUDGET,
    EXIT_UNDECIDED,
    EXIT_USAGE,
    InvalidActionError,
    SpecParseError,
    UndecidedError,
)


def run_json(capsys, *argv):
    code = app.main(["--no-timing", *argv])
    captured = capsys.readouterr()
    assert code == 0, captured.err
    return json.loads(captured.out)


# ---------- spec files ----------
@pytest.mark.parametrize("name", sorted(p.name for p in SPEC_DIR.glob("*.json")))
def test_bundled_specs_are_canonical(name):
    assert dump_action_spec(load_action_spec(name)) == (SPEC_DIR / name).read_text(encoding="utf-8")


def test_document_round_trip(d2_action):
    assert build_action(document_for(d2_action)) == d2_action


def test_spec_errors_carry_positions():
    with pytest.raises(SpecParseError) as err:
        parse_action_spec('{"d": 2,\n "gamma": ["sqrt(2)-1"]}')
    assert err.value.line == 2
    with pytest.raises(SpecParseError) as err:
        parse_action_spec('{"d": 2,,}')
    assert err.value.line == 1
    with pytest.raises(SpecParseError):
        parse_action_spec('{"d": 1, "gamma": ["1/3"], "colour": "red"}')


def test_blowup_of_rational_angle_is_invalid():
    doc = parse_action_spec('{"d": 1, "gamma": ["1/3"], "blowups": [{"base_point": "0"}]}')
    with pytest.raises(InvalidActionError):
        build_action(doc)


def test_invalid_angle_reports_its_position(tmp_path, capsys):
    text = '{"d": 2,\n "gamma": ["sqrt(2) - 1",\n           "3/2"]}'
    with pytest.raises(InvalidActionError) as err:
        build_action(parse_action_spec(text))
    assert (err.value.line, err.value.column) == (3, 12)
    path = tmp_path / "bad_angle.json"
    path.write_text(text, encoding="utf-8")
    assert app.main(["classify", str(path)]) == EXIT_USAGE
    assert "line 3, column 12" in capsys.readouterr().err


# ---------- commands ----------
def test_classify(capsys):
    out = run_json(capsys, "classify", "denjoy_d2.json")["outputs"]
    assert out["class"] == "Denjoy"
    assert out["k"] == 1
    assert out["wandering_orbit_representatives"] == ["I[0:0,0]"]
    assert run_json(capsys, "classify", "minimal_d2.json")["outputs"]["class"] == "Minimal"
    finite = run_json(capsys, "classify", "finite_orbit.json")["outputs"]
    assert finite["class"] == "FiniteOrbit"
    assert finite["rho_image"] == {"finite": True, "order": 12}


def test_rho(capsys):
    out = run_json(capsys, "rho", "denjoy_d2.json", "--g", "2,-1")["outputs"]
    assert exact_equal(out["rho"], "2*sqrt(2) - sqrt(3) - 1")
    assert out["decimal"].startswith("0.0963")


def test_rho_estimate(capsys):
    out = run_json(capsys, "rho", "denjoy_d2.json", "--g", "1,0", "--estimate", "50")["outputs"]
    assert out["estimate"]["contains_exact"] is True
    assert out["estimate"]["enclosure_width"] == "1/50"


def test_act(capsys):
    out = run_json(capsys, "act", "denjoy_d2.json", "--g", "1,0", "--point", "gap:0:0,0:1/2")["outputs"]
    assert out["point"]["point"] == "gap:0:0,0:1/2"
    assert out["image"]["point"] == "gap:0:1,0:1/2"
    assert exact_equal(out["image"]["phi"], "sqrt(2) - 1")


def test_measure_matches_rotation_number(capsys):
    out = run_json(capsys, "measure", "denjoy_d2.json", "--point", "cantor:1/3", "--g", "2,1")["outputs"]
    assert out["equals_rho"] is True


def test_trace(capsys):
    unit = run_json(capsys, "trace", "denjoy_d2.json")["outputs"]
    assert unit["trace"] == "1"
    assert unit["in_trace_ideal"] == "No"
    bump = run_json(capsys, "trace", "denjoy_d2.json", "--term", "1,0@bump:0:1,0:0,1,-1")["outputs"]
    assert bump["trace"] == "0"
    assert bump["in_trace_ideal"] == "Yes"


def test_trace_of_complex_term(capsys):
    out = run_json(capsys, "trace", "denjoy_d2.json", "--term", "0,0@const:1+2*I")["outputs"]
    assert out["trace"] == "1 + 2*I"
    assert out["trace_a_star_a"] == "5"
    assert out["in_trace_ideal"] == "No"


def test_ktheory_formal(capsys):
    out = run_json(capsys, "ktheory", "--d", "3")["outputs"]
    assert out["ranks"] == [8, 8]
    assert all(out["split_exact"])


def test_ktheory_for_spec(capsys):
    out = run_json(capsys, "ktheory", "denjoy_d2.json")["outputs"]
    assert out["K1_labels"] == [[1], [2], [3], [1, 2, 3]]
    assert [t["formal"] for t in out["trace_values"]] == [[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 0]]


def test_ktheory_for_angles(capsys):
    report = run_json(capsys, "ktheory", "--gamma", "sqrt(2) - 1", "--sample", "0,1", "--box-bound", "20")
    assert report["outputs"]["ranks"] == [2, 2]
    assert report["outputs"]["order_samples"][0]["sign"] == "Positive"
    assert report["certificates"]["injective_box"]["injective"] is True


def test_prim(capsys):
    out = run_json(capsys, "prim", "--k", "2", "--subset", "1:{1/3}", "--subset", "1:(0,1/2)")["outputs"]
    point, interval = out["queried"]
    assert point["closure"] == "1:{1/3}; J"
    assert point["open"] is False and point["witness"] == "1:1/3"
    assert interval["open"] is True and interval["ideal"]["kind"] == "Proper"
    assert out["lattice"]["distributive"] is True


def test_table_format(capsys):
    assert app.main(["--format", "table", "ktheory", "--d", "2"]) == 0
    text = capsys.readouterr().out
    assert "== ktheory ==" in text
    assert "{1,2}" in text


def test_output_is_deterministic(capsys):
    first = run_json(capsys, "ktheory", "denjoy_d2.json")
    second = run_json(capsys, "ktheory", "denjoy_d2.json")
    assert first == second


def test_export_round_trip(tmp_path, capsys):
    target = tmp_path / "k.json"
    csv_dir = tmp_path / "csv"
    assert app.main(["export", "-o", str(target), "--csv-dir", str(csv_dir), "ktheory", "--d", "2"]) == 0
    capsys.readouterr()
    direct = app.run_command(app.build_parser(), ["ktheory", "--d", "2"])
    assert Report.loads(target.read_text(encoding="utf-8")) == direct
    assert (csv_dir / "ktheory_K0.csv").exists()


# ---------- exit codes ----------
def test_missing_spec_is_a_usage_error(capsys):
    assert app.main(["classify", "no_such_spec.json"]) == EXIT_USAGE
    assert "cannot read" in capsys.readouterr().err


def test_malformed_spec_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d": 1,\n "gamma": ["1/3",]}', encoding="utf-8")
    assert app.main(["classify", str(bad)]) == EXIT_USAGE
    assert "line 2" in capsys.readouterr().err


def test_unknown_command_exits_with_usage_code():
    with pytest.raises(SystemExit) as err:
        app.main(["frobnicate"])
    assert err.value.code == EXIT_USAGE


def test_budget_exit_code(capsys):
    code = app.main(["--enum-budget", "10", "rho", "denjoy_d2.json", "--g", "1,0", "--estimate", "5"])
    assert code == EXIT_BUDGET
    assert "budget" in capsys.readouterr().err


def test_undecided_exit_code(monkeypatch, capsys):
    def undecided(args, settings):
        raise UndecidedError("comparison", 1024)

    monkeypatch.setattr(classify_command, "run", undecided)
    assert app.main(["classify", "denjoy_d2.json"]) == EXIT_UNDECIDED
    assert "undecided at 1024 bits" in capsys.readouterr().err


def test_environment_precision(monkeypatch):
    monkeypatch.setenv("DENJOY_WORKING_BITS", "256")
    args = app.build_parser().parse_args(["ktheory", "--d", "1"])
    assert app.resolve_settings(args).working_bits == 256
    args = app.build_parser().parse_args(["--precision-bits", "64", "ktheory", "--d", "1"])
    assert app.resolve_settings(args).working_bits == 64
