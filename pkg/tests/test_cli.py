import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import json
from pathlib import Path

import pytest

from kirby.descriptors import parse_descriptor, parse_window
from kirby.moves import assert_diagram_move
from kirby.surgery import linking_data, parse_surgery
from scripts.kirby_cli import main

EXAMPLES = Path(__file__).resolve().parent.parent / "data" / "examples"


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_indep_reports_full_rank(capsys):
    assert main(["indep"]) == 0
    assert "rank = 3" in capsys.readouterr().out


def test_invariants_of_the_empty_diagram(capsys):
    assert main(["invariants", str(EXAMPLES / "empty.surg"), "--format", "json"]) == 0
    payload = _json(capsys)
    assert payload["n"] == 0
    assert payload["d3"] == "0"
    assert payload["delta"] == "0"
    assert payload["components"] == []


def test_invariants_of_the_unknot_text(capsys):
    assert main(["invariants", str(EXAMPLES / "unknot_minus.surg")]) == 0
    out = capsys.readouterr().out
    assert "d3 = 1/4" in out
    assert "delta = 1 (mod 8)" in out


def test_schur_on_a_fixed_chain(capsys):
    code = main(["schur", "--move", "chain", "--ell1", "1,0", "--ell2", "0,1", "--ell3", "2,0",
                 "--format", "json"])
    assert code == 0
    payload = _json(capsys)
    assert payload["ok"]
    assert payload["samples"] == 1


def test_mcg_replay(capsys):
    assert main(["mcg", "replay", "handleslide_left_pm", "--format", "json"]) == 0
    payload = _json(capsys)
    assert payload["ok"]
    assert payload["words"][0] == "a+ b-"
    assert payload["words"][-1] == "ab- a+"


def test_templates_check(capsys):
    assert main(["templates", "check"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_verify_script(capsys):
    assert main(["verify", str(EXAMPLES / "cancel_demo.kirby"), "--format", "json"]) == 0
    payload = _json(capsys)
    assert payload["ok"]
    assert payload["name"] == "cancel_demo"


def test_apply_writes_the_new_diagram(tmp_path, capsys):
    out = tmp_path / "after.surg"
    source = EXAMPLES / "pair.surg"
    code = main(["apply", "--move", "cancel-remove", "--window", "0:6@0", "--out", str(out),
                 str(source), "--format", "json"])
    assert code == 0
    payload = _json(capsys)
    assert payload["d3_before"] == payload["d3_after"] == "0"
    written = parse_surgery(out.read_text())
    assert written.count == 0
    check = assert_diagram_move(parse_surgery(source.read_text()), written,
                                parse_descriptor("cancel-remove"), parse_window("0:6@0"))
    assert check.ok, check.failures


def test_apply_threads_a_pair_through_a_strand(tmp_path, capsys):
    out = tmp_path / "threaded.surg"
    source = EXAMPLES / "unknot_minus.surg"
    code = main(["apply", "--move", "cancel-insert", "--window", "1:1@0+1", "--out", str(out),
                 str(source), "--format", "json"])
    assert code == 0
    payload = _json(capsys)
    assert payload["d3_before"] == payload["d3_after"] == "1/4"
    assert payload["index_map"]["created"] == [1, 2]
    written = parse_surgery(out.read_text())
    assert linking_data(written).Q == ((-2, 1, 1), (1, 0, -1), (1, -1, -2))
    check = assert_diagram_move(parse_surgery(source.read_text()), written,
                                parse_descriptor("cancel-insert"), parse_window("1:1@0+1"))
    assert check.ok, check.failures


def test_missing_file_is_an_error(capsys):
    assert main(["invariants", str(EXAMPLES / "does_not_exist.surg")]) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2
