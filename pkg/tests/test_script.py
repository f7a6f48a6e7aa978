import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from fractions import Fraction
from pathlib import Path

import pytest

from kirby.errors import ScriptError
from kirby.script import parse_script, verify_script, verify_script_file

EXAMPLES = Path(__file__).resolve().parent.parent / "data" / "examples"

UNKNOT_SCRIPT = """
script inline_unknot
let u = inline "L1 R1" coeffs=-1 orient=+
load u
expect d3 = 1/4
expect delta = 1
expect n = 1
reidemeister I-up at 1 1
expect d3 = 1/4
normalize
expect sigma = -1
"""

NESTED_SCRIPT = """
script nested
let nest = inline "L1 L2 L4 X3 X3 R4 R2 R1" coeffs=-1,1,-1 orient=+,+,+
load nest
expect q = 1
move cancel-remove window 1:7@{base}
expect n = 1
expect d3 = 1/4
"""


@pytest.mark.parametrize("name", ["cancel_demo.kirby", "lantern_demo.kirby"])
def test_shipped_scripts_verify(name):
    report = verify_script_file(EXAMPLES / name)
    assert report.ok, [s.detail for s in report.steps if s.status != "pass"]
    assert report.exit_status == 0


def test_inline_unknot_script():
    script = parse_script(UNKNOT_SCRIPT)
    assert script.name == "inline_unknot"
    assert script.bindings == ("u",)
    assert script.steps[5].variant == "I-above"
    report = verify_script(script)
    assert report.ok
    assert report.steps[1].d3_after == "1/4"
    assert report.steps[2].detail == "d3 = 1/4"


def test_failing_expect_sets_exit_status():
    script = parse_script('let u = inline "L1 R1" coeffs=-1 orient=+\nload u\nexpect d3 = 0\n')
    report = verify_script(script)
    assert not report.ok
    assert report.exit_status == 1
    assert report.steps[2].status == "fail"
    assert "expected 0" in report.steps[2].detail


def test_move_outside_its_band_fails_the_step():
    report = verify_script(parse_script(NESTED_SCRIPT.format(base=0)))
    assert report.exit_status == 1
    failed = [s for s in report.steps if s.status == "fail"]
    assert failed[0].kind == "move"
    assert failed[0].detail.startswith("SupportViolation")


def test_nested_pair_is_removed_in_its_band():
    report = verify_script(parse_script(NESTED_SCRIPT.format(base=1)))
    assert report.ok, [s.detail for s in report.steps]
    move = report.steps[3]
    assert move.d3_before == move.d3_after == "1/4"
    assert "n=3" in move.detail and "n=1" in move.detail


def test_unframed_slide_script():
    text = """
let s = inline "L1 L3 X2 X2 R3 R1" coeffs=*,-1 orient=+,+ unframed=0
load s
slide_unframed rider=0 over=1 window 0:6@0
expect n = 1
expect d3 = 1/4
"""
    report = verify_script(parse_script(text))
    assert report.ok, [s.detail for s in report.steps]


def test_expect_values_are_rationals():
    script = parse_script("let e = empty\nload e\nexpect c2 = 0\nexpect delta = 8\n")
    assert script.steps[2].value == Fraction(0)
    assert verify_script(script).ok


@pytest.mark.parametrize("text", [
    "load nothing",
    "frobnicate",
    "let e = empty\nexpect tb = 1",
    "let e = empty\nmove lantern",
    "let x = file does_not_exist.surg",
    "let x = somewhere",
    "reidemeister III at 0",
    "let e = empty\nassert_move e missing lantern window 0:0@0",
])
def test_parse_errors(text):
    with pytest.raises(ScriptError):
        parse_script(text, EXAMPLES)
