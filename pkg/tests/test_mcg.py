import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from pathlib import Path

import pytest

from kirby.errors import RuleMismatch, ScriptError, UndeclaredFact
from kirby.mcg import (
    Certificate,
    Letter,
    Step,
    builtin_system,
    certificates,
    handleslide_variant,
    parse_mcg,
    replay,
    replay_derivation,
    rewrite,
    word,
    word_length_change,
    word_of_surgery_link,
)
from kirby.surgery import parse_surgery

DATA = Path(__file__).resolve().parent.parent / "data" / "examples"

CHAIN_SYSTEM = """
curves: a b c d1 d2
chain a b c d1 d2
"""


@pytest.fixture
def handleslide():
    return parse_mcg((DATA / "handleslide.mcg").read_text())


def test_parse_mcg_example(handleslide):
    assert handleslide.name == "handleslide"
    assert handleslide.curves == ("a", "b", "ab", "ba", "c")
    assert handleslide.words["left"] == word("a+ b-")
    assert handleslide.are_disjoint("a", "c")
    assert not handleslide.are_disjoint("a", "b")
    assert handleslide.product("b", "ab") == "a"
    assert handleslide.factor("a", "ab") == "b"


@pytest.mark.parametrize("text, error", [
    ("curves: a\nintersect a b -> ab\n", UndeclaredFact),
    ("curves: a b\nfrobnicate a\n", ScriptError),
    ("curves: a b ab\nintersect a b ab\n", ScriptError),
    ("curves: a b\nintersect a b -> a\n", ScriptError),
    ("curves: a\nword w: a+ z-\n", UndeclaredFact),
])
def test_parse_mcg_errors(text, error):
    with pytest.raises(error):
        parse_mcg(text)


def test_words_print_and_parse():
    assert str(word("1")) == "1"
    assert len(word("a+ b- ab+")) == 3
    assert str(word("a+ b-")) == "a+ b-"
    assert Letter("a", 1).inverse() == Letter("a", -1)
    with pytest.raises(ScriptError):
        word("a")


def test_cancel_rule(handleslide):
    assert rewrite(handleslide, word("a+ a- b+"), "cancel", 0) == word("b+")
    assert rewrite(handleslide, word("a+"), "cancel", 1, "backward", Letter("c", 1)) == word("a+ c+ c-")
    with pytest.raises(RuleMismatch):
        rewrite(handleslide, word("a+ b-"), "cancel", 0)
    with pytest.raises(RuleMismatch):
        rewrite(handleslide, word("a+ a-"), "cancel", 1)
    with pytest.raises(UndeclaredFact):
        rewrite(handleslide, word("a+"), "cancel", 0, "backward", Letter("z", 1))


def test_commute_rule(handleslide):
    assert rewrite(handleslide, word("a+ c-"), "commute", 0) == word("c- a+")
    assert rewrite(handleslide, word("a+ a+"), "commute", 0) == word("a+ a+")
    with pytest.raises(UndeclaredFact):
        rewrite(handleslide, word("a+ b+"), "commute", 0)


def test_braid_rule(handleslide):
    assert rewrite(handleslide, word("a+ b+"), "braid", 0) == word("ab+ a+")
    assert rewrite(handleslide, word("ab+ a+"), "braid", 0, "backward") == word("a+ b+")
    with pytest.raises(RuleMismatch):
        rewrite(handleslide, word("a+ b-"), "braid", 0)
    with pytest.raises(UndeclaredFact):
        rewrite(handleslide, word("a+ c+"), "braid", 0)


def test_lantern_rule():
    system = builtin_system("destabilization")
    out = rewrite(system, word("d3+ c+ ab+"), "lantern", 0)
    assert out == word("e+ d1+ d2+ d4+")
    assert rewrite(system, out, "lantern", 0, "backward") == word("d3+ c+ ab+")
    with pytest.raises(UndeclaredFact):
        rewrite(system, word("c+ d3+ ab+"), "lantern", 0)


def test_chain_rule():
    system = parse_mcg(CHAIN_SYSTEM)
    source = word(" ".join(["a+ b+ c+"] * 4))
    out = rewrite(system, source, "chain", 0)
    assert out == word("d2+ d1+")
    assert rewrite(system, out, "chain", 0, "backward") == source
    with pytest.raises(RuleMismatch):
        rewrite(system, word(" ".join(["a+ b+ c+"] * 3 + ["a+ c+ b+"])), "chain", 0)


def test_unknown_rule_and_length_changes(handleslide):
    with pytest.raises(RuleMismatch):
        rewrite(handleslide, word("a+"), "hop", 0)
    assert word_length_change("lantern") == 1
    assert word_length_change("chain") == -10
    assert word_length_change("cancel", "backward") == 2


def test_ambiguous_factor():
    system = parse_mcg("curves: a b c x\nintersect a b -> x\nintersect a c -> x\n")
    with pytest.raises(RuleMismatch):
        system.factor("a", "x")


@pytest.mark.parametrize("name", sorted(certificates()))
@pytest.mark.parametrize("direction", ["forward", "backward"])
def test_every_certificate_replays(name, direction):
    result = replay_derivation(name, direction)
    assert result.ok
    assert len(result.words) == len(result.steps) + 1


def test_certificate_details():
    assert len(certificates()) == 9
    cert = handleslide_variant(1, -1, "left")
    assert cert.name == "handleslide_left_pm"
    assert len(cert.steps) == 3
    assert (str(cert.start), str(cert.target)) == ("a+ b-", "ab- a+")
    end = replay_derivation("lantern_destabilization")
    assert str(end.words[-1]) == "d3+"
    assert str(end.words[0]) == "d1+ d2+ d4+ ab-"


def test_replay_rejects_wrong_target():
    bad = Certificate("bad", "handleslide", word("a+ b+"), word("a+ b+"), (Step("braid", 0),))
    with pytest.raises(RuleMismatch):
        replay(bad)
    with pytest.raises(RuleMismatch):
        replay_derivation("no_such_certificate")
    with pytest.raises(RuleMismatch):
        handleslide_variant(2, 1)


def test_word_of_surgery_link():
    d = parse_surgery((DATA / "pair.surg").read_text())
    assert word_of_surgery_link(d, ["a", "b"]) == word("b+ a-")
    assert word_of_surgery_link(d, {0: "x", 1: "y"}) == word("y+ x-")
    with pytest.raises(UndeclaredFact):
        word_of_surgery_link(d, {0: "x"})
