import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest

from kirby import blocks
from kirby import front as fr
from kirby.descriptors import MoveTag
from kirby.errors import FrontSyntaxError, FrontValidationError
from kirby.moves import side_data, side_slot_columns
from kirby.surgery import LinkingData
from kirby.templates import TEMPLATE_NAMES, TemplateSide, check_templates, load_template, parse_template, template_for


def test_shipped_templates_pass_their_checks():
    results = check_templates()
    assert [r.name for r in results] == list(TEMPLATE_NAMES)
    for r in results:
        assert r.ok, f"{r.name}: {r.detail}"


def test_template_lookup_by_tag():
    assert template_for(MoveTag.CANCEL_INSERT).name == "cancel"
    assert template_for(MoveTag.CANCEL_REMOVE, passes=1).name == "cancel_through"
    assert template_for(MoveTag.HANDLE_SLIDE, "b").name == "slide_b"
    assert template_for(MoveTag.UNFRAMED_SLIDE, "split").name == "slide_split"
    assert template_for(MoveTag.CHAIN).tag == MoveTag.CHAIN
    assert load_template("slide_a").sign == -1
    assert load_template("slide_split").sign is None


def test_lantern_sides_realize_the_published_blocks():
    t = load_template("lantern")
    left = fr.link_invariants(t.left.diagram())[0]
    assert [(c.tb, c.rot) for c in left] == [(-4, -1), (-1, 0), (-1, 0)]
    assert side_data(t.left, t.roles("left")) == LinkingData(blocks.LANTERN_A, blocks.LANTERN_ROT, 3, 0)
    assert side_data(t.right, t.roles("right")) == LinkingData(blocks.LANTERN_A_PRIME, blocks.LANTERN_ROT_PRIME, 4, 0)


def test_chain_sides_realize_the_published_blocks():
    t = load_template("chain")
    left = fr.link_invariants(t.left.diagram())[0]
    assert len(left) == 12
    assert all((c.tb, c.rot) == (-1, 0) for c in left)
    right = fr.link_invariants(t.right.diagram())[0]
    assert [(c.tb, c.rot) for c in right] == [(-2, -1), (-2, 1)]
    assert side_data(t.left, t.roles("left")) == LinkingData(blocks.chain_A(), blocks.CHAIN_ROT, 12, 0)
    assert side_data(t.right, t.roles("right")) == LinkingData(blocks.CHAIN_A_PRIME, blocks.CHAIN_ROT_PRIME, 2, 0)


def test_cancel_template_right_side_is_empty():
    t = load_template("cancel")
    assert t.right.events == ()
    assert t.left.roles == {"knot": 0, "pushoff": 1}


PAIR_TEMPLATE = """
template broken
tag {tag}

side left
L 1
L 3
X 2
X 2
R 3
R 1
coeffs: c1={c1} c2=-1
orient: c1=+ c2=+
roles: knot=c1 pushoff=c2

side right
"""


def test_parse_template_validation():
    assert parse_template(PAIR_TEMPLATE.format(tag="CancelRemove", c1="+1")).sign is None
    with pytest.raises(FrontValidationError):
        parse_template(PAIR_TEMPLATE.format(tag="CancelRemove", c1="-1"))
    with pytest.raises(FrontSyntaxError):
        parse_template(PAIR_TEMPLATE.format(tag="Unknown", c1="+1"))
    with pytest.raises(FrontSyntaxError):
        parse_template("template x\ntag Lantern\nside left\nL 1\nR 1\n")


def test_side_with_pass_slots_is_not_closed():
    with pytest.raises(FrontValidationError):
        TemplateSide(events=(), passes=("s1",)).diagram()


def test_missing_assets_are_reported(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_template("lantern", tmp_path)
    results = check_templates(tmp_path)
    assert not any(r.ok for r in results)


def test_cancel_through_template_threads_both_components_alike():
    t = template_for(MoveTag.CANCEL_INSERT, passes=1)
    assert t.name == "cancel_through"
    assert t.left.passes == t.right.passes == ("s1",)
    assert t.left.exits == t.right.exits == (0,)
    assert side_data(t.left, t.roles("left")) == LinkingData(((0, -1), (-1, -2)), (0, 0), 2, 1)
    assert side_slot_columns(t.left, ("knot", "pushoff")) == [(-1,), (-1,)]


ROUTED_TEMPLATE = """
template routed
tag CancelRemove

side left
pass a
pass b
L 3
L 5
X 4
X 4
R 5
R 3
X 1
coeffs: c1=+1 c2=-1
orient: c1=+ c2=+
roles: knot=c1 pushoff=c2
map: {left_map}

side right
pass a
pass b
{right_events}
map: {right_map}
"""


def test_pass_slot_routing_is_validated():
    t = parse_template(ROUTED_TEMPLATE.format(left_map="a=b b=a", right_events="X 1", right_map="a=b b=a"))
    assert t.left.exits == (1, 0)
    with pytest.raises(FrontValidationError):
        parse_template(ROUTED_TEMPLATE.format(left_map="a=a b=b", right_events="X 1", right_map="a=b b=a"))
    with pytest.raises(FrontValidationError):
        parse_template(ROUTED_TEMPLATE.format(left_map="a=b b=a", right_events="", right_map="a=a b=b"))
    with pytest.raises(FrontValidationError):
        parse_template(ROUTED_TEMPLATE.format(left_map="a=c b=a", right_events="X 1", right_map="a=b b=a"))
