import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from kirby import blocks
from kirby.blocks import verify_schur_conditions
from kirby.descriptors import MoveDescriptor, MoveTag, Window, parse_descriptor, parse_window
from kirby.errors import (
    BlockMismatch,
    CoefficientMismatch,
    HalfIntegerLinking,
    MoveIndexError,
    PatternMismatch,
    SupportViolation,
)
from kirby.invariants import change_vector, d3_surg, delta
from kirby.linalg import signature
from kirby.moves import (
    C_VECTOR,
    L_VECTOR,
    P_VECTOR,
    apply_template_move,
    apply_template_move_detailed,
    assert_diagram_move,
    independence_rank,
    matrix_transform,
    random_ambient,
    slide_unframed,
)
from kirby.surgery import LinkingData, SurgeryDiagram, linking_data, parse_surgery, surgery_from_word
from kirby.templates import load_template

EXAMPLES = Path(__file__).resolve().parent.parent / "data" / "examples"
PAIR_WORD = "L1/L3/X2/X2/R3/R1"
MATRIX_TAGS = [MoveTag.CANCEL_INSERT, MoveTag.CANCEL_REMOVE, MoveTag.HANDLE_SLIDE, MoveTag.LANTERN, MoveTag.CHAIN]


def _load(name):
    return parse_surgery((EXAMPLES / name).read_text())


def _left_side(name):
    side = load_template(name).left
    return SurgeryDiagram(side.diagram(), tuple(-1 if c is None else c for c in side.coeffs))


# --- Change vectors ---
def test_change_vectors_on_isolated_blocks():
    empty = LinkingData.empty()
    pair, _ = matrix_transform(empty, parse_descriptor("cancel-insert t=-1 rho=0"))
    assert change_vector(empty, pair) == P_VECTOR == (2, 0, 1, 0)

    lantern = LinkingData(blocks.LANTERN_A, blocks.LANTERN_ROT, 3, 0)
    after, imap = matrix_transform(lantern, MoveDescriptor(tag=MoveTag.LANTERN))
    assert change_vector(lantern, after) == L_VECTOR == (1, -1, 0, -1)
    assert imap.created == (0, 1, 2, 3)
    assert imap.deleted == (0, 1, 2)

    chain = LinkingData(blocks.chain_A(), blocks.CHAIN_ROT, 12, 0)
    after, _ = matrix_transform(chain, MoveDescriptor(tag=MoveTag.CHAIN))
    assert change_vector(chain, after) == C_VECTOR == (-10, 6, 0, -2)


def test_independence_rank():
    assert independence_rank([P_VECTOR, L_VECTOR, C_VECTOR]) == 3
    assert independence_rank([P_VECTOR, L_VECTOR]) == 2
    assert independence_rank([]) == 0


# --- Matrix level ---
def test_cancel_insert_block_and_external_columns():
    data = LinkingData(((-2,),), (0,), 1, 0)
    after, imap = matrix_transform(data, parse_descriptor("cancel-insert t=-2 rho=1 ell=3"))
    assert after.Q == ((-2, 3, 3), (3, -1, -2), (3, -2, -3))
    assert after.r == (0, 1, 1)
    assert after.q == 1
    assert imap.survivors == {0: 0}
    assert imap.created == (1, 2)
    assert d3_surg(after) == d3_surg(data)


def test_cancel_insert_needs_opposite_parity():
    with pytest.raises(BlockMismatch):
        matrix_transform(LinkingData.empty(), parse_descriptor("cancel-insert t=-1 rho=1"))


def test_cancel_remove_checks_the_block():
    not_a_pair = LinkingData(((-2, 1), (1, -2)), (0, 0), 2, 1)
    with pytest.raises(BlockMismatch):
        matrix_transform(not_a_pair, parse_descriptor("cancel-remove"))
    with pytest.raises(MoveIndexError):
        matrix_transform(LinkingData(((-2,),), (0,), 1, 0), parse_descriptor("cancel-remove"))


def test_handle_slide_is_a_congruence():
    data = LinkingData(((0, -1), (-1, -2)), (0, 0), 2, 1)
    after, imap = matrix_transform(data, parse_descriptor("slide rider=0 over=1 sign=-1"))
    assert after.Q == ((0, 1), (1, -2))
    assert imap.survivors == {0: 0, 1: 1}
    back, _ = matrix_transform(after, parse_descriptor("slide backward rider=0 over=1 sign=-1"))
    assert back == data
    with pytest.raises(MoveIndexError):
        matrix_transform(data, parse_descriptor("slide rider=1 over=1 sign=1"))


def test_lantern_rejects_wrong_local_data():
    wrong_rot = LinkingData(blocks.LANTERN_A, (1, 0, 0), 3, 0)
    with pytest.raises(BlockMismatch):
        matrix_transform(wrong_rot, MoveDescriptor(tag=MoveTag.LANTERN))
    with pytest.raises(MoveIndexError):
        matrix_transform(LinkingData(((-2,),), (0,), 1, 0), MoveDescriptor(tag=MoveTag.LANTERN))


def test_lantern_half_integer_linking():
    data = LinkingData(((-1, 0, 0, 0), (0, -5, 0, 0), (0, 0, -2, 1), (0, 0, 1, -2)), (1, -1, 0, 0), 4, 0)
    with pytest.raises(HalfIntegerLinking):
        matrix_transform(data, parse_descriptor("lantern w2l=1 w2r=0 w3l=0 w3r=0"))


@pytest.mark.parametrize("tag", MATRIX_TAGS)
def test_random_ambient_moves_preserve_d3_and_delta(tag):
    rng = np.random.default_rng(2024)
    for _ in range(100):
        data, m = random_ambient(tag, rng)
        after, imap = matrix_transform(data, m)
        assert after.n - data.n == imap.size_change
        assert d3_surg(after) == d3_surg(data)
        assert delta(after) == delta(data)


@pytest.mark.parametrize("tag", [MoveTag.HANDLE_SLIDE, MoveTag.LANTERN, MoveTag.CHAIN])
def test_backward_undoes_forward(tag):
    rng = np.random.default_rng(99)
    for _ in range(20):
        data, m = random_ambient(tag, rng)
        after, _ = matrix_transform(data, m)
        back, _ = matrix_transform(after, m.with_updates(direction="backward"))
        assert back == data


def test_cancel_insert_then_remove_restores_data():
    rng = np.random.default_rng(3)
    for _ in range(20):
        data, m = random_ambient(MoveTag.CANCEL_INSERT, rng)
        paired, _ = matrix_transform(data, m)
        back, _ = matrix_transform(paired, MoveDescriptor(tag=MoveTag.CANCEL_REMOVE, order=m.order))
        assert back == data


# --- Schur identities ---
@pytest.mark.parametrize("text", [
    "cancel-insert", "cancel-remove", "slide", "lantern", "chain",
    "lantern backward", "chain backward", "slide backward",
])
def test_schur_conditions_hold_on_random_instances(text):
    report = verify_schur_conditions(parse_descriptor(text), seed=0, samples=100)
    assert report.ok
    assert report.samples == 100
    assert all(c.holds for c in report.checks)


def test_schur_conditions_on_a_fixed_chain():
    report = verify_schur_conditions(parse_descriptor("chain ell1=1,0 ell2=0,1 ell3=2,0"))
    assert report.ok
    assert report.samples == 1
    budget = report.checks[2]
    assert (budget.lhs, budget.rhs) == ("-2", "-2")


# --- Descriptors and windows ---
def test_parse_descriptor_and_window():
    m = parse_descriptor("lantern backward w2l=1,0 w2r=1,2 w3l=0,0 w3r=0,2")
    assert m.backward
    assert m.w2r == (1, 2)
    w = parse_window("3:9@2+1")
    assert (w.start, w.stop, w.base, w.passes) == (3, 9, 2, 1)
    assert str(w) == "3:9@2+1"


# --- Diagram level ---
def test_cancel_remove_on_pair():
    result = apply_template_move_detailed(_load("pair.surg"), parse_descriptor("cancel-remove"), Window(0, 6))
    assert result.diagram.count == 0
    assert result.index_map.deleted == (0, 1)
    assert d3_surg(result.after) == 0


def test_slide_a_on_pair():
    d = _load("pair.surg")
    result = apply_template_move_detailed(d, parse_descriptor("slide rider=0 over=1"), Window(0, 6))
    after = result.diagram
    assert [str(e) for e in after.front.events] == ["L 1", "L 2", "X 3", "X 1", "R 2", "R 1"]
    assert after.coeffs == (-1, 1)
    assert result.after.Q == ((-2, 1), (1, 0))
    assert result.after.q == 1
    assert d3_surg(result.after) == 0
    assert result.index_map.survivors == {0: 1, 1: 0}
    assert assert_diagram_move(d, after, parse_descriptor("slide rider=0 over=1"), Window(0, 6)).ok


def test_slide_a_rejects_wrong_sign_and_coefficients():
    with pytest.raises(PatternMismatch):
        apply_template_move(_load("pair.surg"), parse_descriptor("slide sign=1"), Window(0, 6))
    flipped = surgery_from_word(PAIR_WORD, [-1, 1])
    with pytest.raises(CoefficientMismatch):
        apply_template_move(flipped, parse_descriptor("slide"), Window(0, 6))


def test_window_must_hold_the_source_side():
    with pytest.raises(PatternMismatch):
        apply_template_move(_load("pair.surg"), parse_descriptor("lantern"), Window(0, 6))
    with pytest.raises(SupportViolation):
        apply_template_move(_load("pair.surg"), parse_descriptor("cancel-remove"), Window(0, 7))


def test_nested_pair_needs_the_right_band():
    d = surgery_from_word("L1/L2/L4/X3/X3/R4/R2/R1", [-1, 1, -1])
    with pytest.raises(SupportViolation):
        apply_template_move(d, parse_descriptor("cancel-remove"), Window(1, 7, 0))
    after = apply_template_move(d, parse_descriptor("cancel-remove"), Window(1, 7, 1))
    data = linking_data(after)
    assert data.n == 1
    assert d3_surg(data) == Fraction(1, 4)


@pytest.mark.parametrize("base, ell", [(0, 1), (1, -1)])
def test_cancel_insert_threads_a_strand_of_the_unknot(base, ell):
    d = surgery_from_word("L1/R1", [-1])
    m = parse_descriptor("cancel-insert")
    window = Window(1, 1, base, 1)
    result = apply_template_move_detailed(d, m, window)
    levels = [e.level - base for e in result.diagram.front.events[1:-1]]
    assert levels == [2, 4, 3, 1, 2, 2, 1, 3, 4, 2]
    assert result.descriptor.ell == (ell,)
    assert result.after.Q == ((-2, ell, ell), (ell, 0, -1), (ell, -1, -2))
    assert result.after.r == (0, 0, 0)
    assert result.after.q == 1
    assert d3_surg(result.after) == d3_surg(result.before) == Fraction(1, 4)
    assert delta(result.after) == delta(result.before)
    assert result.index_map.created == (1, 2)
    check = assert_diagram_move(d, result.diagram, m, window)
    assert check.ok, check.failures

    back = apply_template_move_detailed(result.diagram, parse_descriptor("cancel-remove"), Window(1, 11, base, 1))
    assert back.diagram.front.events == d.front.events
    assert linking_data(back.diagram) == linking_data(d)
    assert back.index_map.deleted == (1, 2)


def test_cancel_insert_checks_the_threaded_linking():
    d = surgery_from_word("L1/R1", [-1])
    assert apply_template_move_detailed(d, parse_descriptor("cancel-insert ell=1"), Window(1, 1, 0, 1)).descriptor.ell == (1,)
    with pytest.raises(PatternMismatch):
        apply_template_move(d, parse_descriptor("cancel-insert ell=0"), Window(1, 1, 0, 1))
    with pytest.raises(PatternMismatch):
        apply_template_move(d, parse_descriptor("cancel-insert"), Window(1, 1, 0, 2))
    with pytest.raises(PatternMismatch):
        apply_template_move(d, parse_descriptor("cancel-insert knot=L1/R1"), Window(1, 1, 0, 1))


@pytest.mark.parametrize("name, text", [
    ("cancel", "cancel-remove"),
    ("slide_a", "slide"),
    ("slide_b", "slide variant=b"),
    ("slide_split", "slide variant=split sign=1"),
    ("slide_split", "slide variant=split sign=-1"),
    ("lantern", "lantern"),
    ("chain", "chain"),
])
def test_templates_apply_coherently_to_their_left_side(name, text):
    d = _left_side(name)
    m = parse_descriptor(text)
    window = Window(0, len(d.front.events))
    result = apply_template_move_detailed(d, m, window)
    assert d3_surg(result.after) == d3_surg(result.before)
    assert delta(result.after) == delta(result.before)
    check = assert_diagram_move(d, result.diagram, m, window)
    assert check.ok, check.failures


def test_lantern_backward_restores_left_side():
    left = _load("lantern_left.surg")
    right = apply_template_move(left, parse_descriptor("lantern"), Window(0, 14))
    assert signature(linking_data(right).Q) == -4
    back = apply_template_move(right, parse_descriptor("lantern backward"), Window(0, len(right.front.events)))
    assert back.front.events == left.front.events
    assert linking_data(back) == linking_data(left)


def test_assert_diagram_move_reports_wrong_after():
    d = _load("pair.surg")
    check = assert_diagram_move(d, d, parse_descriptor("slide"), Window(0, 6))
    assert not check.ok
    assert check.failures


def test_unframed_slide_keeps_framed_data():
    d = surgery_from_word(PAIR_WORD, [None, -1], unframed=[0])
    after = slide_unframed(d, rider=0, over=1, window=Window(0, 6))
    assert after.unframed == frozenset({1})
    assert linking_data(after) == linking_data(d)
    with pytest.raises(CoefficientMismatch):
        slide_unframed(_load("pair.surg"), rider=0, over=1, window=Window(0, 6))
