"""Question selection across the phases: the doubling ladder, stored
opening rows and the closed formulas behind them, the typed splitters,
tiny-support minimax, the padded twin, and the full-game drivers."""

from __future__ import annotations

import pytest

from ulamgame.core import (StrategyGap, apply_answer, apply_answer_type,
                           binom, character, initial_state, n_min, volume)
from ulamgame.questions import Question
from ulamgame.shape import is_well_shaped
from ulamgame.strategy import (
    OPENING_ROWS,
    ROWS_103N,
    GameSession,
    balanced_qtype,
    binomial_m,
    closable,
    halving_qtype,
    minimax_tiny,
    next_qtype,
    next_question,
    opening_qtype,
    opening_script,
    phantom_overlay,
    plan_step,
    qtype_103n,
    searched_qtype,
    typical_split_qtype,
)
from ulamgame.core import state_from_levels

import oracles


# ---------------------------------------------------------------------------
# stored rows


def _all_rows():
    for rows in OPENING_ROWS.values():
        yield from rows
    yield from ROWS_103N.values()


@pytest.mark.parametrize("row", list(_all_rows()),
                         ids=lambda r: f"{r[0]}-{r[4]}")
def test_stored_rows_follow_answer_dynamics(row):
    stype, qtype, yes_child, no_child, _ = row
    assert apply_answer_type(stype, qtype, True) == yes_child
    assert apply_answer_type(stype, qtype, False) == no_child


def test_rows_chain_within_each_size():
    # the main-line rows chain by yes answers: each one's yes child is
    # the next row's state (the small tables then branch to no children)
    for rows in OPENING_ROWS.values():
        for above, below in zip(rows, rows[1:]):
            if above[4] in ("abcd", "11cd"):
                assert above[2] == below[0]


def test_opening_script_unknown_size():
    with pytest.raises(StrategyGap):
        opening_script(5)


# ---------------------------------------------------------------------------
# the doubling ladder


def test_halving_walks_initial_states_down():
    # ladder from 2**m all-fresh: m halvings to the survivor profile
    stype = (16, 0, 0, 0)
    seen = []
    while (qt := halving_qtype(stype)) is not None:
        stype = apply_answer_type(stype, qt, True)
        seen.append(stype)
    assert seen == [(8, 8, 0, 0), (4, 8, 4, 0), (2, 6, 6, 2), (1, 4, 6, 4)]


def test_halving_rejects_off_ladder_states():
    assert halving_qtype((1, 4, 6, 4)) is None       # level-0 already single
    assert halving_qtype((2, 3, 0, 0)) is None       # odd component
    assert halving_qtype((3, 3, 0, 0)) is None       # not a power of two
    assert halving_qtype((2, 2, 2, 0)) is None       # level 2 off profile


def test_halving_no_child_mirrors_yes_child():
    stype = (8, 8, 0, 0)
    qt = halving_qtype(stype)
    assert apply_answer_type(stype, qt, True) == apply_answer_type(stype, qt, False)


# ---------------------------------------------------------------------------
# balanced splitting


def test_balanced_split_lands_both_children_in_budget():
    stype = (0, 4, 4, 5)
    q = character(stype)
    qt, flipped = balanced_qtype(stype)
    assert not flipped
    half = 1 << (q - 1)
    for yes in (True, False):
        assert volume(apply_answer_type(stype, qt, yes), q - 1) <= half


def test_balanced_split_alternates_rounding():
    qt, _ = balanced_qtype((0, 5, 3, 40))
    # first odd count rounds up, the next rounds down
    assert qt[1] == 3 and qt[2] == 1


def test_balanced_split_exceptional_state_raises():
    with pytest.raises(StrategyGap):
        balanced_qtype((1, 0, 3, 7))


# ---------------------------------------------------------------------------
# opening formulas


@pytest.mark.parametrize("m", [8, 12, 17])
def test_opening_formulas_reproduce_the_stored_rows(m):
    # the stored openings for these sizes sit exactly on the formulas
    for stype, qtype, _, _, tag in opening_script(m):
        if tag in ("abcd", "11cd", "102d"):
            assert opening_qtype(stype) == qtype


def test_opening_formula_unscripted_size():
    # a binomial survivor with no stored table: children must both be a
    # character down and within the next volume budget
    stype = (1, 40, binom(40, 2), binom(40, 3))
    ch = character(stype)
    qt = opening_qtype(stype)
    assert qt[0] == 1 and qt[1] == 20
    for yes in (True, False):
        child = apply_answer_type(stype, qt, yes)
        assert volume(child, ch - 1) <= 1 << (ch - 1)


def test_opening_rejects_foreign_states():
    with pytest.raises(StrategyGap):
        opening_qtype((0, 4, 4, 5))
    with pytest.raises(StrategyGap):
        opening_qtype((1, 0, 3, 9))


# ---------------------------------------------------------------------------
# the (1,0,3,n) ladder


@pytest.mark.parametrize("n", [7, 8, 9])
def test_ladder_uses_stored_rows_below_the_formula_range(n):
    assert qtype_103n((1, 0, 3, n)) == ROWS_103N[n][1]


@pytest.mark.parametrize("n", [10, 11, 12, 20, 50, 200])
def test_ladder_formula_drops_the_character(n):
    stype = (1, 0, 3, n)
    ch = character(stype)
    qt = qtype_103n(stype)
    assert qt[:3] == (1, 0, 0)
    for yes in (True, False):
        child = apply_answer_type(stype, qt, yes)
        assert volume(child, ch - 1) <= 1 << (ch - 1)


# ---------------------------------------------------------------------------
# typed splitter for large characters


@pytest.mark.parametrize("stype", [
    (0, 8, 40, 137),     # even/even
    (0, 7, 45, 137),     # odd level 1, wide level 2
    (0, 8, 41, 140),     # odd level 2
    (0, 9, 41, 160),     # both odd
    (0, 4, 3, 230),      # narrow level 2, quadratic level-3 case
    (0, 5, 4, 260),
])
def test_typical_split_keeps_children_typical_and_cheaper(stype):
    ch = character(stype)
    qt = typical_split_qtype(stype)
    for yes in (True, False):
        child = apply_answer_type(stype, qt, yes)
        assert character(child) < ch


def test_typical_split_rejects_atypical_states():
    with pytest.raises(StrategyGap):
        typical_split_qtype((1, 4, 6, 4))


# ---------------------------------------------------------------------------
# tiny-support minimax


def _worst_depth(state, overlay=None):
    if state.is_final():
        return 0
    step = plan_step(state, overlay)
    worst = 0
    for yes in (True, False):
        child = apply_answer(state, step.real_intervals, yes)
        twin = (step.overlay.child(step.padded_question, yes)
                if step.padded_question is not None and step.overlay is not None
                else step.overlay)
        worst = max(worst, _worst_depth(child, twin))
    return worst + 1


@pytest.mark.parametrize("levels,depth", [
    ((2, 2, 2, 2), 5),
    ((2, 2, 3, 3), 4),
    ((2, 3, 3), 3),
])
def test_minimax_games_close_at_the_oracle_depth(levels, depth):
    state = state_from_levels(levels)
    assert oracles.oracle_min_depth(state.state_type()) == depth
    assert _worst_depth(state) == depth


def test_minimax_question_is_positional_and_admissible():
    state = state_from_levels((1, None, 2, 3))
    q = minimax_tiny(state)
    assert isinstance(q, Question)
    covered = set()
    for lo, hi in q.intervals:
        covered.update(range(lo, hi + 1))
    assert covered <= set(state.support_positions())


def test_minimax_needs_a_small_support():
    with pytest.raises(StrategyGap):
        minimax_tiny(state_from_levels((0, 0, 0, 0, 0)))


# ---------------------------------------------------------------------------
# dispatcher gating


def test_dispatcher_overrides_the_unclosable_stored_row():
    # the stored size-8 row at (1,4,14,40) sends its no child into a
    # state the stall tables rule out; the dispatcher swaps in a
    # same-shaped searched question whose children both close
    scripted = dict((r[0], r[1]) for r in opening_script(8))
    assert scripted[(1, 4, 14, 40)] == (1, 1, 5, 36)
    repaired = next_qtype((1, 4, 14, 40))
    assert repaired == (1, 1, 7, 20)
    ch = character((1, 4, 14, 40))
    for yes in (True, False):
        assert closable(apply_answer_type((1, 4, 14, 40), repaired, yes), ch - 1)


def test_dispatcher_keeps_rows_that_close():
    for m in (1, 4, 8):
        for stype, qtype, _, _, _ in opening_script(m):
            if stype == (1, 4, 14, 40):
                continue
            assert next_qtype(stype) == qtype


def test_searched_qtype_closes_both_children():
    qt = searched_qtype((0, 1, 3, 4))
    assert qt is not None
    ch = character((0, 1, 3, 4))
    for yes in (True, False):
        assert closable(apply_answer_type((0, 1, 3, 4), qt, yes), ch - 1)


def test_closable_small_cases():
    assert closable((0, 0, 0, 1), 0)
    assert closable((2, 0, 0, 0), 7)
    assert not closable((2, 0, 0, 0), 6)


# ---------------------------------------------------------------------------
# the padded twin


def _survivor_session(m: int) -> GameSession:
    session = GameSession(initial_state(m))
    while binomial_m(session.state.state_type()) is None:
        session.step()
        session.answer(True)
    return session


def test_phantom_twin_pads_to_the_covering_script():
    session = _survivor_session(6)
    real = session.state
    assert real.state_type() == (1, 6, 15, 20)
    overlay = phantom_overlay(real)
    assert overlay.padded.state_type() == (1, 8, 28, 56)
    assert character(overlay.padded.state_type()) == character(real.state_type())
    assert is_well_shaped(overlay.padded)


def test_phantom_coordinates_roundtrip():
    overlay = phantom_overlay(_survivor_session(6).state)
    real = sorted(_survivor_session(6).state.support_positions())
    mapped = [overlay.to_padded(p) for p in real]
    assert mapped == sorted(mapped) and len(set(mapped)) == len(mapped)
    for p, q in zip(real, mapped):
        assert overlay._floor_real(q) == p
    full = ((0, overlay.padded.n - 1),)
    n = _survivor_session(6).state.n
    assert overlay.restrict(full) == ((0, n - 1),)


def test_phantom_only_question_parts_drop_out():
    overlay = phantom_overlay(_survivor_session(6).state)
    start, added = overlay.steps[0]
    # the first padding run occupies [start, start + added) in padded coords
    assert overlay.restrict(((start, start + added - 1),)) == ()


def test_plan_step_threads_the_twin():
    session = _survivor_session(6)
    step = session.step()
    assert step.overlay is not None and step.padded_question is not None
    assert step.real_intervals == step.overlay.restrict(step.padded_question.intervals)
    # the twin's own walk stays consistent under both answers
    for yes in (True, False):
        twin = step.overlay.child(step.padded_question, yes)
        assert twin.padded.state_type() == apply_answer_type(
            step.overlay.padded.state_type(),
            step.padded_question.type_in(step.overlay.padded), yes)


def test_next_question_refuses_twin_states():
    with pytest.raises(StrategyGap):
        next_question(_survivor_session(6).state)


# ---------------------------------------------------------------------------
# whole games


@pytest.mark.parametrize("m", [0, 1, 2])
def test_session_decides_every_answer_path_on_budget(m):
    budget = n_min(m)

    def walk(session_state, overlay, depth):
        assert depth <= budget
        if session_state.is_final():
            return
        step = plan_step(session_state, overlay)
        for yes in (True, False):
            child = apply_answer(session_state, step.real_intervals, yes)
            twin = (step.overlay.child(step.padded_question, yes)
                    if step.padded_question is not None and step.overlay is not None
                    else step.overlay)
            if not child.is_final():
                assert is_well_shaped(child)
            walk(child, twin, depth + 1)

    walk(initial_state(m), None, 0)


def test_session_driver_tracks_answers():
    session = GameSession(initial_state(1))
    while session.step() is not None:
        session.answer(False)
    assert session.plies <= n_min(1)
    assert session.state.is_final()
    with pytest.raises(StrategyGap):
        session.answer(True)
