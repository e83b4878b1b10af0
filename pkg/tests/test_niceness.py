"""The stalled-threshold dynamic program, the regenerated table, and the
DP-guided descent, pinned against the exhaustive game-search oracle."""

from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from ulamgame.core import StrategyGap, apply_answer_type, character
from ulamgame.niceness import (
    acceptable_child,
    closing_tail,
    descent_qtype,
    in_nice_family,
    is_0typical,
    is_endgame_type,
    is_nice,
    nice_threshold,
    nice_threshold_unrestricted,
    non_nice_table,
    verify_optimal_tiny,
    win_within,
)

import oracles


@pytest.mark.parametrize("pair,expected", oracles.NICE_THRESHOLD_CASES)
def test_threshold_frozen_values(pair, expected):
    assert nice_threshold(*pair) == expected


def test_threshold_base_cases_unrestricted_too():
    assert nice_threshold_unrestricted(0, 0) == 1
    assert nice_threshold_unrestricted(1, 0) == 0
    assert nice_threshold_unrestricted(0, 1) == 0


def test_closing_tail_is_the_volume_gap():
    # smallest t3 pushing the character of (0,t1,t2,t3) above k
    for t1, t2, k in [(2, 1, 5), (4, 10, 9), (0, 0, 3), (7, 16, 8)]:
        t3 = closing_tail(t1, t2, k)
        assert character((0, t1, t2, t3)) > k
        if t3 > 0:
            assert character((0, t1, t2, t3 - 1)) <= k


def test_the_half_caps_genuinely_bind():
    # mixed questions (one side took few level-1s, many level-2s) fall
    # outside the half caps and their complements do too, so the two
    # programs may disagree; this pins the known smallest divergence
    assert nice_threshold(2, 159) == 7
    assert nice_threshold_unrestricted(2, 159) == 0


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 3), st.integers(0, 4), st.integers(0, 14))
def test_threshold_agrees_with_game_search(t1, t2, t3):
    stype = (0, t1, t2, t3)
    if sum(stype) <= 1:
        return  # trivially winnable; the DP's base value 1 is about (0,0)
    ch = oracles.oracle_character(stype)
    winnable = oracles.oracle_win(stype, ch)
    assert winnable == (t3 >= nice_threshold(t1, t2))
    assert winnable == is_nice(stype)


def test_win_within_matches_oracle_when_unpruned():
    for stype in [(0, 2, 2, 6), (0, 1, 5, 7), (0, 0, 4, 0), (0, 3, 1, 4)]:
        ch = character(stype)
        for q in (ch - 1, ch, ch + 1):
            if q < 0:
                continue
            assert win_within(stype, q, prune=False) == oracles.oracle_win(stype, q)
            assert win_within(stype, q) == oracles.oracle_win(stype, q)


@pytest.mark.parametrize("stype,depth", oracles.MINIMAX_CASES)
def test_verify_optimal_tiny(stype, depth):
    assert character(stype) == depth  # these examples sit on the volume bound
    assert is_nice(stype)
    assert verify_optimal_tiny(stype)


def test_non_nice_table_regenerates_frozen_rows():
    rows = non_nice_table(13)
    want = sorted((ch, 0, t1, t2, lo, hi)
                  for ch, t1, t2, lo, hi in oracles.NON_NICE_ROWS_EXPECTED)
    assert sorted(rows) == want


def test_table_rows_sit_on_the_volume_bound():
    # every run ends exactly where the next tail bumps the character
    for ch, t1, t2, lo, hi in oracles.NON_NICE_ROWS_EXPECTED:
        assert character((0, t1, t2, lo)) == ch
        assert character((0, t1, t2, hi)) == ch
        assert nice_threshold(t1, t2) == hi + 1


def test_0typical_and_endgame_predicates():
    assert is_0typical((0, 3, 4, 8))
    assert not is_0typical((1, 3, 4, 8))
    assert not is_0typical((0, 3, 1, 8))  # t2 must reach t1 - 1
    assert not is_0typical((0, 3, 4, 2))  # tail must reach the character
    assert is_endgame_type((1, 0, 0, 9))
    assert is_endgame_type((0, 0, 1, 5))
    assert not is_endgame_type((0, 1, 1, 0))


def test_in_nice_family():
    assert in_nice_family((0, 0, 0, 1))  # final
    assert not in_nice_family((1, 0, 3, 12))  # level-0 survivors excluded
    assert in_nice_family((0, 2, 1, 14))
    assert not in_nice_family((0, 2, 1, 13))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 5), st.integers(0, 7), st.integers(0, 30))
def test_descent_children_keep_descending(t1, t2, t3):
    stype = (0, t1, t2, t3)
    if sum(stype) <= 4 or not is_0typical(stype) or not in_nice_family(stype):
        return
    ch = character(stype)
    if ch >= 12:
        return
    qtype = descent_qtype(stype)
    assert qtype[0] == 0
    for yes in (True, False):
        child = apply_answer_type(stype, qtype, yes)
        assert character(child) < ch
        assert acceptable_child(child, ch)


def test_descent_refuses_stalled_states():
    with pytest.raises(StrategyGap):
        descent_qtype((0, 2, 1, 13))
