"""Which states close in exactly their character many questions.

A state type is *nice* when some questioning strategy finishes it
within its character.  For types with nothing at level 0 the boundary
is a threshold in the level-3 count: ``(0, t1, t2, t3)`` is nice
exactly when ``t3`` reaches ``nice_threshold(t1, t2)``.  The threshold
recursion minimizes, over first questions that take at most half of
each of the two live levels, the least closing tail that pushes the
character past every continuation's needs; an unrestricted variant
allows any first question and lands on the same values.

``win_within`` is the direct game search used to cross-check all of
this, and ``descent_qtype`` picks the concrete question the strategy
asks inside this family.
"""
from __future__ import annotations

import sys
from functools import lru_cache
from typing import Callable

# threshold recursions chain through long strictly-decreasing pair sequences
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))

from .core import (QType, StateType, StrategyGap, apply_answer_type, character,
                   character_exceeds, is_final_type, level_weight, support_size,
                   volume)


def is_0typical(stype: StateType) -> bool:
    """Nothing at level 0, level 2 at least one short of level 1, and a
    level-3 count no smaller than the character."""
    t0, t1, t2, t3 = stype
    return t0 == 0 and t2 >= t1 - 1 and t3 >= character(stype)


def is_endgame_type(stype: StateType) -> bool:
    """At most one element below level 3."""
    t0, t1, t2, _ = stype
    return t0 + t1 + t2 <= 1


# ---------------------------------------------------------------------------
# threshold recursion


def _pair_children(t1: int, t2: int, a1: int, a2: int
                   ) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    """(level-1, level-2, new level-3) counts of both children of
    ``(0, t1, t2, *)`` under a question taking (a1, a2) and no level-3."""
    yes = (a1, t1 - a1 + a2, t2 - a2)
    no = (t1 - a1, a1 + t2 - a2, a2)
    return yes, no


def closing_tail(t1: int, t2: int, k: int) -> int:
    """Least t3 pushing character((0, t1, t2, t3)) beyond ``k``."""
    need = (1 << k) + 1 - t1 * level_weight(1, k) - t2 * level_weight(2, k)
    return max(0, need)


def min_closing_tail(t1: int, t2: int, a1: int, a2: int) -> int:
    """Least closing tail covering both children and their recursive
    thresholds, for one candidate first question."""
    k = _candidate_ceiling(t1, t2, a1, a2, nice_threshold)
    return closing_tail(t1, t2, k)


def _candidate_ceiling(t1: int, t2: int, a1: int, a2: int,
                       threshold: Callable[[int, int], int]) -> int:
    (y1, y2, y3), (n1, n2, n3) = _pair_children(t1, t2, a1, a2)
    k = character((0, y1, y2, y3))
    k = max(k, character((0, n1, n2, n3)))
    k = max(k, character((0, y1, y2, threshold(y1, y2))))
    k = max(k, character((0, n1, n2, threshold(n1, n2))))
    return k


def _threshold(t1: int, t2: int, cap1: int, cap2: int,
               threshold: Callable[[int, int], int]) -> int:
    if (t1, t2) == (0, 0):
        return 1
    if t1 + t2 == 1:
        return 0
    # The least achievable ceiling fixes the threshold: closing_tail is
    # monotone in k.  Both children's volumes sum to a candidate-free
    # total, which floors max of their characters and lets the scan stop
    # as soon as a balanced candidate attains it.
    floor_k = 0
    total = lambda q: (t1 * level_weight(1, q) + (t1 + t2) * level_weight(2, q)
                       + t2 * level_weight(3, q))
    while total(floor_k) > 1 << (floor_k + 1):
        floor_k += 1
    best: int | None = None
    order1 = sorted(range(cap1 + 1), key=lambda a: abs(2 * a - t1))
    order2 = sorted(range(cap2 + 1), key=lambda a: abs(2 * a - t2))
    for a1 in order1:
        for a2 in order2:
            yes, no = _pair_children(t1, t2, a1, a2)
            if yes[:2] == (t1, t2) or no[:2] == (t1, t2):
                continue  # no progress; measure argument needs the exclusion
            k = _candidate_ceiling(t1, t2, a1, a2, threshold)
            if best is None or k < best:
                best = k
                if best <= floor_k:
                    return closing_tail(t1, t2, best)
    if best is None:
        raise StrategyGap(f"no admissible split for level pair ({t1}, {t2})")
    return closing_tail(t1, t2, best)


@lru_cache(maxsize=None)
def nice_threshold(t1: int, t2: int) -> int:
    """Least level-3 count making ``(0, t1, t2, t3)`` nice, with first
    questions limited to at most half of each live level (rounded up)."""
    return _threshold(t1, t2, (t1 + 1) // 2, (t2 + 1) // 2, nice_threshold)


@lru_cache(maxsize=None)
def nice_threshold_unrestricted(t1: int, t2: int) -> int:
    """Same recursion with the first question unrestricted."""
    return _threshold(t1, t2, t1, t2, nice_threshold_unrestricted)


def in_nice_family(stype: StateType) -> bool:
    """Membership in the closed nice family for level-0-free types."""
    t0, t1, t2, t3 = stype
    if is_final_type(stype):
        return True
    if t0 != 0:
        return False
    return t3 >= nice_threshold(t1, t2)


# ---------------------------------------------------------------------------
# direct game search


def _qtype_candidates(stype: StateType, q: int, prune: bool):
    """Question types worth trying, balanced level-3 component first.

    The level-3 take is boxed by requiring both children to satisfy the
    volume bound at q-1 (their volumes move oppositely and linearly in
    a3), which is where almost all of the pruning power lives.
    """
    t0, t1, t2, t3 = stype
    half = 1 << (q - 1) if q >= 1 else 0
    for a0 in range(t0 + 1):
        for a1 in range(t1 + 1):
            for a2 in range(t2 + 1):
                base = (a0, a1, a2, 0)
                if prune:
                    vy = volume(apply_answer_type(stype, base, True), q - 1)
                    vn = volume(apply_answer_type(stype, base, False), q - 1)
                    # vy grows and vn shrinks by one per extra level-3 take
                    lo = max(0, vn - half)
                    hi = min(t3, half - vy)
                    if lo > hi:
                        continue
                else:
                    lo, hi = 0, t3
                mid = (lo + hi) // 2
                for a3 in sorted(range(lo, hi + 1), key=lambda a: abs(a - mid)):
                    yield (a0, a1, a2, a3)


def win_within(stype: StateType, q: int, prune: bool = True) -> bool:
    """Can play from ``stype`` always finish within ``q`` questions?

    With ``prune`` the search discards branches by the volume bound;
    without it the same game tree is explored bare, which is the honest
    way to confirm a lower bound.
    """
    return _win(tuple(stype), q, prune)


@lru_cache(maxsize=None)
def _win(stype: StateType, q: int, prune: bool) -> bool:
    if is_final_type(stype):
        return True
    if q <= 0:
        return False
    if prune and character_exceeds(stype, q):
        return False
    full = stype
    for qtype in _qtype_candidates(stype, q, prune):
        if qtype == (0, 0, 0, 0) or qtype == full:
            continue
        yes = apply_answer_type(stype, qtype, True)
        no = apply_answer_type(stype, qtype, False)
        if _win(yes, q - 1, prune) and _win(no, q - 1, prune):
            return True
    return False


def is_nice(stype: StateType) -> bool:
    return win_within(stype, character(stype))


def winning_qtypes(stype: StateType, q: int):
    """Yield question types both of whose children stay winnable within
    ``q - 1``, in the pruned search's balanced-first order."""
    for qtype in _qtype_candidates(stype, q, True):
        if qtype == (0, 0, 0, 0) or qtype == tuple(stype):
            continue
        yes = apply_answer_type(stype, qtype, True)
        no = apply_answer_type(stype, qtype, False)
        if _win(yes, q - 1, True) and _win(no, q - 1, True):
            yield qtype


def verify_optimal_tiny(stype: StateType) -> bool:
    """Confirm by bare search that one question fewer cannot suffice."""
    ch = character(stype)
    if ch == 0:
        return True
    return not win_within(stype, ch - 1, prune=False)


# ---------------------------------------------------------------------------
# the published exception table


def non_nice_table(max_ch: int = 13) -> list[tuple[int, int, int, int, int, int]]:
    """All 0-typical non-nice types with character up to ``max_ch``,
    grouped into rows ``(ch, 0, t1, t2, t3_min, t3_max)`` over
    consecutive level-3 counts."""
    rows: list[tuple[int, int, int, int, int, int]] = []
    t1 = 0
    while True:
        t2 = max(0, t1 - 1)
        t3 = _least_typical_tail(t1, t2)
        if character((0, t1, t2, t3)) > max_ch:
            break  # volume only grows with t1 from here on
        while True:
            t3 = _least_typical_tail(t1, t2)
            if character((0, t1, t2, t3)) > max_ch:
                break
            threshold = nice_threshold(t1, t2)
            run: list[tuple[int, int]] = []  # (t3, ch) of non-nice members
            while t3 < threshold:
                ch = character((0, t1, t2, t3))
                if ch > max_ch:
                    break
                if t1 + t2 + t3 > 1:  # final states close for free
                    run.append((t3, ch))
                t3 += 1
            for lo, hi, ch in _split_runs(run):
                rows.append((ch, 0, t1, t2, lo, hi))
            t2 += 1
        t1 += 1
    rows.sort()
    return rows


def _least_typical_tail(t1: int, t2: int) -> int:
    t3 = character((0, t1, t2, 0))
    while t3 < character((0, t1, t2, t3)):
        t3 += 1
    return t3


def _split_runs(run: list[tuple[int, int]]):
    i = 0
    while i < len(run):
        j = i
        while (j + 1 < len(run) and run[j + 1][1] == run[i][1]
               and run[j + 1][0] == run[j][0] + 1):
            j += 1
        yield run[i][0], run[j][0], run[i][1]
        i = j + 1


# ---------------------------------------------------------------------------
# in-family descent


def acceptable_child(stype: StateType, parent_ch: int) -> bool:
    """A child the strategy knows how to continue from, one cheaper.

    Above character 11 that means 0-typical; below, anything over the
    niceness threshold qualifies (at these characters nice states stay
    winnable with four-interval questions, 0-typical or not).
    """
    if character(stype) >= parent_ch:
        return False
    if support_size(stype) <= 4:
        # character can understate the true depth on tiny states (three
        # one-mistake-left elements need an extra question), so ask the
        # exact search
        return win_within(stype, parent_ch - 1)
    if is_endgame_type(stype):
        return True
    t0, t1, t2, t3 = stype
    if t0 == 1 and t1 == 0 and t2 == 3 and t3 >= 7:
        return True
    if t0 != 0:
        return False
    if character(stype) >= 12:
        return t2 >= t1 - 1 and t3 >= character(stype)
    return t3 >= nice_threshold(t1, t2)


@lru_cache(maxsize=None)
def descent_qtype(stype: StateType) -> QType:
    """Lexicographically least question type whose two children both stay
    acceptable, levels 1 and 2 limited to half takes.

    The level-3 component is scanned only over the stretch where both
    children keep a character drop, read off the two opposed linear
    volume constraints.
    """
    t0, t1, t2, t3 = stype
    if t0 != 0:
        raise StrategyGap(f"descent expects an empty level 0: {stype}")
    ch = character(stype)
    half = 1 << (ch - 1)
    for a1 in range((t1 + 1) // 2 + 1):
        for a2 in range((t2 + 1) // 2 + 1):
            base = (0, a1, a2, 0)
            vy = volume(apply_answer_type(stype, base, True), ch - 1)
            vn = volume(apply_answer_type(stype, base, False), ch - 1)
            lo = max(0, vn - half)
            hi = min(t3, half - vy)
            for a3 in range(lo, hi + 1):
                qtype = (0, a1, a2, a3)
                if qtype == (0, 0, 0, 0) or qtype == stype:
                    continue
                yes = apply_answer_type(stype, qtype, True)
                no = apply_answer_type(stype, qtype, False)
                if acceptable_child(yes, ch) and acceptable_child(no, ch):
                    return qtype
    raise StrategyGap(f"no in-family descent from {stype}")
