"""Hand-rolled oracles the test suite trusts over the package.

Everything in this module is deliberately naive: elementwise simulation
instead of interval bookkeeping, literal binomial sums instead of cached
weight tables, and a plain exhaustive game search instead of the pruned
one in :mod:`ulamgame.niceness`.  The point is independence -- tests
compare the fast paths against these, never against themselves.

The frozen constants at the bottom were computed by hand (small cases)
or cross-checked between two independent routes before the matching
package code existed, and must not be regenerated from the package.
"""

from __future__ import annotations

import math
from functools import lru_cache

StateType = tuple[int, int, int, int]

LIES = 3


# ---------------------------------------------------------------------------
# elementwise answer simulation


def oracle_apply_levels(levels, intervals, yes):
    """Advance per-position lie counts one answer at a time.

    ``levels`` maps position -> lie count (``None`` = already out).  An
    element inside the question set is confirmed by "yes" and charged by
    "no"; outside, the reverse.  More than ``LIES`` charges eliminates.
    """
    out = []
    for pos, level in enumerate(levels):
        if level is None:
            out.append(None)
            continue
        inside = any(lo <= pos <= hi for lo, hi in intervals)
        if inside != yes:
            level = level + 1
        out.append(level if level <= LIES else None)
    return out


def oracle_type_of(levels) -> StateType:
    counts = [0, 0, 0, 0]
    for level in levels:
        if level is not None:
            counts[level] += 1
    return tuple(counts)


# ---------------------------------------------------------------------------
# volume and character, straight from the definitions


def oracle_volume(stype: StateType, q: int) -> int:
    total = 0
    for j, count in enumerate(stype):
        total += count * sum(math.comb(q, l) for l in range(LIES - j + 1))
    return total


def oracle_character(stype: StateType) -> int:
    q = 0
    while oracle_volume(stype, q) > 2 ** q:
        q += 1
    return q


# ---------------------------------------------------------------------------
# arc counting by linear scan of the support cycle


def oracle_arc_runs(cycle_levels) -> tuple[int, int, int, int]:
    """Count maximal constant runs of a circular level word, per level."""
    n = len(cycle_levels)
    counts = [0, 0, 0, 0]
    if n == 0:
        return tuple(counts)
    if all(l == cycle_levels[0] for l in cycle_levels):
        counts[cycle_levels[0]] = 1
        return tuple(counts)
    for i in range(n):
        if cycle_levels[i] != cycle_levels[i - 1]:
            counts[cycle_levels[i]] += 1
    return tuple(counts)


# ---------------------------------------------------------------------------
# exhaustive type-level game search


def _children(stype: StateType, qtype) -> tuple[StateType, StateType]:
    t0, t1, t2, t3 = stype
    a0, a1, a2, a3 = qtype
    yes = (a0, a1 + (t0 - a0), a2 + (t1 - a1), a3 + (t2 - a2))
    no = (t0 - a0, t1 - a1 + a0, t2 - a2 + a1, t3 - a3 + a2)
    return yes, no


@lru_cache(maxsize=None)
def oracle_win(stype: StateType, q: int) -> bool:
    """Can the questioner always finish within ``q`` questions?

    Tries every admissible question type.  Question types that touch
    nothing or everything are skipped: they hand back the same state
    with one question fewer, which never helps because winnability is
    monotone in the budget.
    """
    if sum(stype) <= 1:
        return True
    if q <= 0:
        return False
    t0, t1, t2, t3 = stype
    for a0 in range(t0 + 1):
        for a1 in range(t1 + 1):
            for a2 in range(t2 + 1):
                for a3 in range(t3 + 1):
                    if (a0, a1, a2, a3) == (0, 0, 0, 0):
                        continue
                    if (a0, a1, a2, a3) == stype:
                        continue
                    yes, no = _children(stype, (a0, a1, a2, a3))
                    if oracle_win(yes, q - 1) and oracle_win(no, q - 1):
                        return True
    return False


def oracle_min_depth(stype: StateType, cap: int = 16) -> int:
    """Least budget that still wins, by iterative deepening."""
    q = oracle_character(stype)  # volume bound: nothing below this can win
    while q <= cap:
        if oracle_win(stype, q):
            return q
        q += 1
    raise RuntimeError(f"no win within {cap} questions from {stype}")


# ---------------------------------------------------------------------------
# frozen expected values


#: least worst-case question counts for the power-of-two openings
N_MIN_EXPECTED = {0: 0, 1: 7, 2: 10, 3: 11, 4: 13, 6: 16, 8: 18, 12: 23, 17: 29}

#: (state type, q, q-th volume), worked by hand with Pascal rows
VOLUME_CASES = [
    ((1, 4, 6, 4), 9, 378),
    ((1, 4, 6, 4), 8, 299),
    ((16, 0, 0, 0), 4, 240),
]

#: (state type, character)
CHARACTER_CASES = [
    ((1, 4, 6, 4), 9),
    ((2, 0, 0, 0), 7),
    ((0, 0, 4, 0), 5),
    ((0, 1, 3, 5), 6),
    ((0, 1, 0, 8), 5),
    ((0, 0, 0, 1), 0),
    ((0, 0, 0, 0), 0),
]

#: (state type, exact minimax depth), hand-derived and oracle-confirmed
MINIMAX_CASES = [
    ((0, 0, 4, 0), 5),
    ((0, 0, 2, 2), 4),
    ((0, 0, 1, 2), 3),
]

#: small stalled-threshold values that were worked through by hand
NICE_THRESHOLD_CASES = [
    ((0, 0), 1),
    ((1, 0), 0),
    ((0, 1), 0),
    ((2, 1), 14),
    ((1, 5), 8),
    ((4, 10), 19),
    ((25, 30), 14),
]

#: the full 0-typical-but-stalled table: rows (ch, t1, t2, t3_lo, t3_hi),
#: every row sitting exactly on the volume bound at its character
NON_NICE_ROWS_EXPECTED = [
    (6, 1, 5, 6, 7),
    (6, 2, 1, 6, 13),
    (6, 2, 2, 6, 6),
    (7, 2, 7, 7, 14),
    (7, 3, 2, 7, 25),
    (7, 3, 3, 7, 17),
    (7, 3, 4, 7, 9),
    (8, 3, 15, 8, 10),
    (8, 4, 9, 8, 27),
    (8, 4, 10, 8, 18),
    (8, 4, 11, 8, 9),
    (8, 5, 4, 8, 35),
    (8, 5, 5, 8, 26),
    (8, 5, 6, 8, 17),
    (8, 5, 7, 8, 8),
    (9, 7, 16, 9, 30),
    (9, 7, 17, 9, 20),
    (9, 7, 18, 9, 10),
    (9, 8, 9, 9, 54),
    (9, 8, 10, 9, 44),
    (9, 8, 11, 9, 34),
    (9, 8, 12, 9, 24),
    (9, 8, 13, 9, 14),
    (9, 9, 8, 9, 18),
    (10, 13, 25, 10, 21),
    (10, 13, 26, 10, 10),
    (10, 14, 17, 10, 53),
    (10, 14, 18, 10, 42),
    (10, 14, 19, 10, 31),
    (10, 14, 20, 10, 20),
    (10, 15, 14, 10, 30),
    (10, 15, 15, 10, 19),
    (11, 25, 30, 11, 13),
]
