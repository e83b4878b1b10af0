"""State algebra for searching with up to three lies.

A search state assigns every universe element a *level*: the number of
answers it has falsified so far.  With a lie budget of three, elements
at level 4 are eliminated.  States are stored as maximal constant-level
runs (segments) around the position circle, so universe sizes up to
2**32 and beyond stay cheap; the flat elementwise view exists only in
the test oracles.

Types here are 4-tuples ``(t0, t1, t2, t3)`` counting surviving
elements per level.  The weight/volume/character arithmetic is exact
integer math throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator

StateType = tuple[int, int, int, int]
QType = tuple[int, int, int, int]
Interval = tuple[int, int]

#: number of lies tolerated; elements reaching LIES + 1 falsified answers drop out
LIES = 3


class AdmissibilityError(ValueError):
    """A requested question type violates the documented bounds."""


class SynthesisError(RuntimeError):
    """No interval realization of the requested type could be built."""


class StrategyGap(RuntimeError):
    """No perfect strategy is known from the given state."""


# ---------------------------------------------------------------------------
# binomials / weights

_MAX_CACHED = 80
_PASCAL: list[list[int]] = [[1]]
for _n in range(1, _MAX_CACHED + 1):
    _row = _PASCAL[-1]
    _PASCAL.append([1] + [_row[_i - 1] + _row[_i] for _i in range(1, _n)] + [1])


def binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    if n <= _MAX_CACHED:
        return _PASCAL[n][k]
    return comb(n, k)


@lru_cache(maxsize=None)
def level_weight(j: int, q: int) -> int:
    """Worst-case number of answer patterns a level-``j`` element can still
    produce within ``q`` remaining questions (sum of C(q, l) for l <= 3-j)."""
    if not 0 <= j <= LIES:
        raise ValueError(f"level out of range: {j}")
    return sum(binom(q, l) for l in range(0, LIES - j + 1))


def volume(stype: StateType, q: int) -> int:
    """Berlekamp volume of a state type with ``q`` questions to go."""
    if q < 0:
        raise ValueError("negative question count")
    return sum(t * level_weight(j, q) for j, t in enumerate(stype))


@lru_cache(maxsize=None)
def character(stype: StateType) -> int:
    """Least ``q`` with ``volume(stype, q) <= 2**q`` (conservation bound)."""
    q = 0
    while volume(stype, q) > 1 << q:
        q += 1
    return q


def character_exceeds(stype: StateType, q: int) -> bool:
    """True iff character(stype) > q, decided from the single volume test."""
    if q < 0:
        return True
    return volume(stype, q) > 1 << q


def n_min(m: int) -> int:
    """Questions needed to find one of 2**m objects despite up to 3 lies."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return character((1 << m, 0, 0, 0))


def support_size(stype: StateType) -> int:
    return sum(stype)


def is_final_type(stype: StateType) -> bool:
    return support_size(stype) <= 1


# ---------------------------------------------------------------------------
# type-level answer dynamics


def check_qtype(stype: StateType, qtype: QType) -> None:
    if len(qtype) != 4:
        raise AdmissibilityError(f"question type must have 4 components: {qtype}")
    for t, a in zip(stype, qtype):
        if not 0 <= a <= t:
            raise AdmissibilityError(
                f"question type {qtype} out of range for state type {stype}")


def apply_answer_type(stype: StateType, qtype: QType, yes: bool) -> StateType:
    """Child state type after asking ``qtype`` and hearing yes/no.

    On yes, elements inside the question keep their level and the rest
    move up one; on no the roles swap.  Level-4 elements are dropped.
    """
    check_qtype(stype, qtype)
    a = qtype if yes else tuple(t - x for t, x in zip(stype, qtype))
    t0, t1, t2, t3 = stype
    a0, a1, a2, a3 = a
    return (a0, a1 + (t0 - a0), a2 + (t1 - a1), a3 + (t2 - a2))


def complement_qtype(stype: StateType, qtype: QType) -> QType:
    check_qtype(stype, qtype)
    return tuple(t - a for t, a in zip(stype, qtype))  # type: ignore[return-value]


def is_balanced(stype: StateType, qtype: QType) -> bool:
    """Both children fit in one question less: the volumes at q-1 differ by
    at most one (which forces both to be at most 2**(q-1))."""
    q = character(stype)
    if q == 0:
        raise ValueError("state is final; no question needed")
    y = volume(apply_answer_type(stype, qtype, True), q - 1)
    n = volume(apply_answer_type(stype, qtype, False), q - 1)
    return abs(y - n) <= 1


# ---------------------------------------------------------------------------
# positional states


@dataclass(frozen=True)
class GameState:
    """Survivors of a search over positions ``0..n-1``.

    ``segments`` are ``(start, length, level)`` triples in increasing
    positional order; gaps between them are eliminated positions.
    Positionally adjacent segments never share a level (they would have
    been merged), though same-level segments may face each other across
    an eliminated gap or across the 0 cut.
    """

    n: int
    segments: tuple[tuple[int, int, int], ...]

    def __hash__(self) -> int:
        # states key several memo tables; hashing the segment tuple anew
        # on every lookup dominates otherwise
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.n, self.segments))
            object.__setattr__(self, "_hash", h)
        return h

    # -- derived views ----------------------------------------------------
    def state_type(self) -> StateType:
        counts = [0, 0, 0, 0]
        for _, length, level in self.segments:
            counts[level] += length
        return tuple(counts)  # type: ignore[return-value]

    def support(self) -> int:
        return sum(length for _, length, _ in self.segments)

    def is_final(self) -> bool:
        return self.support() <= 1

    def support_positions(self) -> Iterator[int]:
        for start, length, _ in self.segments:
            yield from range(start, start + length)

    def level_of(self, pos: int) -> int | None:
        for start, length, level in self.segments:
            if start <= pos < start + length:
                return level
        return None

    def sole_survivor(self) -> int:
        if self.support() != 1:
            raise ValueError("state is not down to a single element")
        start, _, _ = self.segments[0]
        return start


def make_state(n: int, segments: Iterable[tuple[int, int, int]]) -> GameState:
    """Normalize and validate a segment soup into a GameState."""
    segs = sorted((s, l, v) for s, l, v in segments if l > 0)
    merged: list[list[int]] = []
    last_end = -1
    for start, length, level in segs:
        if not 0 <= level <= LIES:
            raise ValueError(f"bad level {level}")
        if start < 0 or start + length > n:
            raise ValueError(f"segment ({start},{length}) outside universe of {n}")
        if start < last_end:
            raise ValueError("overlapping segments")
        if merged and merged[-1][0] + merged[-1][1] == start and merged[-1][2] == level:
            merged[-1][1] += length
        else:
            merged.append([start, length, level])
        last_end = start + length
    return GameState(n, tuple((s, l, v) for s, l, v in merged))


def initial_state(m: int) -> GameState:
    n = 1 << m
    return GameState(n, ((0, n, 0),))


def state_from_levels(levels: Iterable[int | None]) -> GameState:
    """Build a state from an explicit per-position level list (tests, small n).

    ``None`` or any value above LIES marks an eliminated position.
    """
    lv = list(levels)
    segs = []
    for pos, level in enumerate(lv):
        if level is None or level > LIES:
            continue
        segs.append((pos, 1, level))
    return make_state(len(lv), segs)


# ---------------------------------------------------------------------------
# interval questions against positional states


def normalize_intervals(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    """Sort, validate and fuse touching ``(lo, hi)`` inclusive intervals."""
    ivs = sorted(intervals)
    out: list[list[int]] = []
    for lo, hi in ivs:
        if lo > hi:
            raise ValueError(f"empty interval ({lo},{hi})")
        if out and lo <= out[-1][1]:
            raise ValueError("overlapping intervals")
        if out and lo == out[-1][1] + 1:
            out[-1][1] = hi
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


def apply_answer(state: GameState, intervals: Iterable[Interval],
                 yes: bool) -> GameState:
    """Positional counterpart of :func:`apply_answer_type`."""
    ivs = normalize_intervals(intervals)
    cuts: list[tuple[int, int, bool]] = []  # (start, end-exclusive, inside)
    for start, length, level in state.segments:
        end = start + length
        pos = start
        for lo, hi in ivs:
            lo = max(lo, pos)
            hi = min(hi, end - 1)
            if lo > hi:
                continue
            if lo > pos:
                cuts.append((pos, lo, False))
            cuts.append((lo, hi + 1, True))
            pos = hi + 1
        if pos < end:
            cuts.append((pos, end, False))
    new_segments = []
    idx = 0
    for start, length, level in state.segments:
        end = start + length
        while idx < len(cuts) and cuts[idx][0] < end and cuts[idx][0] >= start:
            lo, hi, inside = cuts[idx]
            idx += 1
            new_level = level if inside == yes else level + 1
            if new_level <= LIES:
                new_segments.append((lo, hi - lo, new_level))
    return make_state(state.n, new_segments)


def question_type(state: GameState, intervals: Iterable[Interval]) -> QType:
    """Per-level survivor counts inside the question."""
    ivs = normalize_intervals(intervals)
    counts = [0, 0, 0, 0]
    for start, length, level in state.segments:
        end = start + length
        for lo, hi in ivs:
            lo = max(lo, start)
            hi = min(hi, end - 1)
            if lo <= hi:
                counts[level] += hi - lo + 1
    return tuple(counts)  # type: ignore[return-value]
