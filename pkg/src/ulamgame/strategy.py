"""Game-long question selection.

The dispatcher strings together the playbook's phases: exact halving
down to the binomial survivor profile, scripted opening rows for the
listed sizes, formula-driven openings for large sizes, typed splitters
for states with an empty level 0, the ``(1,0,3,n)`` ladder, the
one-interval endgame, and exhaustive minimax once four or fewer
candidates remain.

Opening scripts are kept verbatim in ``OPENING_ROWS``.  At characters
small enough for exact search the dispatcher double-checks each planned
question one step ahead and, when a continuation cannot close on
budget, swaps in a searched question instead.  That net exists because
the second row of the size-8 script sends the no-answer into a state
the niceness tables rule out; the search replaces it with a question
of the same scripted shape whose children both close.

Sizes ``6..32`` without a script are driven through a phantom twin:
the state is padded with never-guessed elements inside existing arcs
up to the next scripted size of equal character, the script runs on
the padded twin, and every question is restricted back to the real
universe (``plan_step`` threads the twin; ``GameSession`` holds it for
interactive callers).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import NamedTuple

from .core import (GameState, Interval, QType, StateType, StrategyGap,
                   apply_answer, apply_answer_type, binom, character,
                   is_final_type, make_state, support_size, volume)
from .niceness import (descent_qtype, is_0typical, nice_threshold, win_within,
                       winning_qtypes)
from .questions import Question
from .shape import is_well_shaped
from .synthesis import realize, synth_endgame

# ---------------------------------------------------------------------------
# opening scripts (row = state type, question type, yes child, no child, tag)

Row = tuple[StateType, QType, StateType, StateType, str]

OPENING_ROWS: dict[int, tuple[Row, ...]] = {
    1: (
        ((1, 1, 0, 0), (1, 0, 0, 0), (1, 0, 1, 0), (0, 2, 0, 0), "direct"),
        ((1, 0, 1, 0), (1, 0, 0, 0), (1, 0, 0, 1), (0, 1, 1, 0), "direct"),
        ((0, 2, 0, 0), (0, 1, 0, 0), (0, 1, 1, 0), (0, 1, 1, 0), "direct"),
        ((0, 1, 1, 0), (0, 1, 0, 0), (0, 1, 0, 1), (0, 0, 2, 0), "direct"),
    ),
    4: (
        ((1, 4, 6, 4), (1, 1, 3, 2), (1, 1, 6, 5), (0, 4, 4, 5), "11cd"),
        ((1, 1, 6, 5), (1, 0, 2, 3), (1, 0, 3, 7), (0, 2, 4, 4), "102d"),
        ((0, 4, 4, 5), (0, 2, 2, 3), (0, 2, 4, 5), (0, 2, 4, 4), "0bcd"),
        ((0, 2, 4, 4), (0, 1, 2, 2), (0, 1, 3, 4), (0, 1, 3, 4), "0bcd"),
        ((0, 2, 4, 5), (0, 1, 2, 3), (0, 1, 3, 5), (0, 1, 3, 4), "0bcd"),
        ((0, 1, 3, 4), (0, 1, 0, 4), (0, 1, 0, 7), (0, 0, 4, 0), "0bcd"),
        ((0, 1, 3, 5), (0, 1, 0, 5), (0, 1, 0, 8), (0, 0, 4, 0), "0bcd"),
    ),
    8: (
        ((1, 8, 28, 56), (1, 4, 10, 22), (1, 4, 14, 40), (0, 5, 22, 44), "abcd"),
        ((1, 4, 14, 40), (1, 1, 5, 36), (1, 1, 8, 45), (0, 4, 10, 9), "11cd"),
        ((1, 1, 8, 45), (1, 0, 2, 29), (1, 0, 3, 35), (0, 2, 6, 18), "102d"),
    ),
    12: (
        ((1, 12, 66, 220), (1, 6, 27, 110), (1, 6, 33, 149), (0, 7, 45, 137), "abcd"),
        ((1, 6, 33, 149), (1, 1, 13, 136), (1, 1, 18, 156), (0, 6, 21, 26), "11cd"),
        ((1, 1, 18, 156), (1, 0, 2, 120), (1, 0, 3, 136), (0, 2, 16, 38), "102d"),
    ),
    17: (
        ((1, 17, 136, 680), (1, 8, 60, 373), (1, 8, 69, 449), (0, 10, 84, 367), "abcd"),
        # no-child corrected; the printed cell repeats the next row's
        ((1, 8, 69, 449), (1, 1, 30, 344), (1, 1, 37, 383), (0, 8, 40, 135), "11cd"),
        ((1, 1, 37, 383), (1, 0, 2, 316), (1, 0, 3, 351), (0, 2, 35, 69), "102d"),
    ),
    23: (
        ((1, 23, 253, 1771), (1, 11, 115, 946), (1, 11, 127, 1084), (0, 13, 149, 940), "abcd"),
        ((1, 11, 127, 1084), (1, 1, 58, 767), (1, 1, 68, 836), (0, 11, 70, 375), "11cd"),
        ((1, 1, 68, 836), (1, 0, 2, 700), (1, 0, 3, 766), (0, 2, 66, 138), "102d"),
    ),
    32: (
        ((1, 32, 496, 4960), (1, 16, 232, 2545), (1, 16, 248, 2809), (0, 17, 280, 2647), "abcd"),
        ((1, 16, 248, 2809), (1, 1, 116, 1852), (1, 1, 131, 1984), (0, 16, 133, 1073), "11cd"),
        ((1, 1, 131, 1984), (1, 0, 2, 1635), (1, 0, 3, 1764), (0, 2, 129, 351), "102d"),
    ),
}

#: rows of the (1,0,3,n) ladder for the three sizes below the formula range
ROWS_103N: dict[int, Row] = {
    7: ((1, 0, 3, 7), (1, 0, 0, 2), (1, 0, 0, 5), (0, 1, 3, 5), "100d"),
    8: ((1, 0, 3, 8), (1, 0, 0, 3), (1, 0, 0, 6), (0, 1, 3, 5), "100d"),
    9: ((1, 0, 3, 9), (1, 0, 0, 4), (1, 0, 0, 7), (0, 1, 3, 5), "100d"),
}

def opening_script(m: int) -> tuple[Row, ...]:
    """The scripted opening rows for a listed size."""
    try:
        return OPENING_ROWS[m]
    except KeyError:
        raise StrategyGap(f"no scripted opening for size {m}") from None


def _merged_script() -> dict[StateType, QType]:
    merged: dict[StateType, QType] = {}
    for rows in OPENING_ROWS.values():
        for stype, qtype, _, _, _ in rows:
            assert merged.setdefault(stype, qtype) == qtype
    return merged


_SCRIPT = _merged_script()


# ---------------------------------------------------------------------------
# state-pattern probes


def binomial_m(stype: StateType) -> int | None:
    """The m with stype == (1, m, m-choose-2, m-choose-3), if any."""
    t0, t1, t2, t3 = stype
    if t0 != 1 or t2 != binom(t1, 2) or t3 != binom(t1, 3):
        return None
    return t1


def halving_qtype(stype: StateType) -> QType | None:
    """Componentwise halves while every count is a multiple of the
    level-0 power of two (the doubling ladder of initial states)."""
    t0 = stype[0]
    if t0 < 2 or t0 & (t0 - 1) or any(v % t0 for v in stype):
        return None
    j = stype[1] // t0
    if stype[2] != binom(j, 2) * t0 or stype[3] != binom(j, 3) * t0:
        return None
    return (t0 // 2, stype[1] // 2, stype[2] // 2, stype[3] // 2)


# ---------------------------------------------------------------------------
# volume-balanced splitting


def balanced_qtype(stype: StateType, q: int | None = None) -> tuple[QType, bool]:
    """Half-split of levels 0..2 plus the level-3 count that minimizes
    the children's next-volume gap.

    Odd counts alternate ceiling/floor from level 0 up.  Of the split
    and its complement, the one taking fewer level-3 elements is
    returned, with a flag saying the complement won.  When neither
    variant's level-3 count is realizable the split fails (these are
    the finitely many exceptional states of the asymptotic argument).
    """
    t0, t1, t2, t3 = stype
    if t0 + t1 + t2 <= 1:
        raise StrategyGap(f"balanced split expects two live low levels: {stype}")
    if q is None:
        q = character(stype)
    qh = q - 1
    lows = []
    ceil_turn = True
    for t in (t0, t1, t2):
        if t % 2:
            lows.append((t + 1) // 2 if ceil_turn else t // 2)
            ceil_turn = not ceil_turn
        else:
            lows.append(t // 2)
    drift = sum((t - 2 * a) * binom(qh, 3 - j)
                for j, (t, a) in enumerate(zip((t0, t1, t2), lows)))
    options = []
    for tail, flip in (((t3 + drift) // 2, False), ((t3 - drift) // 2, True)):
        if 0 <= tail <= t3:
            options.append((tail, flip))
    if not options:
        raise StrategyGap(f"no balanced level-3 take for {stype} at budget {q}")
    tail, flip = min(options)
    if flip:
        return (t0 - lows[0], t1 - lows[1], t2 - lows[2], tail), True
    return (lows[0], lows[1], lows[2], tail), False


def _tail_window(stype: StateType, prefix: tuple[int, int, int],
                 cap: int, q: int) -> tuple[int, int, int]:
    """Level-3 takes keeping both children's q-volume within budget,
    plus the volume-balancing point of that window."""
    base = prefix + (0,)
    vy = volume(apply_answer_type(stype, base, True), q)
    vn = volume(apply_answer_type(stype, base, False), q)
    lo = max(0, vn - (1 << q))
    hi = min(cap, (1 << q) - vy)
    return lo, hi, (vn - vy) // 2


def _settle_tail(stype: StateType, prefix: tuple[int, int, int],
                 proposal: int, cap: int) -> int:
    """The proposed level-3 take if it keeps both children a character
    down, else the volume-balancing take clamped into the window that
    does."""
    q = character(stype) - 1
    lo, hi, balance = _tail_window(stype, prefix, cap, q)
    if lo > hi:
        raise StrategyGap(
            f"no level-3 take after {list(prefix)} splits {stype} evenly")
    if lo <= proposal <= hi:
        return proposal
    return min(max(balance, lo), hi)


# ---------------------------------------------------------------------------
# scripted-opening stage rules (sizes beyond the stored tables)


def opening_qtype(stype: StateType) -> QType:
    """Next opening question for survivor states ``(1,b,c,d)``.

    Three stages, recognized by shape: the full binomial profile, the
    ``b >= 2`` middle, and the ``b == 1`` tail.  Each stage halves the
    two live low levels and sets the level-3 take by a closed formula;
    the take is re-balanced whenever the formula's value would let a
    child keep its character.
    """
    t0, b, c, d = stype
    if t0 != 1:
        raise StrategyGap(f"opening rules expect a level-0 survivor: {stype}")
    ch = character(stype)
    fb, fc = b // 2, c // 2
    if b >= 2:
        if binomial_m(stype) is not None:
            fq = ch - 2
            alpha = (d + 2 * fc - c - 2 * fb - binom(fq + 1, 3)
                     + binom(fq + 1, 2) * (b + 1 - 2 * fb)
                     + (fq + 2) * (c + 4 * fb - b - 2 * fc))
            prefix, proposal, cap = (1, fb, fc - fb), alpha // 2, (2 * d + 2) // 3
        else:
            fq = ch - 1
            beta = ((b - 1) * binom(fq, 2) - binom(fq, 3)
                    + (fq + 1) * (c + 2 - b + 2 * fb - 2 * fc)
                    + d - c + 2 * fc - 2 * fb)
            prefix, proposal, cap = (1, 1, fc - fb), beta // 2, d
    elif b == 1 and c >= 2:
        fq = ch
        proposal = (d + 4 - c - binom(fq - 1, 3) + 2 * binom(fq - 1, 2)
                    + fq * (c - 5)) // 2
        prefix, cap = (1, 0, 2), d
    else:
        raise StrategyGap(f"no opening stage matches {stype}")
    if not all(0 <= take <= have for take, have in zip(prefix, (t0, b, c))):
        raise StrategyGap(f"opening prefix {prefix} does not fit {stype}")
    return prefix + (_settle_tail(stype, prefix, proposal, cap),)


def qtype_103n(stype: StateType) -> QType:
    """The ladder question for ``(1,0,3,n)``: the three stored rows,
    then the volume-balancing single-survivor take."""
    t0, t1, t2, n = stype
    if (t0, t1, t2) != (1, 0, 3) or n < 7:
        raise StrategyGap(f"ladder expects (1,0,3,n) with n >= 7: {stype}")
    if n <= 9:
        return ROWS_103N[n][1]
    qh = character(stype) - 1
    x = (n + 3 * qh - binom(qh, 3)) // 2
    if not 0 <= x <= n:
        raise StrategyGap(f"ladder take {x} out of range for {stype}")
    return (1, 0, 0, x)


# ---------------------------------------------------------------------------
# typed splitter for 0-typical states of large character


def typical_split_qtype(stype: StateType) -> QType:
    """Parity-cased half-split keeping both children 0-typical and a
    character down; the two case families need a wide level 2 or a
    quadratically wide level 3."""
    if not is_0typical(stype):
        raise StrategyGap(f"splitter needs a 0-typical state: {stype}")
    _, t1, t2, t3 = stype
    k = character(stype)
    h1, h2 = t1 // 2, t2 // 2
    if k >= 3 and t2 >= 3 * k - 3:
        if t1 % 2 == 0 and t2 % 2 == 0:
            qt = (0, h1, h2, t3 // 2)
        elif t1 % 2 == 0:
            qt = (0, h1, h2, (t3 + k - 1) // 2)
        else:
            spread = (k * k - k + 2) // (2 * (k - 1))
            if t2 % 2 == 0:
                b1 = spread // 2
                t = (2 * b1 + 1) * (k - 1) - (k * k - k + 2) // 2
            else:
                b1 = (spread + 1) // 2
                t = 2 * b1 * (k - 1) - (k * k - k + 2) // 2
            qt = (0, t1 - h1, t2 - (h2 + b1), t3 - (t3 - t - 1) // 2)
    elif k >= 4 and t3 >= k * k:
        if t1 % 2 == 0 and t2 % 2 == 0:
            qt = (0, h1, h2, t3 // 2)
        elif t1 % 2 == 0:
            qt = (0, h1, h2, (t3 + k - 1) // 2)
        elif t2 % 2 == 0:
            qt = (0, h1, h2, (t3 + (k - 1) * (k - 2) // 2) // 2)
        else:
            qt = (0, t1 - h1, t2 - (t2 + 1) // 2,
                  t3 - (t3 + (k - 1) * (k - 4) // 2) // 2)
    else:
        raise StrategyGap(f"no splitter case for {stype} (character {k})")
    for yes in (True, False):
        child = apply_answer_type(stype, qt, yes)
        if character(child) >= k or not is_0typical(child):
            raise StrategyGap(
                f"splitter postcondition failed on {stype}: {list(qt)} -> {child}")
    return qt


# ---------------------------------------------------------------------------
# exhaustive minimax for four or fewer candidates


def _tiny_level_children(levels: tuple[int, ...],
                         take: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    yes: list[int] = []
    no: list[int] = []
    taken = list(take)
    for lv in levels:
        if taken[lv]:
            taken[lv] -= 1
            yes.append(lv)
            if lv + 1 <= 3:
                no.append(lv + 1)
        else:
            no.append(lv)
            if lv + 1 <= 3:
                yes.append(lv + 1)
    return tuple(sorted(yes)), tuple(sorted(no))


def _tiny_takes(levels: tuple[int, ...]):
    counts = [levels.count(lv) for lv in range(4)]
    def rec(lv: int, acc: list[int]):
        if lv == 4:
            yield tuple(acc)
            return
        for k in range(counts[lv] + 1):
            yield from rec(lv + 1, acc + [k])
    for take in rec(0, []):
        if 0 < sum(take) < len(levels):
            yield take


@lru_cache(maxsize=None)
def _tiny_depth(levels: tuple[int, ...]) -> int:
    if len(levels) <= 1:
        return 0
    best = None
    for take in _tiny_takes(levels):
        yes, no = _tiny_level_children(levels, take)
        worst = max(_tiny_depth(yes), _tiny_depth(no))
        if best is None or worst < best:
            best = worst
    assert best is not None
    return best + 1


def minimax_tiny(state: GameState) -> Question:
    """Depth-optimal question over an exhaustive search of the at most
    fifteen ways to cover part of a four-or-fewer support."""
    positions = sorted(state.support_positions())
    if not 2 <= len(positions) <= 4:
        raise StrategyGap(f"minimax needs 2..4 candidates, got {len(positions)}")
    levels = tuple(sorted(state.level_of(p) for p in positions))
    target = _tiny_depth(levels)
    for take in _tiny_takes(levels):
        yes, no = _tiny_level_children(levels, take)
        if max(_tiny_depth(yes), _tiny_depth(no)) == target - 1:
            chosen: list[int] = []
            wanted = list(take)
            for p in positions:
                lv = state.level_of(p)
                assert lv is not None
                if wanted[lv]:
                    wanted[lv] -= 1
                    chosen.append(p)
            return Question(tuple((p, p) for p in chosen))
    raise AssertionError("unreachable: some take realizes the minimax depth")


# ---------------------------------------------------------------------------
# master dispatcher (states a single game tree can reach directly)


#: characters up to which planned questions are double-checked one step
#: ahead and exact search may stand in; chosen to blanket the scripted
#: descents, where the printed material has an uncloseable row
_SEARCH_CH_CAP = 9


def _planned_qtype(stype: StateType) -> QType:
    """First-choice question type from the structured phases."""
    half = halving_qtype(stype)
    if half is not None:
        return half
    scripted = _SCRIPT.get(stype)
    if scripted is not None:
        return scripted
    mhat = binomial_m(stype)
    if mhat is not None and 6 <= mhat <= 32:
        raise StrategyGap(
            f"size {mhat} runs on a phantom twin; drive it with GameSession")
    if stype[0] == 1 and (stype[1] >= 2 or (stype[1] == 1 and stype[2] >= 2)):
        return opening_qtype(stype)
    if stype[:3] == (1, 0, 3) and stype[3] >= 7:
        return qtype_103n(stype)
    if stype[0] == 0:
        ch = character(stype)
        if ch >= 12 and is_0typical(stype):
            return typical_split_qtype(stype)
        if ch < 12 and stype[3] >= nice_threshold(stype[1], stype[2]):
            return descent_qtype(stype)
    raise StrategyGap(f"no perfect strategy known from state {stype}")


def _builder_friendly(stype: StateType, qt: QType) -> bool:
    """Question types shaped like the synthesis builders' menus, which
    the realization step accepts without a fight."""
    t0, t1, t2, t3 = stype
    a0, a1, a2, a3 = qt
    if t0 == 0:
        return a0 == 0
    if a0 != 1:
        return False
    if (a1 <= (t1 + 1) // 2 and a2 <= (t2 + 1) // 2
            and a3 <= (2 * t3 + 2) // 3):
        return True
    if a1 == 1 and t2 // 4 <= a2 <= (t2 + 1) // 2:
        return True
    return a1 == 0 and a2 in (0, 2)


@lru_cache(maxsize=None)
def searched_qtype(stype: StateType) -> QType | None:
    """Exact-search stand-in: a question both of whose children stay
    winnable one question cheaper, preferring builder-friendly shapes."""
    ch = character(stype)
    fallback = None
    for qt in winning_qtypes(stype, ch):
        if _builder_friendly(stype, qt):
            return qt
        if fallback is None:
            fallback = qt
    return fallback


def _grounded(stype: StateType, qt: QType) -> bool:
    ch = character(stype)
    return (closable(apply_answer_type(stype, qt, True), ch - 1)
            and closable(apply_answer_type(stype, qt, False), ch - 1))


def next_qtype(stype: StateType) -> QType:
    """Planned question type for the composite phases (everything past
    tiny supports and the endgame, which pick positionally).

    At characters within the search cap the structured plan is kept
    only when both children verifiably close, and exact search fills in
    otherwise."""
    ch = character(stype)
    gap: StrategyGap | None = None
    qt: QType | None
    try:
        qt = _planned_qtype(stype)
    except StrategyGap as err:
        qt, gap = None, err
    if qt is not None and (ch > _SEARCH_CH_CAP or _grounded(stype, qt)):
        return qt
    if ch <= _SEARCH_CH_CAP:
        searched = searched_qtype(stype)
        if searched is not None:
            return searched
    if gap is not None:
        raise gap
    raise StrategyGap(f"no grounded question for state {stype}")


def next_question(state: GameState) -> Question | None:
    """The strategy's next question, or None on a decided state.

    Sizes 6..32 without a script need the phantom twin and must be
    driven through plan_step or GameSession instead.
    """
    if state.is_final():
        return None
    stype = state.state_type()
    if support_size(stype) <= 4:
        return minimax_tiny(state)
    if stype[0] + stype[1] + stype[2] <= 1:
        return synth_endgame(state)
    return realize(state, next_qtype(stype))


@lru_cache(maxsize=None)
def closable(stype: StateType, budget: int) -> bool:
    """Whether this strategy's own type-level plan finishes from
    ``stype`` within ``budget`` questions.

    Mirrors the dispatcher phase for phase (exact search on tiny
    supports, the known-exact endgame, then the planned question type
    on both children); a StrategyGap anywhere below counts as no."""
    if is_final_type(stype):
        return True
    if budget <= 0 or character(stype) > budget:
        return False
    if support_size(stype) <= 4:
        return win_within(stype, budget)
    if stype[0] + stype[1] + stype[2] <= 1:
        return True  # endgame closes in exactly its character
    try:
        qt = next_qtype(stype)
    except StrategyGap:
        return False
    return (closable(apply_answer_type(stype, qt, True), budget - 1)
            and closable(apply_answer_type(stype, qt, False), budget - 1))


# ---------------------------------------------------------------------------
# phantom twin for unscripted sizes


_PHANTOM_TARGET: dict[int, int] = {}
for _span, _big in ((range(6, 8), 8), (range(9, 12), 12), (range(13, 17), 17),
                    (range(18, 23), 23), (range(24, 32), 32)):
    for _m in _span:
        _PHANTOM_TARGET[_m] = _big


@dataclass(frozen=True)
class PhantomOverlay:
    """A padded twin of the real state plus the coordinate shifts.

    ``steps`` lists, per padding site, the first real position shifted
    and the total padding inserted before it; real and padded
    coordinates agree below the first site.
    """

    padded: GameState
    steps: tuple[tuple[int, int], ...]

    def to_padded(self, pos: int) -> int:
        shift = 0
        for boundary, added in self.steps:
            if pos >= boundary:
                shift = added
        return pos + shift

    def _floor_real(self, padded_pos: int) -> int:
        """Largest real position at or below a padded coordinate."""
        best = padded_pos
        shift = 0
        for boundary, added in self.steps:
            low = boundary + shift          # first padded coord of the gap
            shift = added
            if padded_pos < low:
                return padded_pos - (low - boundary)
            if padded_pos < boundary + added:
                return boundary - 1         # inside the phantom run
            best = padded_pos - added
        return best

    def restrict(self, intervals: tuple[Interval, ...]) -> tuple[Interval, ...]:
        """Real image of padded intervals (phantom-only parts drop out)."""
        out: list[Interval] = []
        for lo, hi in intervals:
            rhi = self._floor_real(hi)
            rlo = self._floor_real(lo - 1) + 1 if lo else 0
            if rlo <= rhi:
                out.append((rlo, rhi))
        return tuple(out)

    def child(self, question: Question, yes: bool) -> "PhantomOverlay":
        return replace(self, padded=question.child(self.padded, yes))


def phantom_overlay(state: GameState) -> PhantomOverlay:
    """Pad a scriptless binomial state up to its covering scripted size.

    Padding goes inside the largest arc of each level, so the necklace
    word -- and with it well-shapedness -- is untouched, and the
    covering pair's equal characters keep the budget exact.
    """
    mhat = binomial_m(state.state_type())
    if mhat is None or mhat not in _PHANTOM_TARGET:
        raise StrategyGap(f"state {state.state_type()} takes no phantom twin")
    mprime = _PHANTOM_TARGET[mhat]
    extra = {level: binom(mprime, level) - binom(mhat, level)
             for level in (1, 2, 3)}
    anchors: dict[int, int] = {}
    for idx, (_, length, level) in enumerate(state.segments):
        if level in extra and extra[level]:
            best = anchors.get(level)
            if best is None or length > state.segments[best][1]:
                anchors[level] = idx
    if set(anchors) != {lv for lv, inc in extra.items() if inc}:
        raise StrategyGap(f"no arc to pad at some level of {state.state_type()}")
    site_of = {idx: extra[lv] for lv, idx in anchors.items()}
    segments: list[tuple[int, int, int]] = []
    steps: list[tuple[int, int]] = []
    shift = 0
    for idx, (start, length, level) in enumerate(state.segments):
        added = site_of.get(idx, 0)
        segments.append((start + shift, length + added, level))
        if added:
            shift += added
            steps.append((start + length, shift))
    padded = make_state(state.n + shift, segments)
    if character(padded.state_type()) != character(state.state_type()):
        raise StrategyGap(
            f"padding {state.state_type()} to size {mprime} changes the character")
    assert is_well_shaped(padded)
    return PhantomOverlay(padded, tuple(steps))


class PlanStep(NamedTuple):
    """One dispatcher step: the question in real coordinates (None when
    it covers phantoms only), the padded twin's question when a twin is
    active, and the twin itself."""

    real_intervals: tuple[Interval, ...]
    real_question: Question | None
    padded_question: Question | None
    overlay: PhantomOverlay | None


def plan_step(real: GameState, overlay: PhantomOverlay | None = None) -> PlanStep | None:
    """Next move over (real state, optional twin); None once decided."""
    if real.is_final():
        return None
    if overlay is None:
        mhat = binomial_m(real.state_type())
        if (mhat is not None and 6 <= mhat <= 32
                and mhat not in OPENING_ROWS):
            overlay = phantom_overlay(real)
    if overlay is None:
        question = next_question(real)
        if question is None:
            return None
        return PlanStep(question.intervals, question, None, None)
    padded_question = next_question(overlay.padded)
    if padded_question is None:
        raise StrategyGap("phantom twin decided before the real state")
    real_intervals = overlay.restrict(padded_question.intervals)
    real_question = Question(real_intervals) if real_intervals else None
    return PlanStep(real_intervals, real_question, padded_question, overlay)


class GameSession:
    """Stateful driver for one full game, phantom twin included."""

    def __init__(self, state: GameState):
        self.state = state
        self.overlay: PhantomOverlay | None = None
        self._step: PlanStep | None = None
        self.plies = 0

    def step(self) -> PlanStep | None:
        """The pending move (None once the state is decided)."""
        if self._step is None:
            self._step = plan_step(self.state, self.overlay)
            if self._step is not None:
                self.overlay = self._step.overlay
        return self._step

    def answer(self, yes: bool) -> None:
        step = self.step()
        if step is None:
            raise StrategyGap("the game is already decided")
        self.state = apply_answer(self.state, step.real_intervals, yes)
        if step.padded_question is not None and self.overlay is not None:
            self.overlay = self.overlay.child(step.padded_question, yes)
        self._step = None
        self.plies += 1
