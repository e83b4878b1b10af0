"""Necklace geometry of a search state.

Read the surviving positions around the circle and group equal-level
neighbours (ignoring eliminated gaps) into *arcs*.  A state is well
shaped when its arcs embed, in circular order and either orientation,
into one of two reference necklaces of twelve arcs -- unassigned slots
act as empty arcs.  The twelve slots carry fixed names; by level the
slot counts are one level-0, three level-1, five level-2 and three
level-3 arcs.

An arc is a *mode* if both neighbouring slots sit on higher levels, a
*saddle* if both sit lower, and a *step* otherwise.

The module also implements the incremental bookkeeping used to reason
about how one question reshapes the necklace: the padded slot list is
transformed fragment by fragment without re-deriving a fresh embedding
("maintained" semantics), and per-interval local recounts predict the
resulting arc counts per level.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .core import LIES, GameState, Interval, normalize_intervals

# slot name / level pairs, circular order
TEMPLATES: tuple[tuple[tuple[str, int], ...], ...] = (
    (("L", 2), ("N", 1), ("S", 0), ("O", 1), ("M", 2), ("Q", 3),
     ("B", 2), ("H", 1), ("C", 2), ("R", 3), ("A", 2), ("P", 3)),
    (("L", 2), ("N", 1), ("S", 0), ("O", 1), ("B", 2), ("H", 1),
     ("C", 2), ("Q", 3), ("M", 2), ("R", 3), ("A", 2), ("P", 3)),
)

#: arcs per level in a well-shaped necklace
SLOT_COUNTS = (1, 3, 5, 3)


class ShapeError(ValueError):
    """The state does not have the necklace structure the operation needs."""


# ---------------------------------------------------------------------------
# arcs (support groups)


@dataclass(frozen=True)
class Group:
    """One arc: a maximal run of equal-level support-adjacent elements."""

    level: int
    positions: tuple[int, ...]  # support-cycle order (wrap groups stay contiguous)

    @property
    def size(self) -> int:
        return len(self.positions)


def support_groups(state: GameState) -> tuple[Group, ...]:
    segs = state.segments
    if not segs:
        return ()
    # circularly rotate so a group never straddles the list ends
    k = len(segs)
    first = 0
    if k > 1 and segs[0][2] == segs[-1][2]:
        first = k - 1
        while first > 0 and segs[first - 1][2] == segs[0][2]:
            first -= 1
        if first == 0:  # whole circle one level
            positions = []
            for start, length, _ in segs:
                positions.extend(range(start, start + length))
            return (Group(segs[0][2], tuple(positions)),)
    groups: list[Group] = []
    cur_level: int | None = None
    cur_pos: list[int] = []
    for i in range(k):
        start, length, level = segs[(first + i) % k]
        if level != cur_level:
            if cur_pos:
                groups.append(Group(cur_level, tuple(cur_pos)))  # type: ignore[arg-type]
            cur_level, cur_pos = level, []
        cur_pos.extend(range(start, start + length))
    groups.append(Group(cur_level, tuple(cur_pos)))  # type: ignore[arg-type]
    return tuple(groups)


def congruence_key(state: GameState) -> tuple[tuple[int, int, bool], ...]:
    """Linear readout of the state's take geometry: segment lengths and
    levels plus which junctions carry an eliminated gap.

    Everything the planner computes from a state -- question menus,
    interval counts, membership words, arc recounts, child level cycles
    -- depends only on this readout, never on absolute positions, so
    states that share it share their entire subtree behaviour and it
    serves as a memo key for searches and whole-tree walks.
    """
    segs = state.segments
    last = len(segs) - 1
    parts = []
    for i, (start, length, level) in enumerate(segs):
        if i < last:
            gap = segs[i + 1][0] > start + length
        else:
            gap = (state.n - (start + length) + segs[0][0]) > 0
        parts.append((length, level, gap))
    return tuple(parts)


def signature(state: GameState) -> tuple[tuple[int, int], ...]:
    """Rotation/reflection-minimal readout of (level, size) around the circle.

    States with equal signatures are congruent up to relabelling of
    positions, which is what makes it usable as a memo key.
    """
    groups = support_groups(state)
    seq = [(g.level, g.size) for g in groups]
    r = len(seq)
    if r == 0:
        return ()
    best = None
    for direction in (1, -1):
        view = seq if direction == 1 else seq[::-1]
        for s in range(r):
            cand = tuple(view[(s + i) % r] for i in range(r))
            if best is None or cand < best:
                best = cand
    return best  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# embeddings into the reference necklaces


@lru_cache(maxsize=100_000)
def _assignments(levels: tuple[int, ...]) -> tuple[tuple[int, bool, tuple[int, ...]], ...]:
    """All (pattern, reversed, slot indices) embeddings for an arc-level cycle.

    Slot indices are into the *oriented* template (template reversed
    first when ``reversed`` is set) and increase by less than a full
    turn, so circular order is preserved.
    """
    out = []
    r = len(levels)
    for pattern in range(len(TEMPLATES)):
        for rev in (False, True):
            tmpl = TEMPLATES[pattern]
            tlev = [lv for _, lv in (reversed(tmpl) if rev else tmpl)]
            if r == 0:
                out.append((pattern, rev, ()))
                continue
            for s in range(12):
                if tlev[s] != levels[0]:
                    continue
                stack = [(1, (s,))]
                while stack:
                    i, picked = stack.pop()
                    if i == r:
                        out.append((pattern, rev, picked))
                        continue
                    for p in range(picked[-1] + 1, s + 12):
                        if tlev[p % 12] == levels[i]:
                            stack.append((i + 1, picked + (p,)))
    return tuple(out)


@dataclass(frozen=True)
class Embedding:
    """A concrete placement of a state's arcs into template slots."""

    pattern: int
    reversed_: bool
    groups: tuple[Group, ...]
    slot_of_group: tuple[int, ...]  # oriented slot index per group

    @cached_property
    def oriented_template(self) -> tuple[tuple[str, int], ...]:
        tmpl = TEMPLATES[self.pattern]
        return tuple(reversed(tmpl)) if self.reversed_ else tmpl

    @cached_property
    def _names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.oriented_template)

    @cached_property
    def _slot_index(self) -> dict[str, int]:
        return {name: i for i, (name, _) in enumerate(self.oriented_template)}

    @cached_property
    def _group_by_name(self) -> dict[str, Group]:
        names = self._names
        return {names[slot % 12]: self.groups[g]
                for g, slot in enumerate(self.slot_of_group)}

    def slot_names(self) -> tuple[str, ...]:
        return self._names

    def group_at(self, name: str) -> Group | None:
        return self._group_by_name.get(name)

    @cached_property
    def _sizes(self) -> dict[str, int]:
        return {name: g.size for name, g in self._group_by_name.items()}

    def size(self, name: str) -> int:
        return self._sizes.get(name, 0)

    def positions(self, name: str) -> tuple[int, ...]:
        """Slot contents in oriented circular order."""
        g = self._group_by_name.get(name)
        if g is None:
            return ()
        return g.positions if not self.reversed_ else g.positions[::-1]

    def level(self, name: str) -> int:
        return self.oriented_template[self._slot_index[name]][1]

    def next_slot(self, name: str) -> str:
        return self._names[(self._slot_index[name] + 1) % 12]

    def prev_slot(self, name: str) -> str:
        return self._names[(self._slot_index[name] - 1) % 12]

    def take_toward(self, name: str, neighbor: str, k: int) -> tuple[int, ...]:
        """The k slot elements nearest the named neighbouring slot."""
        pos = self.positions(name)
        if k > len(pos):
            raise ShapeError(f"cannot take {k} from slot {name} of size {len(pos)}")
        if neighbor == self.next_slot(name):
            return pos[len(pos) - k:]
        if neighbor == self.prev_slot(name):
            return pos[:k]
        raise ShapeError(f"{neighbor} is not adjacent to {name}")


_ORIENTED_NAMES: dict[tuple[int, bool], tuple[str, ...]] = {
    (p, rev): tuple(n for n, _ in (reversed(TEMPLATES[p]) if rev else TEMPLATES[p]))
    for p in range(len(TEMPLATES)) for rev in (False, True)
}

#: embeddings beyond this rank are never consulted, so they are not built
MAX_EMBEDDINGS = 12


@lru_cache(maxsize=4096)
def embeddings(state: GameState) -> tuple[Embedding, ...]:
    """The best embeddings, most synthesis-friendly first (largest H,
    then A), capped at ``MAX_EMBEDDINGS``."""
    groups = support_groups(state)
    levels = tuple(g.level for g in groups)
    rows = []
    for p, rev, slots in _assignments(levels):
        names = _ORIENTED_NAMES[(p, rev)]
        h = a = 0
        for s, g in zip(slots, groups):
            name = names[s % 12]
            if name == "H":
                h = g.size
            elif name == "A":
                a = g.size
        rows.append((-h, -a, p, rev, slots))
    rows.sort()
    return tuple(Embedding(p, rev, groups, slots)
                 for _, _, p, rev, slots in rows[:MAX_EMBEDDINGS])


def is_well_shaped(state: GameState) -> bool:
    groups = support_groups(state)
    return bool(_assignments(tuple(g.level for g in groups)))


# ---------------------------------------------------------------------------
# presented slot lists and roles

Entry = tuple[int, tuple[int, ...]]  # (level, positions); empty arcs allowed


def presented_list(state: GameState) -> list[Entry]:
    """The state's necklace as a padded cyclic arc list.

    Well-shaped states render through their best embedding as the full
    twelve slots.  Other states fall back to the minimal list: their
    arcs plus the forced staircase of empty arcs at every level jump.
    """
    embs = embeddings(state)
    if embs:
        e = embs[0]
        by_slot: dict[int, Group] = {s % 12: e.groups[g]
                                     for g, s in enumerate(e.slot_of_group)}
        out: list[Entry] = []
        for idx, (_, level) in enumerate(e.oriented_template):
            g = by_slot.get(idx)
            out.append((level, g.positions if g else ()))
        return out
    groups = support_groups(state)
    entries: list[Entry] = []
    r = len(groups)
    for i, g in enumerate(groups):
        entries.append((g.level, g.positions))
        nxt = groups[(i + 1) % r]
        if r == 1:
            entries.append((g.level - 1 if g.level > 0 else g.level + 1, ()))
            break
        entries.extend(_staircase(g.level, nxt.level))
    return entries


def _staircase(u: int, v: int) -> list[Entry]:
    step = 1 if v > u else -1
    return [(lv, ()) for lv in range(u + step, v, step)]


def arc_counts(entries: Sequence[Entry]) -> tuple[int, int, int, int]:
    counts = [0, 0, 0, 0]
    for level, _ in entries:
        counts[level] += 1
    return tuple(counts)  # type: ignore[return-value]


def role_of(entries: Sequence[Entry], i: int) -> str:
    n = len(entries)
    lv = entries[i][0]
    left = entries[(i - 1) % n][0]
    right = entries[(i + 1) % n][0]
    if left > lv and right > lv:
        return "mode"
    if left < lv and right < lv:
        return "saddle"
    return "step"


def describe_necklace(state: GameState) -> str:
    """Human-readable dump: one ``name level span role`` line per slot."""
    embs = embeddings(state)
    entries = presented_list(state)
    names: Sequence[str]
    if embs:
        names = embs[0].slot_names()
    else:
        names = ["-"] * len(entries)
    lines = []
    for i, (level, positions) in enumerate(entries):
        span = _span_text(positions)
        lines.append(f"{names[i]} {level} {span} {role_of(entries, i)}")
    return "\n".join(lines)


def _span_text(positions: tuple[int, ...]) -> str:
    if not positions:
        return "[]"
    parts = []
    run = [positions[0], positions[0]]
    for p in positions[1:]:
        if p == run[1] + 1:
            run[1] = p
        else:
            parts.append(f"[{run[0]}..{run[1]}]")
            run = [p, p]
    parts.append(f"[{run[0]}..{run[1]}]")
    return "+".join(parts)


# ---------------------------------------------------------------------------
# maintained transformation of a padded list


def _fragments(entry: Entry, member: Sequence[bool], yes: bool) -> list[Entry]:
    """Split one arc by a membership labelling and apply the answer.

    Elements keep their level when membership matches the answer and
    move up otherwise; a fragment pushed past the last level survives
    as an empty arc at the top level.
    """
    level, positions = entry
    if not positions:
        return [entry]
    frags: list[Entry] = []
    i = 0
    while i < len(positions):
        j = i
        while j < len(positions) and member[j] == member[i]:
            j += 1
        new_level = level if member[i] == yes else level + 1
        if new_level > LIES:
            frags.append((LIES, ()))
        else:
            frags.append((new_level, positions[i:j]))
        i = j
    return frags


def _merge_and_pad(entries: list[Entry], circular: bool = True) -> list[Entry]:
    merged: list[Entry] = []
    for level, positions in entries:
        if merged and merged[-1][0] == level:
            merged[-1] = (level, merged[-1][1] + positions)
        else:
            merged.append((level, positions))
    if circular and len(merged) > 1 and merged[0][0] == merged[-1][0]:
        merged[0] = (merged[0][0], merged[-1][1] + merged[0][1])
        merged.pop()
    out: list[Entry] = []
    m = len(merged)
    for i, e in enumerate(merged):
        out.append(e)
        if m == 1 and circular:
            break
        nxt = merged[(i + 1) % m]
        if circular or i + 1 < m:
            out.extend(_staircase(e[0], nxt[0]))
    return out


def simulate_presented(entries: Sequence[Entry], intervals: Iterable[Interval],
                       yes: bool) -> list[Entry]:
    """Advance a padded arc list by one answered question.

    No fresh embedding is derived: fragments merge with equal-level
    neighbours (empty arcs included) and level jumps get their forced
    empty staircases, exactly mirroring the local recounts.
    """
    ivs = normalize_intervals(intervals)
    raw: list[Entry] = []
    for entry in entries:
        member = [any(lo <= p <= hi for lo, hi in ivs) for p in entry[1]]
        raw.extend(_fragments(entry, member, yes))
    return _merge_and_pad(raw)


def _runs(positions: Sequence[int]) -> tuple[tuple[int, int], ...]:
    """Maximal consecutive stretches in stored order, as (start, length)."""
    if not positions:
        return ()
    out = []
    a = prev = positions[0]
    for p in positions[1:]:
        if p == prev + 1:
            prev = p
            continue
        out.append((a, prev - a + 1))
        a = prev = p
    out.append((a, prev - a + 1))
    return tuple(out)


def _flag_summary(runs: Sequence[tuple[int, int]], lo: int,
                  hi: int) -> tuple[bool, int]:
    """Membership word of one arc against one interval, compressed.

    Equal adjacent flags merge, so the word alternates and is pinned
    down by its first flag and its length.
    """
    first: bool | None = None
    count = 0
    last: bool | None = None
    for a, ln in runs:
        b = a + ln - 1
        for flag, c in ((False, min(b, lo - 1) - a + 1),
                        (True, min(b, hi) - max(a, lo) + 1),
                        (False, b - max(a, hi + 1) + 1)):
            if c <= 0:
                continue
            if flag != last:
                count += 1
                last = flag
                if first is None:
                    first = flag
    return (False, 1) if first is None else (first, count)


@lru_cache(maxsize=None)
def _window_deltas(prev_level: int, arc_level: int, next_level: int, yes: bool,
                   first_flag: bool, nflags: int) -> tuple[int, int, int, int]:
    """Per-level arc-count change of one recounted window.

    Only the level word matters to the counts -- fragment sizes never
    do -- so the window reduces to the neighbour levels plus the
    compressed membership word, which is what makes this cacheable.
    """
    levels = [prev_level]
    flag = first_flag
    for _ in range(nflags):
        lv = arc_level if flag == yes else arc_level + 1
        if lv > LIES:  # fragment eliminated; its slot stays as an empty top arc
            lv = LIES
        if levels[-1] != lv:
            levels.append(lv)
        flag = not flag
    if levels[-1] != next_level:
        levels.append(next_level)
    padded = [levels[0]]
    for lv in levels[1:]:
        u = padded[-1]
        step = 1 if lv > u else -1
        padded.extend(range(u + step, lv, step))
        padded.append(lv)
    after = [0, 0, 0, 0]
    for lv in padded:
        after[lv] += 1
    before = (prev_level, arc_level, next_level)
    return tuple(after[v] - sum(1 for x in before if x == v)
                 for v in range(4))  # type: ignore[return-value]


def local_delta(entries: Sequence[Entry], i: int, interval: Interval | None,
                yes: bool, level: int) -> int:
    """Change in the number of level-``level`` arcs caused by one arc's
    elements under a single interval, neighbours held fixed.

    ``interval=None`` treats the arc as lying wholly outside the
    question.  Merges with the fixed neighbours and forced staircase
    empties at the arc's two junctions are included, which is what makes
    the per-interval contributions add up to the full recount.
    """
    n = len(entries)
    prev_level = entries[(i - 1) % n][0]
    next_level = entries[(i + 1) % n][0]
    level0, positions = entries[i]
    if not positions:
        return 0
    if interval is None:
        ff, nf = False, 1
    else:
        ff, nf = _flag_summary(_runs(positions), interval[0], interval[1])
    return _window_deltas(prev_level, level0, next_level, yes, ff, nf)[level]


def max_touches_per_arc(entries: Sequence[Entry],
                        intervals: Iterable[Interval]) -> int:
    ivs = normalize_intervals(intervals)
    worst = 0
    for _, positions in entries:
        if not positions:
            continue
        worst = max(worst, sum(1 for iv in ivs
                               if any(iv[0] <= p <= iv[1] for p in positions)))
    return worst


def _predicted(entries: Sequence[Entry], runs_list: Sequence[tuple[tuple[int, int], ...]],
               base: Sequence[int], ivs: Sequence[Interval],
               yes: bool) -> tuple[int, ...]:
    counts = list(base)
    m = len(entries)
    for i, runs in enumerate(runs_list):
        if not runs:
            continue
        prev_level = entries[(i - 1) % m][0]
        level0 = entries[i][0]
        next_level = entries[(i + 1) % m][0]
        hit = False
        for lo, hi in ivs:
            if not any(a <= hi and a + ln - 1 >= lo for a, ln in runs):
                continue
            hit = True
            ff, nf = _flag_summary(runs, lo, hi)
            d = _window_deltas(prev_level, level0, next_level, yes, ff, nf)
            for v in range(4):
                counts[v] += d[v]
        if not hit and yes:
            d = _window_deltas(prev_level, level0, next_level, yes, False, 1)
            for v in range(4):
                counts[v] += d[v]
    return tuple(counts)


def predicted_arc_counts(entries: Sequence[Entry], intervals: Iterable[Interval],
                         yes: bool) -> tuple[int, int, int, int]:
    """Arc counts of the maintained child list, via per-interval recounts.

    Exact whenever no arc meets more than one question interval -- true
    of every question the synthesis layer emits, since takes are
    anchored at arc boundaries.  An arc split by two disjoint intervals
    hides the stranded middle fragment from both local recounts, so on
    such questions the sums can drift from the full simulation.
    """
    ivs = normalize_intervals(intervals)
    entries = list(entries)
    runs_list = [_runs(positions) for _, positions in entries]
    return _predicted(entries, runs_list, arc_counts(entries), ivs,
                      yes)  # type: ignore[return-value]


@lru_cache(maxsize=512)
def _presented_runs(state: GameState) -> tuple[tuple[Entry, ...],
                                               tuple[tuple[tuple[int, int], ...], ...]]:
    entries = tuple(presented_list(state))
    return entries, tuple(_runs(positions) for _, positions in entries)


def preserves_well_shape(state: GameState, intervals: Iterable[Interval]) -> bool:
    """Conservative check that a question keeps the padded list's arc
    counts at every level for both answers.

    Sufficient but not necessary for the children to be well shaped: a
    child whose maintained counts drift can still re-embed.
    """
    entries, runs_list = _presented_runs(state)
    if arc_counts(entries) != SLOT_COUNTS:
        raise ShapeError("state is not well shaped")
    ivs = normalize_intervals(intervals)
    for yes in (True, False):
        if _predicted(entries, runs_list, SLOT_COUNTS, ivs, yes) != SLOT_COUNTS:
            return False
    return True
