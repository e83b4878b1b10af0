"""Builders that realize a requested question type on a well-shaped state.

Every builder works the same way: check the admissibility bounds for its
state family, then walk an ordered menu of boundary-anchored element
selections and return the first one that collapses into at most four
line intervals, matches the requested per-level counts exactly, and
leaves both children embeddable in a template -- established through
the maintained arc counts when a selection preserves them, or by
re-embedding the children directly when it does not.  Menus start with the
selection the bounds come from -- the level-1 half cap fits in ``H``
plus the larger flank of ``S``, the level-2 half cap in ``A``, the
larger flank of ``H``, and the largest remaining arc, the level-3
two-thirds cap in the two largest level-3 arcs -- then fall back to
nearby variants (other anchor ends, other donor arcs) so degenerate
necklaces still synthesize.

Anchoring every partial take at an arc boundary is what keeps the
interval count down: adjacent takes fuse into one interval, and each
arc meets at most one interval, which is also the regime where the
maintained-list recounts used by ``preserves_well_shape`` are exact.
"""
from __future__ import annotations

from itertools import product
from typing import Callable, Iterable, Iterator, Sequence

from .core import (AdmissibilityError, GameState, QType, SynthesisError,
                   binom, character)
from .questions import MAX_INTERVALS, Question
from .shape import (MAX_EMBEDDINGS, Embedding, ShapeError, congruence_key,
                    embeddings, is_well_shaped, preserves_well_shape)

Take = tuple[str, str, int]  # (slot, anchor-side neighbour, element count)

_MAX_EMBEDDINGS = MAX_EMBEDDINGS
_MAX_SHAPE_CHECKS = 4096

_LEVEL2 = ("L", "M", "B", "C", "A")
_LEVEL3 = ("Q", "R", "P")


# ---------------------------------------------------------------------------
# anchors

def _flank(emb: Embedding, center: str) -> str:
    """The larger neighbour slot; ties go to the positively-oriented side."""
    p, n = emb.prev_slot(center), emb.next_slot(center)
    return p if emb.size(p) > emb.size(n) else n


def _other_neighbor(emb: Embedding, slot: str, neighbor: str) -> str:
    p, n = emb.prev_slot(slot), emb.next_slot(slot)
    return n if neighbor == p else p


def _by_size(emb: Embedding, names: Iterable[str], smallest_first: bool = False) -> list[str]:
    return sorted(names, key=lambda s: emb.size(s), reverse=not smallest_first)


def _tail_anchor(emb: Embedding, slot: str) -> str:
    """Anchor side for a spill-over level-2 arc.

    Face a level-1 neighbour when the far side of ``H``'s larger flank
    faces level 3, and vice versa; some slots lack the wanted side, in
    which case the caller's both-ends fallback decides.
    """
    far = _other_neighbor(emb, _flank(emb, "H"), "H")
    want = 1 if emb.level(far) == 3 else 3
    for nb in (emb.prev_slot(slot), emb.next_slot(slot)):
        if emb.level(nb) == want:
            return nb
    return emb.prev_slot(slot)


def _preferred_toward(emb: Embedding, slot: str) -> str:
    if slot in ("S", "H", "A"):
        return _flank(emb, slot)
    if slot in ("N", "O"):
        return "S"
    if slot in ("B", "C"):
        return "H"
    if slot in ("L", "M"):
        return _tail_anchor(emb, slot)
    for nb in (emb.prev_slot(slot), emb.next_slot(slot)):
        if nb == "A":
            return nb
    return emb.prev_slot(slot)


# ---------------------------------------------------------------------------
# routes: per-level donor orderings -> take lists

def _anchor_variants(emb: Embedding, takes: list[Take],
                     partial_at: int) -> Iterable[tuple[Take, ...]]:
    base = tuple(takes)
    yield base
    if partial_at >= 0:
        slot, toward, k = takes[partial_at]
        flipped = list(takes)
        flipped[partial_at] = (slot, _other_neighbor(emb, slot, toward), k)
        yield tuple(flipped)


def _routes(emb: Embedding, need: int,
            orderings: Sequence[Sequence[str]]) -> list[tuple[Take, ...]]:
    """Take lists covering ``need`` elements of one level.

    Each ordering is filled greedily -- whole arcs, then one anchored
    partial take -- and the partial take is tried from both ends.
    """
    if need == 0:
        return [()]
    out: list[tuple[Take, ...]] = []
    seen: set[tuple[Take, ...]] = set()
    for order in orderings:
        rem = need
        takes: list[Take] = []
        partial_at = -1
        for slot in order:
            if rem == 0:
                break
            cap = emb.size(slot)
            k = min(cap, rem)
            if k == 0:
                continue
            takes.append((slot, _preferred_toward(emb, slot), k))
            if k < cap:
                partial_at = len(takes) - 1
            rem -= k
        if rem:
            continue
        for variant in _anchor_variants(emb, takes, partial_at):
            if variant not in seen:
                seen.add(variant)
                out.append(variant)
    return out


def _orders_level1(emb: Embedding) -> list[tuple[str, ...]]:
    a1 = _flank(emb, "S")
    o1 = _other_neighbor(emb, "S", a1)
    return [("H", a1), ("H", o1), (a1, "H"), (o1, "H"),
            (a1, o1), (o1, a1), ("H", a1, o1)]


def _orders_level2(emb: Embedding) -> list[tuple[str, ...]]:
    a2 = _flank(emb, "H")
    e1, e2, e3 = _by_size(emb, [s for s in _LEVEL2 if s not in ("A", a2)])
    return [("A", a2, e1), ("A", a2, e2), ("A", a2, e3),
            (a2, "A", e1), (e1, "A", a2), ("A", e1, a2), (e2, "A", a2),
            tuple(_by_size(emb, _LEVEL2))]


def _orders_level3(emb: Embedding) -> list[tuple[str, ...]]:
    a3 = _flank(emb, "A")
    w, u = _by_size(emb, [s for s in _LEVEL3 if s != a3])
    return [(a3, w, u), (a3, u, w), (w, a3, u),
            (w, u, a3), (u, a3, w), (u, w, a3)]


def _menu_general(emb: Embedding, target: QType,
                  extra2: Sequence[Sequence[str]] = (),
                  extra3: Sequence[Sequence[str]] = ()) -> Iterator[tuple[Take, ...]]:
    a, b, c, d = target
    l0 = _routes(emb, a, [("S",)])
    l1 = _routes(emb, b, _orders_level1(emb))
    l2 = _routes(emb, c, list(extra2) + _orders_level2(emb))
    l3 = _routes(emb, d, list(extra3) + _orders_level3(emb))
    return (tuple(t for part in combo for t in part)
            for combo in product(l0, l1, l2, l3))


def _menu_11cd(emb: Embedding, target: QType) -> Iterator[tuple[Take, ...]]:
    a2 = _flank(emb, "H")
    u2 = _by_size(emb, [s for s in _LEVEL2 if s not in ("A", a2)],
                  smallest_first=True)[0]
    return _menu_general(emb, target,
                         extra2=[(u2, "A"), (u2, "A", a2), (u2, a2, "A")])


def _menu_102d(emb: Embedding, target: QType) -> Iterator[tuple[Take, ...]]:
    arcs = _by_size(emb, _LEVEL2)
    singles = [(s,) for s in arcs]
    pairs = [(x, y) for x in arcs[:4] for y in arcs[:4] if x != y]
    return _menu_general(emb, target, extra2=singles + pairs)


# ---------------------------------------------------------------------------
# expansion, assembly, search

def _expand(emb: Embedding, takes: Sequence[Take]) -> list[int] | None:
    """Positions named by a take list, or None when a take overflows its
    arc or two takes hit the same arc (which could double-touch it)."""
    chosen: list[int] = []
    used: set[str] = set()
    for slot, toward, k in takes:
        if k == 0:
            continue
        if slot in used or k > emb.size(slot):
            return None
        used.add(slot)
        chosen.extend(emb.take_toward(slot, toward, k))
    return chosen


def _assemble(support: Sequence[int], index: dict[int, int],
              chosen: Iterable[int]) -> Question | None:
    """Collapse chosen positions into line intervals, bridging eliminated
    gaps; None when they need more than four intervals."""
    marks = sorted(index[p] for p in chosen)
    intervals: list[tuple[int, int]] = []
    lo = prev = marks[0]
    for i in marks[1:]:
        if i == prev + 1:
            prev = i
            continue
        intervals.append((support[lo], support[prev]))
        lo = prev = i
    intervals.append((support[lo], support[prev]))
    if len(intervals) > MAX_INTERVALS:
        return None
    return Question(tuple(intervals))


#: (geometry, target, menu) -> (phase, pattern, reversed, slot assignment, takes)
_WINNERS: dict[tuple, tuple] = {}


def _replay(state: GameState, target: QType, cached: tuple) -> Question | None:
    """Re-run a congruent state's winning candidate, keeping the concrete
    checks authoritative; None sends the caller back to the full scan."""
    phase, pattern, rev, slots, takes = cached
    for emb in embeddings(state):
        if (emb.pattern == pattern and emb.reversed_ == rev
                and emb.slot_of_group == slots):
            break
    else:
        return None
    chosen = _expand(emb, takes)
    if chosen is None:
        return None
    support = sorted(state.support_positions())
    index = {p: i for i, p in enumerate(support)}
    question = _assemble(support, index, chosen)
    if question is None or question.type_in(state) != target:
        return None
    if phase == "pres":
        return question if preserves_well_shape(state, question.intervals) else None
    if (is_well_shaped(question.child(state, True))
            and is_well_shaped(question.child(state, False))):
        return question
    return None


def _search(state: GameState, target: QType,
            menu: Callable[[Embedding, QType], Iterator[tuple[Take, ...]]]) -> Question:
    embs = embeddings(state)
    if not embs:
        raise ShapeError(f"state of type {state.state_type()} is not well shaped")
    cache_key = (congruence_key(state), target, menu.__name__)
    cached = _WINNERS.get(cache_key)
    if cached is not None:
        question = _replay(state, target, cached)
        if question is not None:
            return question
    support = sorted(state.support_positions())
    index = {p: i for i, p in enumerate(support)}
    tried: set[frozenset[int]] = set()
    checks = 0
    for emb in embs[:_MAX_EMBEDDINGS]:
        for takes in menu(emb, target):
            chosen = _expand(emb, takes)
            if chosen is None:
                continue
            key = frozenset(chosen)
            if key in tried:
                continue
            tried.add(key)
            question = _assemble(support, index, chosen)
            if question is None:
                continue
            if question.type_in(state) != target:
                continue
            checks += 1
            # What downstream needs is both children back on a template.
            # Maintained counts imply that and cost no child construction,
            # so they go first; exact-fill arcs routinely break the counts
            # (a take that drains its arc acts as a cover, not a split, and
            # the missing split's +1 never materializes) while the children
            # still re-embed, so the direct check decides those.
            if preserves_well_shape(state, question.intervals):
                _WINNERS[cache_key] = ("pres", emb.pattern, emb.reversed_,
                                       emb.slot_of_group, takes)
                return question
            if (is_well_shaped(question.child(state, True))
                    and is_well_shaped(question.child(state, False))):
                _WINNERS[cache_key] = ("fallback", emb.pattern, emb.reversed_,
                                       emb.slot_of_group, takes)
                return question
            if checks >= _MAX_SHAPE_CHECKS:
                break
        else:
            continue
        break
    raise SynthesisError(
        f"no {MAX_INTERVALS}-interval question of type {list(target)} "
        f"keeps state {state.state_type()} well shaped")


# ---------------------------------------------------------------------------
# public builders

def _as_target(target: Sequence[int]) -> QType:
    tgt = tuple(int(x) for x in target)
    if len(tgt) != 4 or any(x < 0 for x in tgt):
        raise AdmissibilityError(f"malformed question type {list(target)}")
    if sum(tgt) == 0:
        raise AdmissibilityError("a question must cover at least one candidate")
    return tgt  # type: ignore[return-value]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise AdmissibilityError(msg)


def synth_type_abcd(state: GameState, target: Sequence[int]) -> Question:
    """General builder: any [a,b,c,d] within the per-level caps.

    Caps: a up to the whole level-0 count, b and c up to half the
    level-1 and level-2 counts (rounded up), d up to two thirds of the
    level-3 count (rounded up).
    """
    tgt = _as_target(target)
    a0, b0, c0, d0 = state.state_type()
    a, b, c, d = tgt
    _require(a <= a0, f"a={a} exceeds the level-0 count {a0}")
    _require(b <= (b0 + 1) // 2, f"b={b} exceeds the level-1 cap {(b0 + 1) // 2}")
    _require(c <= (c0 + 1) // 2, f"c={c} exceeds the level-2 cap {(c0 + 1) // 2}")
    _require(d <= (2 * d0 + 2) // 3, f"d={d} exceeds the level-3 cap {(2 * d0 + 2) // 3}")
    return _search(state, tgt, _menu_general)


def synth_type_0bcd(state: GameState, target: Sequence[int]) -> Question:
    """Builder for states with no level-0 candidates: [0,b,c,d] with the
    usual half caps on b and c but d allowed up to the whole level-3
    count (the unused level-0 interval pays for the wider coverage)."""
    tgt = _as_target(target)
    t = state.state_type()
    _require(t[0] == 0, f"state {t} has level-0 candidates")
    _require(tgt[0] == 0, f"target {list(tgt)} must have shape [0,b,c,d]")
    _require(tgt[1] <= (t[1] + 1) // 2, f"b={tgt[1]} exceeds the level-1 cap {(t[1] + 1) // 2}")
    _require(tgt[2] <= (t[2] + 1) // 2, f"c={tgt[2]} exceeds the level-2 cap {(t[2] + 1) // 2}")
    _require(tgt[3] <= t[3], f"d={tgt[3]} exceeds the level-3 count {t[3]}")
    return _search(state, tgt, _menu_general)


def synth_type_11cd(state: GameState, target: Sequence[int]) -> Question:
    """Builder for (1,b1,c1,d1) states asked [1,1,c,d]: c between a
    quarter and half of the level-2 count, d up to the whole level-3
    count."""
    tgt = _as_target(target)
    t = state.state_type()
    _require(t[0] == 1, f"state {t} must have exactly one level-0 candidate")
    _require(t[1] >= 1, f"state {t} has no level-1 candidate to cover")
    _require(tgt[0] == 1 and tgt[1] == 1, f"target {list(tgt)} must have shape [1,1,c,d]")
    c1, d1 = t[2], t[3]
    _require(c1 // 4 <= tgt[2], f"c={tgt[2]} is below the quarter floor {c1 // 4}")
    _require(tgt[2] <= (c1 + 1) // 2, f"c={tgt[2]} exceeds the level-2 cap {(c1 + 1) // 2}")
    _require(tgt[3] <= d1, f"d={tgt[3]} exceeds the level-3 count {d1}")
    return _search(state, tgt, _menu_11cd)


def synth_type_102d(state: GameState, target: Sequence[int]) -> Question:
    """Builder for (1,1,c2,d2) states asked [1,0,2,d] with d up to the
    whole level-3 count."""
    tgt = _as_target(target)
    t = state.state_type()
    _require(t[0] == 1 and t[1] == 1, f"state {t} must have shape (1,1,c,d)")
    _require(t[2] >= 2, f"state {t} needs at least two level-2 candidates")
    _require(tgt[:3] == (1, 0, 2), f"target {list(tgt)} must have shape [1,0,2,d]")
    _require(tgt[3] <= t[3], f"d={tgt[3]} exceeds the level-3 count {t[3]}")
    return _search(state, tgt, _menu_102d)


def synth_type_100d(state: GameState, target: Sequence[int]) -> Question:
    """Builder for (1,0,3,d3) states asked [1,0,0,d] with d up to the
    whole level-3 count: the level-2 candidates are left untouched."""
    tgt = _as_target(target)
    t = state.state_type()
    _require(t[:3] == (1, 0, 3), f"state {t} must have shape (1,0,3,d)")
    _require(tgt[:3] == (1, 0, 0), f"target {list(tgt)} must have shape [1,0,0,d]")
    _require(tgt[3] <= t[3], f"d={tgt[3]} exceeds the level-3 count {t[3]}")
    return _search(state, tgt, _menu_general)


def realize(state: GameState, target: Sequence[int]) -> Question:
    """Build a question of the requested type with the most specific
    builder whose bounds accept it, falling back to the general one."""
    tgt = _as_target(target)
    last: Exception | None = None
    for op in (synth_type_100d, synth_type_102d, synth_type_11cd,
               synth_type_0bcd, synth_type_abcd):
        try:
            return op(state, tgt)
        except (AdmissibilityError, SynthesisError) as exc:
            last = exc
    raise SynthesisError(
        f"no builder realizes type {list(tgt)} on state {state.state_type()}"
    ) from last


# ---------------------------------------------------------------------------
# endgame

def synth_endgame(state: GameState, q: int | None = None) -> Question:
    """Single-interval question for states with at most one candidate
    below level 3.

    The interval holds the low candidate (if any) plus enough level-3
    neighbours to give the yes child exactly half the volume budget;
    with no low candidate it is a plain halving step.  Both children
    come out with character at most ``q - 1``.
    """
    t = state.state_type()
    if t[0] + t[1] + t[2] > 1:
        raise AdmissibilityError(f"state {t} has more than one candidate below level 3")
    if state.is_final():
        raise AdmissibilityError("final state needs no question")
    ch = character(t)
    if q is None:
        q = ch
    elif q != ch:
        raise AdmissibilityError(f"q={q} is not the character {ch} of {t}")
    support = sorted(state.support_positions())
    low = [p for p in support if state.level_of(p) < 3]
    if not low:
        window = support[:2 ** (q - 1)]
    else:
        c0 = low[0]
        j = state.level_of(c0)
        assert j is not None
        alpha = sum(binom(q - 1, i) for i in range(3 - j + 1))
        k = 2 ** (q - 1) - alpha
        i = support.index(c0)
        right = min(k, len(support) - 1 - i)
        left = k - right
        window = support[i - left:i + right + 1]
    return Question(((window[0], window[-1]),))
