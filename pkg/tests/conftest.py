"""Shared builders for necklace-shaped states and questions.

Kept as plain functions (not fixtures) so both the hypothesis strategies
and the big acceptance sweeps can call them with their own randomness.
"""

from __future__ import annotations

import random

from ulamgame.core import GameState, state_from_levels
from ulamgame.shape import TEMPLATES, support_groups


def necklace_state(pattern: int, sizes, *, rotate: int = 0,
                   rng: random.Random | None = None,
                   eliminated: int = 0) -> GameState:
    """Expand a template into a concrete state, one arc per nonzero slot.

    ``sizes`` gives the element count of each of the twelve slots in
    template order, or maps slot names to counts (missing names empty).
    The circular word can be rotated and sprinkled with already-eliminated
    positions; neither changes the necklace.
    """
    if isinstance(sizes, dict):
        sizes = [sizes.get(name, 0) for name, _ in TEMPLATES[pattern]]
    levels: list[int | None] = []
    for (_, level), size in zip(TEMPLATES[pattern], sizes):
        levels.extend([level] * size)
    if not levels:
        raise ValueError("all twelve slots empty")
    rotate %= len(levels)
    levels = levels[rotate:] + levels[:rotate]
    for _ in range(eliminated):
        assert rng is not None
        levels.insert(rng.randrange(len(levels) + 1), None)
    return state_from_levels(levels)


def single_touch_intervals(state: GameState, rng: random.Random,
                           max_arcs: int | None = None) -> list[tuple[int, int]]:
    """Random question intervals meeting each support arc at most once.

    Per arc the covered part is one contiguous stretch of its positions
    that does not cross the wrap, so the enclosing line interval holds no
    other arc's elements.
    """
    groups = support_groups(state)
    if not groups:
        return []
    limit = len(groups) if max_arcs is None else min(max_arcs, len(groups))
    chosen = rng.sample(range(len(groups)), rng.randint(1, limit))
    intervals = []
    for gi in chosen:
        cyc = groups[gi].positions  # cycle order: increasing except at the wrap
        runs: list[list[int]] = [[cyc[0]]]
        for p in cyc[1:]:
            if p > runs[-1][-1]:
                runs[-1].append(p)
            else:
                runs.append([p])
        run = rng.choice(runs)
        lo = rng.randrange(len(run))
        hi = rng.randrange(lo, len(run))
        intervals.append((run[lo], run[hi]))
    return sorted(intervals)
