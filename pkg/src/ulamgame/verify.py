"""Whole-tree validation of the questioner.

``verify_perfect(m)`` plays out every combination of answers against the
planner and reports the worst number of questions used, checking along
the way that every undecided position stays on the twelve-slot template.
The walk is memoized on take geometry: positions that agree in their
linear readout behave identically under the planner, so each congruence
class is expanded once and the full tree -- millions of answer
sequences by m = 12 -- collapses to some tens of thousands of
expansions.  While a
padded twin is active the key falls back to the exact (state, twin)
pair, which over-distinguishes and therefore only adds coverage.

Trees too large to exhaust can instead be spot-checked end to end with
``verify_sampled``, which plays a fixed number of uniformly random
answer sequences, and both entry points accept ``jobs > 1`` to spread
the work over forked worker processes.  Every report records which mode
produced it.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from multiprocessing import get_context
from typing import NamedTuple

from .core import (AdmissibilityError, GameState, StateType, StrategyGap,
                   SynthesisError, apply_answer, initial_state, n_min)
from .shape import ShapeError, congruence_key, is_well_shaped
from .strategy import PhantomOverlay, plan_step

__all__ = [
    "Failure",
    "VerifyReport",
    "verify_perfect",
    "verify_sampled",
]

_PLAN_ERRORS = (AdmissibilityError, ShapeError, StrategyGap, SynthesisError)


class Failure(NamedTuple):
    """One defect found during a walk.

    ``path`` is the answer sequence from the root ('y'/'n' per question)
    that first reached the defect; memoized walks count each defective
    congruence class once, not once per path through it.
    """

    kind: str           # "misshapen" | "plan" | "overrun"
    path: str
    state_type: StateType
    detail: str


@dataclass(frozen=True)
class VerifyReport:
    """Outcome of one verification run.

    ``lengths[d]`` counts the root-to-leaf answer sequences that finish
    after exactly ``d`` questions (for sampled runs, the sampled paths),
    so ``sum(lengths)`` is the number of paths covered and
    ``len(lengths) - 1`` the worst depth seen.  ``expanded`` counts
    distinct positions expanded -- congruence classes in a collapsed
    walk, questions asked in a sampled one; parallel runs sum the
    workers' counts, so shared classes may be counted more than once.
    """

    m: int
    budget: int
    mode: str           # "exhaustive" | "exhaustive-exact" | "sampled"
    max_depth: int
    expanded: int
    paths: int
    lengths: tuple[int, ...]
    failures: tuple[Failure, ...]
    failure_count: int
    elapsed: float
    jobs: int = 1

    @property
    def ok(self) -> bool:
        return self.failure_count == 0 and self.max_depth <= self.budget

    def summary(self) -> str:
        state = "ok" if self.ok else "FAILED"
        return (f"m={self.m}: {state}, mode={self.mode}, "
                f"depth {self.max_depth}/{self.budget}, "
                f"{self.paths} paths, {self.expanded} expanded, "
                f"{self.failure_count} failures, {self.elapsed:.1f}s")


def _join(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """Length histogram of a parent node from its two children's."""
    out = [0] * (max(len(a), len(b)) + 1)
    for child in (a, b):
        for depth, count in enumerate(child):
            out[depth + 1] += count
    return tuple(out)


class _Walker:
    """Exhaustive answer-tree walk with memoization and defect capture."""

    def __init__(self, budget: int, collapse: bool, keep: int = 25):
        self.budget = budget
        self.collapse = collapse
        self.keep = keep
        self.memo: dict[object, tuple[int, ...]] = {}
        self.failures: list[Failure] = []
        self.failure_count = 0
        self.crumbs: list[str] = []

    def _flag(self, kind: str, state: GameState, detail: str) -> None:
        self.failure_count += 1
        if len(self.failures) < self.keep:
            self.failures.append(
                Failure(kind, "".join(self.crumbs), state.state_type(), detail))

    def _key(self, real: GameState, overlay: PhantomOverlay | None) -> object:
        if not self.collapse:
            return (real, overlay.padded if overlay is not None else None)
        if overlay is None:
            return (congruence_key(real), None)
        # keep exact identity while a padded twin is live: the twin's
        # coordinate steps are path state beyond the real geometry
        return (real, overlay.padded, overlay.steps)

    def walk(self, real: GameState, overlay: PhantomOverlay | None) -> tuple[int, ...]:
        key = self._key(real, overlay)
        got = self.memo.get(key)
        if got is not None:
            return got
        if real.is_final():
            self.memo[key] = (1,)
            return (1,)
        if len(self.crumbs) > self.budget:
            self._flag("overrun", real,
                       f"undecided after {len(self.crumbs)} questions")
            self.memo[key] = (1,)
            return (1,)
        try:
            step = plan_step(real, overlay)
        except _PLAN_ERRORS as exc:
            self._flag("plan", real, f"{type(exc).__name__}: {exc}")
            self.memo[key] = (1,)
            return (1,)
        if step is None:
            self._flag("plan", real, "no question for an undecided state")
            self.memo[key] = (1,)
            return (1,)
        hists = []
        for yes, crumb in ((True, "y"), (False, "n")):
            child = apply_answer(real, step.real_intervals, yes)
            twin = (step.overlay.child(step.padded_question, yes)
                    if step.padded_question is not None and step.overlay is not None
                    else step.overlay)
            if not child.is_final() and not is_well_shaped(child):
                self._flag("misshapen", child, f"after answer {crumb!r}")
            self.crumbs.append(crumb)
            hists.append(self.walk(child, twin))
            self.crumbs.pop()
        hist = _join(*hists)
        self.memo[key] = hist
        return hist


def _run_walk(real: GameState, overlay: PhantomOverlay | None,
              budget: int, collapse: bool) -> tuple[tuple[int, ...], int, list[Failure], int]:
    walker = _Walker(budget, collapse)
    hist = walker.walk(real, overlay)
    return hist, len(walker.memo), walker.failures, walker.failure_count


def _subtree_worker(args):
    real, overlay, prefix, budget, collapse = args
    walker = _Walker(budget, collapse)
    walker.crumbs = list(prefix)  # paths in failures stay rooted at the tree top
    hist = walker.walk(real, overlay)
    return hist, len(walker.memo), walker.failures, walker.failure_count, prefix


def _frontier(root: GameState, width: int):
    """Expand the top of the tree breadth-first until at least ``width``
    open positions remain, returning (open nodes, finished-path depths,
    failures found on the way)."""
    nodes: list[tuple[GameState, PhantomOverlay | None, str]] = [(root, None, "")]
    done: list[int] = []
    failures: list[Failure] = []
    while 0 < len(nodes) < width:
        grown: list[tuple[GameState, PhantomOverlay | None, str]] = []
        for real, overlay, prefix in nodes:
            if real.is_final():
                done.append(len(prefix))
                continue
            try:
                step = plan_step(real, overlay)
            except _PLAN_ERRORS as exc:
                failures.append(Failure("plan", prefix, real.state_type(),
                                        f"{type(exc).__name__}: {exc}"))
                continue
            for yes, crumb in ((True, "y"), (False, "n")):
                child = apply_answer(real, step.real_intervals, yes)
                twin = (step.overlay.child(step.padded_question, yes)
                        if step.padded_question is not None and step.overlay is not None
                        else step.overlay)
                if not child.is_final() and not is_well_shaped(child):
                    failures.append(Failure("misshapen", prefix + crumb,
                                            child.state_type(), "frontier split"))
                grown.append((child, twin, prefix + crumb))
        nodes = grown
    return nodes, done, failures


def verify_perfect(m: int, budget: int | None = None, *, jobs: int = 1,
                   collapse: bool = True) -> VerifyReport:
    """Walk every answer sequence of the planner's tree for size ``m``.

    The report's ``max_depth`` is the exact worst-case number of
    questions; a perfect run has ``max_depth == n_min(m)`` and no
    failures.  ``collapse=False`` keys the memo on exact states instead
    of congruence classes -- slower, but a useful cross-check.
    ``jobs > 1`` forks workers over a shallow frontier.
    """
    if budget is None:
        budget = n_min(m)
    mode = "exhaustive" if collapse else "exhaustive-exact"
    root = initial_state(m)
    start = time.perf_counter()
    if jobs <= 1:
        hist, expanded, failures, failure_count = _run_walk(
            root, None, budget, collapse)
    else:
        nodes, done, frontier_failures = _frontier(root, 4 * jobs)
        tasks = [(real, overlay, prefix, budget, collapse)
                 for real, overlay, prefix in nodes]
        hist = tuple(sum(1 for d in done if d == i)
                     for i in range(max(done, default=-1) + 1))
        expanded = 0
        failures = list(frontier_failures)
        failure_count = len(frontier_failures)
        with get_context("fork").Pool(jobs) as pool:
            for sub_hist, sub_classes, sub_failures, sub_count, prefix in \
                    pool.imap_unordered(_subtree_worker, tasks):
                shifted = (0,) * len(prefix) + sub_hist
                merged = [0] * max(len(hist), len(shifted))
                for src in (hist, shifted):
                    for depth, count in enumerate(src):
                        merged[depth] += count
                hist = tuple(merged)
                expanded += sub_classes
                failures.extend(sub_failures)
                failure_count += sub_count
        failures = failures[:25]
    elapsed = time.perf_counter() - start
    return VerifyReport(
        m=m, budget=budget, mode=mode,
        max_depth=len(hist) - 1, expanded=expanded, paths=sum(hist),
        lengths=hist, failures=tuple(failures), failure_count=failure_count,
        elapsed=elapsed, jobs=jobs)


def _sample_chunk(args):
    m, budget, paths, seed = args
    rng = random.Random(seed)
    root = initial_state(m)
    lengths = [0] * (budget + 2)
    failures: list[Failure] = []
    failure_count = 0
    asked = 0
    for _ in range(paths):
        real: GameState = root
        overlay: PhantomOverlay | None = None
        crumbs: list[str] = []
        while not real.is_final():
            if len(crumbs) > budget:
                failure_count += 1
                if len(failures) < 25:
                    failures.append(Failure(
                        "overrun", "".join(crumbs), real.state_type(),
                        f"undecided after {len(crumbs)} questions"))
                break
            try:
                step = plan_step(real, overlay)
            except _PLAN_ERRORS as exc:
                failure_count += 1
                if len(failures) < 25:
                    failures.append(Failure(
                        "plan", "".join(crumbs), real.state_type(),
                        f"{type(exc).__name__}: {exc}"))
                break
            yes = bool(rng.getrandbits(1))
            real = apply_answer(real, step.real_intervals, yes)
            overlay = (step.overlay.child(step.padded_question, yes)
                       if step.padded_question is not None and step.overlay is not None
                       else step.overlay)
            crumbs.append("y" if yes else "n")
            asked += 1
            if not real.is_final() and not is_well_shaped(real):
                failure_count += 1
                if len(failures) < 25:
                    failures.append(Failure(
                        "misshapen", "".join(crumbs), real.state_type(), ""))
                break
        else:
            lengths[len(crumbs)] += 1
    return lengths, failures, failure_count, asked


def verify_sampled(m: int, budget: int | None = None, *, paths: int = 10 ** 6,
                   seed: int = 0, jobs: int = 1) -> VerifyReport:
    """Play ``paths`` uniformly random answer sequences end to end.

    A downgrade from :func:`verify_perfect` for trees too large to
    exhaust: coverage is sampled, not total, so only failures are
    conclusive.  Per-chunk seeds derive from ``seed``, making runs
    reproducible for a fixed ``jobs`` split.
    """
    if budget is None:
        budget = n_min(m)
    start = time.perf_counter()
    jobs = max(1, jobs)
    split = [paths // jobs] * jobs
    for i in range(paths - sum(split)):
        split[i] += 1
    tasks = [(m, budget, count, seed + index)
             for index, count in enumerate(split) if count]
    if len(tasks) <= 1:
        results = [_sample_chunk(tasks[0])] if tasks else []
    else:
        with get_context("fork").Pool(len(tasks)) as pool:
            results = pool.map(_sample_chunk, tasks)
    lengths = [0] * (budget + 2)
    failures: list[Failure] = []
    failure_count = 0
    asked = 0
    for sub_lengths, sub_failures, sub_count, sub_asked in results:
        for depth, count in enumerate(sub_lengths):
            lengths[depth] += count
        failures.extend(sub_failures)
        failure_count += sub_count
        asked += sub_asked
    while len(lengths) > 1 and lengths[-1] == 0:
        lengths.pop()
    elapsed = time.perf_counter() - start
    return VerifyReport(
        m=m, budget=budget, mode="sampled",
        max_depth=len(lengths) - 1, expanded=asked, paths=sum(lengths),
        lengths=tuple(lengths), failures=tuple(failures[:25]),
        failure_count=failure_count, elapsed=elapsed, jobs=jobs)
