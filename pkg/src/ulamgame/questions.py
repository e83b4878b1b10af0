"""Interval questions and their wire format.

A question is "is the secret in one of these position ranges?", with at
most four ranges.  The printable literal is comma-joined ``lo-hi`` pairs
with inclusive bounds, e.g. ``0-3,9-9,14-20``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import (AdmissibilityError, GameState, Interval, QType, apply_answer,
                   normalize_intervals, question_type)

MAX_INTERVALS = 4


@dataclass(frozen=True)
class Question:
    intervals: tuple[Interval, ...]

    def __post_init__(self) -> None:
        ivs = normalize_intervals(self.intervals)
        if not ivs:
            raise AdmissibilityError("question needs at least one interval")
        if len(ivs) > MAX_INTERVALS:
            raise AdmissibilityError(f"more than {MAX_INTERVALS} intervals: {ivs}")
        object.__setattr__(self, "intervals", ivs)

    # -- formatting -------------------------------------------------------
    def literal(self) -> str:
        return ",".join(f"{lo}-{hi}" for lo, hi in self.intervals)

    @classmethod
    def from_literal(cls, text: str) -> "Question":
        ivs = []
        for part in text.split(","):
            lo, sep, hi = part.partition("-")
            if not sep:
                raise ValueError(f"bad interval literal {part!r}")
            ivs.append((int(lo), int(hi)))
        return cls(tuple(ivs))

    # -- game use ---------------------------------------------------------
    def type_in(self, state: GameState) -> QType:
        return question_type(state, self.intervals)

    def child(self, state: GameState, yes: bool) -> GameState:
        return apply_answer(state, self.intervals, yes)

    def contains(self, pos: int) -> bool:
        return any(lo <= pos <= hi for lo, hi in self.intervals)
