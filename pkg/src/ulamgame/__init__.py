"""Perfect interval-question strategies for searching with up to three lies."""
from .core import (AdmissibilityError, GameState, StrategyGap, SynthesisError,
                   apply_answer, apply_answer_type, character, complement_qtype,
                   initial_state, is_balanced, level_weight, make_state, n_min,
                   question_type, state_from_levels, volume)
from .questions import Question
from .shape import (ShapeError, describe_necklace, embeddings, is_well_shaped,
                    preserves_well_shape, signature)
from .synthesis import (realize, synth_endgame, synth_type_0bcd,
                        synth_type_100d, synth_type_102d, synth_type_11cd,
                        synth_type_abcd)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError", "GameState", "Question", "ShapeError", "StrategyGap",
    "SynthesisError", "apply_answer", "apply_answer_type", "character",
    "complement_qtype", "describe_necklace", "embeddings", "initial_state",
    "is_balanced", "is_well_shaped", "level_weight", "make_state", "n_min",
    "preserves_well_shape", "question_type", "realize", "signature",
    "state_from_levels", "synth_endgame", "synth_type_0bcd", "synth_type_100d",
    "synth_type_102d", "synth_type_11cd", "synth_type_abcd", "volume",
]
