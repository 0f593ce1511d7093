"""Finite-scale MSO laboratory: structures, formulas, rank types and EF games."""
from .formulas import (
    EVAL_GUARD,
    FormulaError,
    GuardError,
    Vocabulary,
    evaluate,
    free_names,
    parse_formula,
    quantifier_rank,
    sample_sentences,
    sentence_agreement,
    to_text,
    vocabulary_of,
)
from .game import GameTrace, Round, ef_game_search
from .structures import (
    LabStructure,
    StructureError,
    load_structure,
    product_structure,
    restrict,
    save_structure,
    structure_from_dict,
    structure_to_dict,
    tree_structure,
    word_structure,
)
from .types import RankType, VocabularyError, ef_equivalent, rank_type
