"""Workbench for (b, k)-hash codes and a small MSO / Ehrenfeucht-Fraisse laboratory."""
from .hashcore import (
    Code,
    CodeError,
    CodeParams,
    Word,
    binary_to_ternary,
    diff_mask,
    first_violation,
    is_hash_code,
    is_hashed,
    product_word,
    read_code,
    relation_R,
    ternary_to_binary,
    witness_family,
    write_code,
)
from .searcher import (
    BudgetExceeded,
    ExhaustedNoSolution,
    Found,
    SearchConfig,
    Symmetry,
    brute_force_max,
    canonicalize,
    max_size,
    search_exact,
)

__version__ = "0.1.0"
