from ._backend import BACKEND
from .lemmas import (
    LAYOUTS,
    LayoutError,
    LemmaHypothesisError,
    LemmaReport,
    assemble_layout,
    check_block_gluing,
    check_lemma_A2,
    check_lemma_A3,
    run_trials,
)
from .matrix import ExactMatrix, MatrixError, column_span_contains, det, inverse, rank, rank_and_kernel
from .vandermonde import V0, V1, VandermondeError, VandermondeSpec, vandermonde_type

__all__ = [
    "BACKEND",
    "LAYOUTS",
    "ExactMatrix",
    "LayoutError",
    "LemmaHypothesisError",
    "LemmaReport",
    "MatrixError",
    "V0",
    "V1",
    "VandermondeError",
    "VandermondeSpec",
    "assemble_layout",
    "check_block_gluing",
    "check_lemma_A2",
    "check_lemma_A3",
    "column_span_contains",
    "det",
    "inverse",
    "rank",
    "rank_and_kernel",
    "run_trials",
    "vandermonde_type",
]
