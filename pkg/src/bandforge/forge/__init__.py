"""The four basis constructions and their shared partition and lemma utilities."""

from .band import build_banded_diagonal, reflection_target
from .large import build_large_entries, large_constants, plank_weights_ok
from .lemmas import Lemma2dState, PearcyState, defect_vectors, lemma2d_state, pearcy_constants_ok, pearcy_state
from .partitions import (
    Block,
    PartitionScheme,
    Sparsified,
    dyadic_partition,
    greedy_blocks,
    residue_partition,
    round_robin_labels,
    select_residue_class,
    sparsify_weights,
    two_adic_valuation,
)
from .small import build_small_entries, orthogonality_depths
from .state import BuildState, SeedFamily, StepRecord
from .tridiag import admissible_seed, build_tridiagonal, choose_seed, tridiag_limits

__all__ = [
    "Block",
    "BuildState",
    "Lemma2dState",
    "PartitionScheme",
    "PearcyState",
    "SeedFamily",
    "Sparsified",
    "StepRecord",
    "admissible_seed",
    "build_banded_diagonal",
    "build_large_entries",
    "build_small_entries",
    "build_tridiagonal",
    "choose_seed",
    "defect_vectors",
    "dyadic_partition",
    "greedy_blocks",
    "large_constants",
    "lemma2d_state",
    "orthogonality_depths",
    "pearcy_constants_ok",
    "pearcy_state",
    "plank_weights_ok",
    "reflection_target",
    "residue_partition",
    "round_robin_labels",
    "select_residue_class",
    "sparsify_weights",
    "tridiag_limits",
    "two_adic_valuation",
]
