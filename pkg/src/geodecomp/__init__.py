"""Exact geometric decompositions of finite element spaces on posets.

Everything is computed in exact rational arithmetic: posets of faces, function
spaces with trace maps, consistent extension families, the geometric and dual
decompositions they induce, and a simplicial backend with the standard
polynomial spaces.
"""

from .decomp import (
    Decomposition,
    DualDecomposition,
    choose_daggers,
    dagger_euclidean,
    dagger_projection,
    decompose_step,
    dual_decomposition,
    dual_step,
    geometric_decomposition,
    local_decomposition,
    unisolvence_check,
    verify_dagger,
)
from .extension import (
    ExtensionFamily,
    FullExtension,
    admissible_tuples,
    consistent_from_local,
    extend_family_to_hat,
    extend_to_full_space,
    local_from_consistent,
    verify_consistent_family,
    verify_full_extension,
)
from .funcspace import (
    FunctionSpace,
    GlobalSpace,
    Subspace,
    Violation,
    adjoin_global,
    assemble_global,
    restrict_to_down_set,
    synthesize_presheaf,
    vanish_on_lower_set,
    vanishing_trace,
    verify_function_space,
)
from .linalg import (
    Certified,
    Failure,
    Infeasible,
    RatMatrix,
    Solution,
    direct_sum_check,
    inverse,
    kernel_basis,
    rank,
    rref,
    solve,
)
from .poset import Poset, adjoin_top, build_poset, down_set, is_lower_set, peel_sequence

__version__ = "0.1.0"

__all__ = [
    "Certified",
    "Decomposition",
    "DualDecomposition",
    "ExtensionFamily",
    "Failure",
    "FullExtension",
    "FunctionSpace",
    "GlobalSpace",
    "Infeasible",
    "Poset",
    "RatMatrix",
    "Solution",
    "Subspace",
    "Violation",
    "adjoin_global",
    "adjoin_top",
    "admissible_tuples",
    "assemble_global",
    "build_poset",
    "choose_daggers",
    "consistent_from_local",
    "dagger_euclidean",
    "dagger_projection",
    "decompose_step",
    "direct_sum_check",
    "down_set",
    "dual_decomposition",
    "dual_step",
    "extend_family_to_hat",
    "extend_to_full_space",
    "geometric_decomposition",
    "inverse",
    "is_lower_set",
    "kernel_basis",
    "local_decomposition",
    "local_from_consistent",
    "peel_sequence",
    "rank",
    "restrict_to_down_set",
    "rref",
    "solve",
    "synthesize_presheaf",
    "unisolvence_check",
    "vanish_on_lower_set",
    "vanishing_trace",
    "verify_consistent_family",
    "verify_dagger",
    "verify_full_extension",
    "verify_function_space",
]
