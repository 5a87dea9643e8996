"""Simplicial complexes, barycentric forms and the built-in finite element spaces."""

from .complex import (
    CollapseMap,
    SimplicialComplex,
    SimplicialMap,
    StandardSimplexPair,
    build_complex,
    collapse_map,
    face_name,
    pullback_form,
    reference_complex,
)
from .extension import (
    Feasible,
    NoExtension,
    bubble_extension,
    default_extension,
    local_ops_from_simplicial,
    reference_vanishing,
    simplicial_from_local,
    solve_simpext,
    verify_simpext,
    whitney_extension,
)
from .forms import BarycentricForm
from .spaces import SimplicialSpace, space_lagrange, space_polyforms, space_whitney

__all__ = [
    "BarycentricForm",
    "CollapseMap",
    "Feasible",
    "NoExtension",
    "SimplicialComplex",
    "SimplicialMap",
    "SimplicialSpace",
    "StandardSimplexPair",
    "bubble_extension",
    "build_complex",
    "collapse_map",
    "default_extension",
    "face_name",
    "local_ops_from_simplicial",
    "pullback_form",
    "reference_complex",
    "reference_vanishing",
    "simplicial_from_local",
    "solve_simpext",
    "space_lagrange",
    "space_polyforms",
    "space_whitney",
    "verify_simpext",
    "whitney_extension",
]
