"""Simplicial extension operators ``E_m`` and their relation to local extensions.

``E_m`` is stored as a matrix from coordinates of the vanishing-trace space of
the reference ``m``-simplex (in the basis of
:func:`~geodecomp.funcspace.vanishing_trace` on :func:`reference_complex`)
into the coordinates of the space on ``Q^{m+1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Mapping

from ..errors import InvalidFamily, MissingEm, NoSuitableFacePair
from ..extension import ExtensionFamily, verify_consistent_family
from ..funcspace import FunctionSpace, Violation, vanishing_trace
from ..linalg import RatMatrix, Solution, hstack, inverse, solve, vstack
from .complex import SimplicialComplex, StandardSimplexPair, collapse_map, face_name, reference_complex
from .forms import BarycentricForm
from .spaces import SimplicialSpace

__all__ = [
    "Feasible",
    "NoExtension",
    "reference_vanishing",
    "verify_simpext",
    "bubble_extension",
    "whitney_extension",
    "default_extension",
    "solve_simpext",
    "simpext_system",
    "local_ops_from_simplicial",
    "simplicial_from_local",
]


@lru_cache(maxsize=None)
def reference_vanishing(space: SimplicialSpace, m: int) -> RatMatrix:
    """Basis (columns, in space coordinates) of the vanishing-trace space on ``T^m``."""
    c = reference_complex(m)
    return vanishing_trace(space.on_complex(c), face_name(range(m + 1))).basis


def _q_faces(m: int) -> list[tuple[int, ...]]:
    """Proper faces of ``Q^{m+1}`` in (size, tuple) order, local vertices ``0..m+1``."""
    return [s for r in range(1, m + 2) for s in combinations(range(m + 2), r)]


def simpext_system(space: SimplicialSpace, m: int) -> tuple[RatMatrix, RatMatrix]:
    """``M E = B`` encodes both defining conditions of ``E_m``.

    One row block per proper face ``S`` of ``Q^{m+1}``: the trace onto ``S``
    must be the inclusion when ``S = T^m`` and zero otherwise.
    """
    pair = StandardSimplexPair(m)
    v = reference_vanishing(space, m)
    blocks, rhs = [], []
    for s in _q_faces(m):
        tr = space.pullback_matrix(s, m + 1)
        blocks.append(tr)
        rhs.append(v if s == pair.t_face else RatMatrix.zeros(tr.rows, v.cols))
    return vstack(blocks, cols=space.dim(m + 1)), vstack(rhs, cols=v.cols)


def verify_simpext(space: SimplicialSpace, m: int, em: RatMatrix) -> list[Violation]:
    v = reference_vanishing(space, m)
    if em.shape != (space.dim(m + 1), v.cols):
        return [Violation("shape", (m,), f"E_{m} has shape {em.shape}, expected {(space.dim(m + 1), v.cols)}")]
    pair = StandardSimplexPair(m)
    out = []
    for s in _q_faces(m):
        image = space.pullback_matrix(s, m + 1) @ em
        if s == pair.t_face:
            if image != v:
                out.append(Violation("restriction", (m,), "trace onto T^m is not the inclusion"))
        elif not image.is_zero():
            out.append(Violation("vanishing", (m, s), f"trace onto the face {s} of Q^{m + 1} is nonzero"))
    return out


def _lift_to_q(form: BarycentricForm) -> BarycentricForm:
    """Reuse the symbols of ``T^m`` as the last ``m + 1`` symbols on ``Q^{m+1}``."""
    return BarycentricForm(form.n + 1, {((0,) + exps, tuple(w + 1 for w in wedge)): c
                                        for (exps, wedge), c in form.terms.items()})


def _lift_extension(space: SimplicialSpace, m: int) -> RatMatrix:
    v = reference_vanishing(space, m)
    cols = []
    for j in range(v.cols):
        # basis forms are homogeneous, so this is the homogeneous representative
        phi = space.form(m, v.take_columns([j]))
        cols.append(space.coordinates(_lift_to_q(phi)))
    em = hstack(cols, rows=space.dim(m + 1))
    problems = verify_simpext(space, m, em)
    if problems:
        raise InvalidFamily(problems)
    return em


def bubble_extension(r: int, m: int) -> RatMatrix:
    """``E_m`` for Lagrange elements of degree ``r >= 1``."""
    if r < 1:
        raise ValueError("bubble extension needs degree at least 1")
    return _lift_extension(SimplicialSpace("polyforms", r, 0), m)


def whitney_extension(k: int, m: int) -> RatMatrix:
    return _lift_extension(SimplicialSpace("whitney", 1, k), m)


def default_extension(space: SimplicialSpace, m: int) -> RatMatrix | None:
    """Built-in ``E_m`` when one exists (Lagrange ``r >= 1``, Whitney), else None."""
    if space.family == "whitney":
        return whitney_extension(space.k, m)
    if space.k == 0 and space.r >= 1:
        return bubble_extension(space.r, m)
    if reference_vanishing(space, m).cols == 0:
        return RatMatrix.zeros(space.dim(m + 1), 0)
    return None


@dataclass
class Feasible:
    matrix: RatMatrix


@dataclass
class NoExtension:
    """``certificate`` is ``y`` with ``y^T system = 0`` and ``y^T rhs != 0``."""

    certificate: RatMatrix
    system: RatMatrix
    rhs: RatMatrix


def solve_simpext(space: SimplicialSpace, m: int) -> Feasible | NoExtension:
    system, rhs = simpext_system(space, m)
    result = solve(system, rhs)
    if isinstance(result, Solution):
        return Feasible(result.x)
    return NoExtension(result.certificate, system, rhs)


# -- local operators <-> simplicial extension operators ---------------------------


def _to_reference(space: SimplicialSpace, fs: FunctionSpace, k: tuple[int, ...]) -> RatMatrix:
    """Coordinates change ``X`` with ``V_K X = (Psi_K^K)^* V_T`` from the reference to ``K``."""
    m = len(k) - 1
    vk = vanishing_trace(fs, face_name(k)).basis
    # Psi_K^K sends the i-th vertex of K to e_i, i.e. local vertex i to i
    image = space.pullback_matrix(tuple(range(m + 1)), m) @ reference_vanishing(space, m)
    x = solve(vk, image)
    if not isinstance(x, Solution):
        raise ValueError(f"vanishing-trace spaces of {face_name(k)} and T^{m} do not match")
    return x.x


def local_ops_from_simplicial(complex_: SimplicialComplex, space: SimplicialSpace,
                              ems: Mapping[int, RatMatrix], fs: FunctionSpace | None = None) -> ExtensionFamily:
    """Family ``E[K -> F] = (Phi_K^F)^* E_m X^{-1}`` for ``dim K = m < n``; zero extension at dimension ``n``."""
    fs = fs if fs is not None else space.on_complex(complex_)
    n = complex_.dim
    ops = {}
    for k in complex_.faces:
        m = len(k) - 1
        name_k = face_name(k)
        vk = vanishing_trace(fs, name_k).basis
        if vk.cols == 0:
            continue
        if m == n:
            ops[(name_k, name_k)] = vk
            continue
        if m not in ems or ems[m] is None:
            raise MissingEm(f"no simplicial extension operator in dimension {m}")
        phi = collapse_map(complex_, k)
        inner = ems[m] @ inverse(_to_reference(space, fs, k))
        for f in complex_.faces:
            if not set(k) <= set(f):
                continue
            image = space.map_matrix(phi.restrict(f)) @ inner
            if not image.is_zero():
                ops[(name_k, face_name(f))] = image
    family = ExtensionFamily(fs, ops)
    problems = verify_consistent_family(family)
    if problems:
        raise InvalidFamily(problems)
    return family


def simplicial_from_local(complex_: SimplicialComplex, space: SimplicialSpace,
                          family: ExtensionFamily, m: int) -> RatMatrix:
    """Recover ``E_m = ((Phi_K^T)^*)^{-1} E[K -> T] X`` from an ``(m+1)``-face ``T``.

    ``T`` is the first ``(m+1)``-face and ``K`` is ``T`` without its last vertex.
    """
    candidates = complex_.faces_of_dim(m + 1)
    if not candidates:
        raise NoSuitableFacePair(f"complex has no face of dimension {m + 1}")
    t = candidates[0]
    k = t[:-1]
    fs = family.space
    phi = collapse_map(complex_, k).restrict(t)
    pull = space.map_matrix(phi)
    em = inverse(pull) @ family.op(face_name(k), face_name(t)) @ _to_reference(space, fs, k)
    problems = verify_simpext(space, m, em)
    if problems:
        raise InvalidFamily(problems)
    return em
