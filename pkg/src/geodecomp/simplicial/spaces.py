"""Built-in polynomial spaces on simplices and their function spaces on complexes.

Every space fixes a basis of forms on the ``n``-simplex for each ``n``.  A
form is turned into coordinates by matching canonical coefficients, and trace
matrices are pullbacks along local face inclusions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

from ..errors import NotInSpace
from ..funcspace import FunctionSpace
from ..linalg import RatMatrix, hstack, independent_columns, inverse
from .complex import SimplicialComplex, SimplicialMap, face_name, local_inclusion
from .forms import BarycentricForm

__all__ = [
    "SimplicialSpace",
    "space_lagrange",
    "space_polyforms",
    "space_whitney",
    "homogeneous_exponents",
]


def homogeneous_exponents(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All multi-indices of length ``nvars`` summing to ``degree``, descending lexicographically."""
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []
    for first in range(degree, -1, -1):
        out.extend((first,) + rest for rest in homogeneous_exponents(nvars - 1, degree - first))
    return out


@dataclass(frozen=True)
class SimplicialSpace:
    """``family`` is ``"polyforms"`` (with Lagrange as ``k = 0``) or ``"whitney"``."""

    family: str
    r: int
    k: int

    @property
    def name(self) -> str:
        if self.family == "whitney":
            return f"whitney:{self.k}"
        if self.k == 0:
            return f"lagrange:{self.r}"
        return f"plambda:{self.r}:{self.k}"

    def basis(self, n: int) -> list[BarycentricForm]:
        return _basis(self, n)

    def dim(self, n: int) -> int:
        return len(_basis(self, n))

    def formula_dim(self, n: int) -> int:
        if self.family == "whitney":
            return comb(n + 1, self.k + 1)
        return comb(n + self.r, n) * comb(n, self.k)

    def coordinates(self, form: BarycentricForm) -> RatMatrix:
        """Column of coordinates of ``form`` in the basis; NotInSpace if it is not in the span."""
        index, mat, rows, inv = _coordinate_data(self, form.n)
        canon = form.canonical()
        if any(key not in index for key in canon):
            raise NotInSpace(f"{form!r} is not in {self.name} on a {form.n}-simplex")
        vec = [[0] for _ in index]
        for key, c in canon.items():
            vec[index[key]] = [c]
        full = RatMatrix(vec, rows=len(index), cols=1)
        x = inv @ full.take_rows(rows)
        if mat @ x != full:
            raise NotInSpace(f"{form!r} is not in {self.name} on a {form.n}-simplex")
        return x

    def form(self, n: int, coords: RatMatrix) -> BarycentricForm:
        out = BarycentricForm(n)
        for j, b in enumerate(self.basis(n)):
            c = coords[j, 0]
            if c:
                out = out + b.scale(c)
        return out

    def pullback_matrix(self, vertex_images: tuple[int, ...], codomain_n: int) -> RatMatrix:
        """Matrix of the pullback along a simplicial map, in the two bases."""
        return _pullback_matrix(self, tuple(vertex_images), codomain_n)

    def map_matrix(self, phi: SimplicialMap) -> RatMatrix:
        return self.pullback_matrix(phi.vertex_images, phi.codomain_n)

    def on_complex(self, complex_: SimplicialComplex) -> FunctionSpace:
        dims = {face_name(f): self.dim(len(f) - 1) for f in complex_.faces}
        traces = {}
        for f in complex_.faces:
            for r in range(1, len(f) + 1):
                for k in combinations(f, r):
                    traces[(face_name(k), face_name(f))] = self.pullback_matrix(local_inclusion(k, f), len(f) - 1)
        labels = {face_name(f): tuple(repr(b) for b in self.basis(len(f) - 1)) for f in complex_.faces}
        return FunctionSpace(complex_.poset, dims, traces, labels, name=self.name)


@lru_cache(maxsize=None)
def _basis_cached(space: SimplicialSpace, n: int) -> tuple[BarycentricForm, ...]:
    if space.family == "whitney":
        return tuple(BarycentricForm.whitney(n, sigma) for sigma in combinations(range(n + 1), space.k + 1))
    out = []
    for exps in homogeneous_exponents(n + 1, space.r):
        for sigma in combinations(range(n), space.k):
            out.append(BarycentricForm.monomial(n, exps, sigma))
    return tuple(out)


def _basis(space: SimplicialSpace, n: int) -> list[BarycentricForm]:
    return list(_basis_cached(space, n))


@lru_cache(maxsize=None)
def _coordinate_data(space: SimplicialSpace, n: int):
    """Canonical-key index, the basis matrix, a row subset with invertible square block, and its inverse."""
    canons = [b.canonical() for b in _basis_cached(space, n)]
    keys = sorted({key for c in canons for key in c})
    index = {key: i for i, key in enumerate(keys)}
    columns = []
    for c in canons:
        col = [0] * len(keys)
        for key, val in c.items():
            col[index[key]] = val
        columns.append(col)
    mat = RatMatrix([[columns[j][i] for j in range(len(columns))] for i in range(len(keys))],
                    rows=len(keys), cols=len(columns))
    rows = independent_columns(mat.T)
    if len(rows) != len(columns):
        raise ValueError(f"basis of {space.name} on a {n}-simplex is linearly dependent")
    inv = inverse(mat.take_rows(rows))
    return index, mat, rows, inv


@lru_cache(maxsize=None)
def _pullback_matrix(space: SimplicialSpace, vertex_images: tuple[int, ...], codomain_n: int) -> RatMatrix:
    domain_n = len(vertex_images) - 1
    cols = [space.coordinates(b.pullback(vertex_images, domain_n)) for b in _basis_cached(space, codomain_n)]
    return hstack(cols, rows=space.dim(domain_n))


def space_lagrange(r: int) -> SimplicialSpace:
    if r < 0:
        raise ValueError("degree must be nonnegative")
    return SimplicialSpace("polyforms", r, 0)


def space_polyforms(r: int, k: int) -> SimplicialSpace:
    if r < 0 or k < 0:
        raise ValueError("degree and form degree must be nonnegative")
    return SimplicialSpace("polyforms", r, k)


def space_whitney(k: int) -> SimplicialSpace:
    if k < 0:
        raise ValueError("form degree must be nonnegative")
    return SimplicialSpace("whitney", 1, k)
