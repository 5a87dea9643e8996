"""Abstract simplicial complexes, simplicial maps and the collapse maps onto Q^{m+1}.

Faces are sorted vertex tuples named ``"0,1,2"``.  Inside a face the vertices
are numbered locally in increasing order, so a map between two simplices is
just a tuple of local vertex images.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from ..errors import DimensionMismatch, DuplicateVertexInCell, IndexOutOfRange, UnknownFace
from ..poset import Poset, build_poset
from .forms import BarycentricForm

__all__ = [
    "SimplicialComplex",
    "SimplicialMap",
    "CollapseMap",
    "StandardSimplexPair",
    "build_complex",
    "reference_complex",
    "face_name",
    "pullback_form",
    "collapse_map",
]

Face = tuple[int, ...]


def face_name(face: Iterable[int]) -> str:
    return ",".join(str(v) for v in sorted(face))


class SimplicialComplex:
    """Closure of a list of cells under taking nonempty subsets.

    Every vertex ``0..vertex_count-1`` is a face, even when no cell uses it.
    """

    def __init__(self, vertex_count: int, top_cells: Sequence[Face]):
        self.vertex_count = vertex_count
        closure: set[Face] = {(v,) for v in range(vertex_count)}
        for cell in top_cells:
            closure.update(sub for r in range(1, len(cell) + 1) for sub in combinations(cell, r))
        self.faces: list[Face] = sorted(closure, key=lambda f: (len(f), f))
        # cells not contained in a larger face
        self.top_cells: list[Face] = [
            f for f in self.faces if not any(len(g) > len(f) and set(f) <= set(g) for g in self.faces)
        ]
        self._by_name = {face_name(f): f for f in self.faces}

    @property
    def dim(self) -> int:
        return max(len(f) for f in self.faces) - 1 if self.faces else -1

    @cached_property
    def poset(self) -> Poset:
        names = [face_name(f) for f in self.faces]
        covers = [(face_name(f[:i] + f[i + 1:]), face_name(f)) for f in self.faces if len(f) > 1 for i in range(len(f))]
        return build_poset(names, covers)

    def names(self) -> list[str]:
        return [face_name(f) for f in self.faces]

    def face(self, name: str) -> Face:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownFace(name) from None

    def faces_of_dim(self, d: int) -> list[Face]:
        return [f for f in self.faces if len(f) == d + 1]

    def __repr__(self) -> str:
        return f"SimplicialComplex({self.vertex_count} vertices, {len(self.top_cells)} cells, dim {self.dim})"


def build_complex(vertex_count: int, top_cells: Iterable[Sequence[int]]) -> SimplicialComplex:
    cells = []
    for cell in top_cells:
        cell = tuple(int(v) for v in cell)
        if not cell:
            raise IndexOutOfRange("empty cell")
        if len(set(cell)) != len(cell):
            raise DuplicateVertexInCell(f"cell {list(cell)} repeats a vertex")
        bad = [v for v in cell if not 0 <= v < vertex_count]
        if bad:
            raise IndexOutOfRange(f"cell {list(cell)} uses vertex {bad[0]} outside 0..{vertex_count - 1}")
        cells.append(tuple(sorted(cell)))
    return SimplicialComplex(vertex_count, cells)


def reference_complex(n: int) -> SimplicialComplex:
    """One ``n``-simplex with vertices ``0..n``."""
    return build_complex(n + 1, [tuple(range(n + 1))])


def local_inclusion(k: Face, f: Face) -> tuple[int, ...]:
    """Local vertex images of the inclusion of face ``k`` into face ``f``."""
    pos = {v: i for i, v in enumerate(f)}
    return tuple(pos[v] for v in k)


@dataclass(frozen=True)
class SimplicialMap:
    """Vertex-to-vertex affine map from a ``domain_n``-simplex to a ``codomain_n``-simplex."""

    domain_n: int
    codomain_n: int
    vertex_images: tuple[int, ...]

    def __post_init__(self):
        if len(self.vertex_images) != self.domain_n + 1:
            raise DimensionMismatch("one image per domain vertex is required")
        if any(not 0 <= w <= self.codomain_n for w in self.vertex_images):
            raise DimensionMismatch("vertex image outside the codomain")

    def then(self, other: "SimplicialMap") -> "SimplicialMap":
        """``other`` after ``self``."""
        if other.domain_n != self.codomain_n:
            raise DimensionMismatch("maps are not composable")
        return SimplicialMap(self.domain_n, other.codomain_n, tuple(other.vertex_images[w] for w in self.vertex_images))

    def image_face(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.vertex_images)))

    def corestrict(self) -> tuple["SimplicialMap", tuple[int, ...]]:
        """Same map with codomain cut down to the image face (plus that face)."""
        image = self.image_face()
        pos = {w: i for i, w in enumerate(image)}
        return SimplicialMap(self.domain_n, len(image) - 1, tuple(pos[w] for w in self.vertex_images)), image

    def is_isomorphism(self) -> bool:
        return self.domain_n == self.codomain_n and len(set(self.vertex_images)) == self.domain_n + 1


def pullback_form(phi: SimplicialMap, omega: BarycentricForm) -> BarycentricForm:
    if omega.n != phi.codomain_n:
        raise DimensionMismatch(f"form lives on a {omega.n}-simplex, map lands in a {phi.codomain_n}-simplex")
    return omega.pullback(phi.vertex_images, phi.domain_n)


@dataclass(frozen=True)
class StandardSimplexPair:
    """``T^n`` as the facet of ``Q^{n+1}`` opposite the origin.

    Local vertex 0 of ``Q`` is the origin and local vertex ``i + 1`` is ``e_i``.
    """

    n: int

    @property
    def q_vertices(self) -> tuple[str, ...]:
        return ("0",) + tuple(f"e{i}" for i in range(self.n + 1))

    @property
    def t_face(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 2))

    def q_complex(self) -> SimplicialComplex:
        return reference_complex(self.n + 1)

    def t_inclusion(self) -> SimplicialMap:
        return SimplicialMap(self.n, self.n + 1, self.t_face)


class CollapseMap:
    """The map sending ``K``'s ``i``-th vertex to ``e_i`` and every other vertex to the origin."""

    def __init__(self, complex_: SimplicialComplex, k: Face):
        self.complex = complex_
        self.k = tuple(k)
        self.m = len(self.k) - 1
        self.pair = StandardSimplexPair(self.m)

    def vertex_image(self, v: int) -> int:
        return self.k.index(v) + 1 if v in self.k else 0

    def restrict(self, f: Face) -> SimplicialMap:
        """``Phi_K^F``: the map on the face ``f`` into ``Q^{m+1}``."""
        return SimplicialMap(len(f) - 1, self.m + 1, tuple(self.vertex_image(v) for v in f))

    def psi(self, f: Face) -> tuple[SimplicialMap, tuple[int, ...]]:
        """``Psi_K^F``: ``Phi_K^F`` onto its image face ``Q_K^F`` (given in Q-local vertices)."""
        return self.restrict(f).corestrict()


def collapse_map(complex_: SimplicialComplex, k: Face | str) -> CollapseMap:
    face = complex_.face(k) if isinstance(k, str) else tuple(k)
    if face_name(face) not in complex_._by_name:
        raise UnknownFace(face_name(face))
    return CollapseMap(complex_, face)
