"""Function spaces on finite posets.

A function space assigns a coordinate space to every element of a poset and a
trace matrix to every comparable pair ``K <= F`` (shape ``dim F(K) x dim F(F)``).
"""

from __future__ import annotations

import random
from itertools import combinations
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import NotLowerSet, ShapeMismatch, UnknownIdentifier
from .linalg import RatMatrix, hstack, inverse, kernel_basis, vstack
from .poset import Poset, adjoin_top, build_poset, is_lower_set

__all__ = [
    "FunctionSpace",
    "Subspace",
    "GlobalSpace",
    "Violation",
    "verify_function_space",
    "vanishing_trace",
    "assemble_global",
    "adjoin_global",
    "restrict_to_down_set",
    "vanish_on_lower_set",
    "synthesize_presheaf",
]


@dataclass(frozen=True)
class Violation:
    condition: str
    witnesses: tuple
    detail: str = ""

    def __str__(self) -> str:
        where = ", ".join(map(str, self.witnesses))
        return f"{self.condition} fails at ({where})" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class Subspace:
    element: str
    basis: RatMatrix

    @property
    def dim(self) -> int:
        return self.basis.cols


class FunctionSpace:
    """Per-element coordinate spaces plus trace matrices for every relation.

    ``traces`` may contain any set of pairs from which the remaining ones can
    be composed along lower covers; diagonal pairs default to the identity.
    """

    def __init__(
        self,
        poset: Poset,
        dims: Mapping[str, int],
        traces: Mapping[tuple[str, str], RatMatrix],
        labels: Mapping[str, Sequence[str]] | None = None,
        name: str = "",
    ):
        self.poset = poset
        self.dims = {x: int(dims[x]) for x in poset.elements}
        self.labels = {
            x: tuple(labels[x]) if labels and x in labels else tuple(f"b{i}" for i in range(self.dims[x]))
            for x in poset.elements
        }
        self.name = name
        given = dict(traces)
        for k, f in given:
            if not poset.leq(k, f):
                raise ValueError(f"trace given for incomparable pair ({k}, {f})")
        self._traces: dict[tuple[str, str], RatMatrix] = {}
        for f in poset.elements:
            for k in poset.below(f):
                self._traces[(k, f)] = self._complete(k, f, given)
        self._vanishing: dict[str, RatMatrix] = {}

    def _complete(self, k, f, given):
        if (k, f) in self._traces:
            return self._traces[(k, f)]
        if (k, f) in given:
            m = given[(k, f)]
        elif k == f:
            m = RatMatrix.identity(self.dims[f])
        else:
            for g in self.poset.lower_covers(f):
                if (g, f) in given and self.poset.leq(k, g):
                    upper = given[(g, f)]
                    lower = self._complete(k, g, given)
                    if lower.cols != upper.rows:
                        raise ShapeMismatch(f"cannot compose traces through {g}")
                    m = lower @ upper
                    break
            else:
                raise ValueError(f"no trace data from which to build tr[{k} <= {f}]")
        self._traces[(k, f)] = m
        return m

    @property
    def top(self) -> str | None:
        return self.poset.greatest()

    def dim(self, x: str) -> int:
        try:
            return self.dims[x]
        except KeyError:
            raise UnknownIdentifier(x) from None

    def trace(self, k: str, f: str) -> RatMatrix:
        try:
            return self._traces[(k, f)]
        except KeyError:
            self.poset.index(k)
            self.poset.index(f)
            raise ValueError(f"{k} is not below {f}") from None

    def trace_items(self):
        return self._traces.items()

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def with_trace(self, k: str, f: str, matrix: RatMatrix) -> "FunctionSpace":
        """Copy with one trace matrix replaced (all other pairs kept verbatim)."""
        traces = dict(self._traces)
        traces[(k, f)] = matrix
        return FunctionSpace(self.poset, self.dims, traces, self.labels, self.name)

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"FunctionSpace({len(self.poset)} elements{label}, total dim {self.total_dim()})"


def verify_function_space(fs: FunctionSpace) -> list[Violation]:
    """Exact check of both functoriality conditions; returns the failures."""
    poset = fs.poset
    for (k, f), m in fs.trace_items():
        if m.shape != (fs.dims[k], fs.dims[f]):
            raise ShapeMismatch(f"tr[{k} <= {f}] has shape {m.shape}, expected {(fs.dims[k], fs.dims[f])}")
    out = []
    for f in poset.elements:
        if fs.trace(f, f) != RatMatrix.identity(fs.dims[f]):
            out.append(Violation("identity", (f, f), "trace of an element onto itself is not the identity"))
    for f in poset.elements:
        for g in poset.below(f, strict=True):
            tr_gf = fs.trace(g, f)
            for k in poset.below(g, strict=True):
                if fs.trace(k, g) @ tr_gf != fs.trace(k, f):
                    out.append(Violation("composition", (k, g, f), "tr[K<=G] tr[G<=F] != tr[K<=F]"))
    return out


def vanishing_trace(fs: FunctionSpace, f: str) -> Subspace:
    """Basis of the functions on ``f`` whose traces to all strictly lower elements vanish."""
    fs.poset.index(f)
    if f not in fs._vanishing:
        lower = fs.poset.below(f, strict=True)
        if lower:
            stacked = vstack([fs.trace(k, f) for k in lower], cols=fs.dims[f])
            fs._vanishing[f] = kernel_basis(stacked)
        else:
            fs._vanishing[f] = RatMatrix.identity(fs.dims[f])
    return Subspace(f, fs._vanishing[f])


@dataclass
class GlobalSpace:
    """Inverse limit: compatible tuples stacked in poset element order."""

    space: FunctionSpace
    layout: dict[str, tuple[int, int]]
    basis: RatMatrix

    @property
    def dim(self) -> int:
        return self.basis.cols

    def projection(self, f: str) -> RatMatrix:
        """Matrix of the natural projection onto the coordinates of ``f``."""
        start, size = self.layout[f]
        return self.basis.row_block(start, start + size)


def assemble_global(fs: FunctionSpace) -> GlobalSpace:
    layout = {}
    offset = 0
    for x in fs.poset.elements:
        layout[x] = (offset, fs.dims[x])
        offset += fs.dims[x]
    blocks = []
    for k, f in fs.poset.covers():
        row = [RatMatrix.zeros(fs.dims[k], fs.dims[x]) for x in fs.poset.elements]
        row[fs.poset.index(f)] = fs.trace(k, f)
        row[fs.poset.index(k)] = -RatMatrix.identity(fs.dims[k])
        blocks.append(hstack(row, rows=fs.dims[k]))
    system = vstack(blocks, cols=offset) if blocks else RatMatrix.zeros(0, offset)
    return GlobalSpace(fs, layout, kernel_basis(system))


def adjoin_global(fs: FunctionSpace, global_space: GlobalSpace | None = None) -> tuple[FunctionSpace, GlobalSpace]:
    """Function space on the poset with the global space added as top element."""
    g = global_space if global_space is not None else assemble_global(fs)
    hat = adjoin_top(fs.poset)
    top = hat.top
    dims = dict(fs.dims)
    dims[top] = g.dim
    traces = {pair: m for pair, m in fs.trace_items()}
    for x in fs.poset.elements:
        traces[(x, top)] = g.projection(x)
    labels = dict(fs.labels)
    labels[top] = tuple(f"g{i}" for i in range(g.dim))
    out = FunctionSpace(hat, dims, traces, labels, fs.name)
    out._vanishing.update(fs._vanishing)
    return out, g


def restrict_to_down_set(fs: FunctionSpace, t: str) -> FunctionSpace:
    members = fs.poset.below(t)
    sub = fs.poset.restrict(members, top=t)
    traces = {(k, f): m for (k, f), m in fs.trace_items() if k in sub and f in sub}
    out = FunctionSpace(sub, {x: fs.dims[x] for x in members}, traces, fs.labels, fs.name)
    out._vanishing.update({x: b for x, b in fs._vanishing.items() if x in sub})
    return out


def vanish_on_lower_set(fs_hat: FunctionSpace, subset) -> Subspace:
    """Functions on the top element whose traces vanish on every member of ``subset``."""
    top = fs_hat.top
    if top is None:
        raise ValueError("function space has no top element")
    members = set(subset)
    if not is_lower_set(fs_hat.poset, members):
        raise NotLowerSet(f"{sorted(members)} is not downward closed")
    if top in members and len(members) != len(fs_hat.poset):
        raise NotLowerSet("a lower set containing the top element must be everything")
    n = fs_hat.dims[top]
    ordered = [x for x in fs_hat.poset.elements if x in members]
    if not ordered:
        return Subspace(top, RatMatrix.identity(n))
    stacked = vstack([fs_hat.trace(x, top) for x in ordered], cols=n)
    return Subspace(top, kernel_basis(stacked))


# -- synthetic restriction presheaves ------------------------------------------


def _random_unitriangular(rng: random.Random, n: int) -> RatMatrix:
    return RatMatrix([[1 if i == j else (rng.randint(-1, 1) if j > i else 0) for j in range(n)] for i in range(n)],
                     rows=n, cols=n)


def synthesize_presheaf(seed: int, max_elements: int = 20, carrier_size: int = 6,
                        interior_points: int = 1, scramble: bool = True):
    """Random restriction presheaf on an abstract simplicial complex.

    Every face ``F`` carries a finite point set ``X_F``: its own vertices plus
    up to ``interior_points`` private points for faces with two or more
    vertices.  ``F(F)`` is the space of functions on ``X_F`` and traces are
    restrictions; with ``scramble`` each element gets a random unitriangular
    change of coordinates so the trace matrices are not plain selections.
    Because ``X_K`` and ``X_F`` only ever share the points of common faces,
    extension by zero is a consistent family, which is returned alongside.
    """
    from .extension import ExtensionFamily

    if max_elements < 1:
        raise ValueError("max_elements must be at least 1")
    rng = random.Random(seed)
    nverts = rng.randint(1, max(1, carrier_size))
    target = rng.randint(1, max_elements)
    faces: set[tuple[int, ...]] = {(rng.randrange(nverts),)}
    for _ in range(8 * max_elements):
        if len(faces) >= target:
            break
        size = rng.randint(1, min(nverts, 4))
        cell = tuple(sorted(rng.sample(range(nverts), size)))
        closure = {sub for r in range(1, size + 1) for sub in combinations(cell, r)}
        if len(faces | closure) <= max_elements:
            faces |= closure
    ordered = sorted(faces, key=lambda f: (len(f), f))
    names = {f: ",".join(map(str, f)) for f in ordered}
    covers = [(names[f[:i] + f[i + 1:]], names[f]) for f in ordered if len(f) > 1 for i in range(len(f))]
    poset = build_poset([names[f] for f in ordered], covers)

    private: dict[tuple, list[str]] = {}
    for f in ordered:
        if len(f) == 1:
            private[f] = [f"v{f[0]}"]
        else:
            private[f] = [f"p{names[f]}#{i}" for i in range(rng.randint(0, interior_points))]
    points = {f: [p for g in ordered if set(g) <= set(f) for p in private[g]] for f in ordered}
    change = {f: _random_unitriangular(rng, len(points[f])) if scramble else RatMatrix.identity(len(points[f]))
              for f in ordered}
    change_inv = {f: inverse(m) for f, m in change.items()}

    def restriction(k, f):
        idx = {p: j for j, p in enumerate(points[f])}
        return RatMatrix([[int(idx[p] == j) for j in range(len(points[f]))] for p in points[k]],
                         rows=len(points[k]), cols=len(points[f]))

    traces = {}
    for f in ordered:
        for k in ordered:
            if set(k) <= set(f):
                traces[(names[k], names[f])] = change_inv[k] @ restriction(k, f) @ change[f]
    labels = {names[f]: tuple(points[f]) if not scramble else tuple(f"c{i}" for i in range(len(points[f])))
              for f in ordered}
    fs = FunctionSpace(poset, {names[f]: len(points[f]) for f in ordered}, traces, labels,
                       name=f"presheaf:{seed}")
    ops = {}
    for k in ordered:
        vk = vanishing_trace(fs, names[k]).basis
        if vk.cols == 0:
            continue
        values = change[k] @ vk
        for f in ordered:
            if set(k) <= set(f):
                ops[(names[k], names[f])] = change_inv[f] @ restriction(k, f).T @ values
    return fs, ExtensionFamily(fs, ops)
