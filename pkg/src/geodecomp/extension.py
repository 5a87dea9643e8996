"""Extension operators defined on vanishing-trace subspaces.

``ExtensionFamily.ops[(K, F)]`` is the matrix of the extension from the
vanishing-trace space of ``K`` (in the basis returned by
:func:`~geodecomp.funcspace.vanishing_trace`) into the coordinates of ``F``.
Pairs missing from ``ops`` stand for the zero map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import InvalidFamily, MissingDecomposition, NotCompatible, NotLocalOperator, ShapeMismatch
from .funcspace import FunctionSpace, GlobalSpace, Violation, adjoin_global, vanishing_trace
from .linalg import RatMatrix, Solution, hstack, inverse, solve, vstack

__all__ = [
    "ExtensionFamily",
    "FullExtension",
    "verify_consistent_family",
    "consistent_from_local",
    "local_from_consistent",
    "extend_family_to_hat",
    "extend_to_full_space",
    "verify_full_extension",
    "admissible_tuples",
]


class ExtensionFamily:
    def __init__(self, space: FunctionSpace, ops: Mapping[tuple[str, str], RatMatrix]):
        self.space = space
        self.ops = {pair: m for pair, m in ops.items()}

    def domain_dim(self, k: str) -> int:
        return vanishing_trace(self.space, k).dim

    def op(self, k: str, f: str) -> RatMatrix:
        m = self.ops.get((k, f))
        if m is None:
            return RatMatrix.zeros(self.space.dim(f), self.domain_dim(k))
        return m

    def restrict(self, space: FunctionSpace) -> "ExtensionFamily":
        """The same operators viewed on a sub-poset (e.g. a down-set)."""
        keep = set(space.poset.elements)
        return ExtensionFamily(space, {(k, f): m for (k, f), m in self.ops.items() if k in keep and f in keep})

    def __repr__(self) -> str:
        return f"ExtensionFamily({len(self.ops)} nonzero operators on {self.space!r})"


def verify_consistent_family(family: ExtensionFamily) -> list[Violation]:
    """Check inclusion, support and trace-compatibility exactly."""
    fs = family.space
    poset = fs.poset
    for (k, f), m in family.ops.items():
        expected = (fs.dim(f), family.domain_dim(k))
        if m.shape != expected:
            raise ShapeMismatch(f"E[{k} -> {f}] has shape {m.shape}, expected {expected}")
    out = []
    for k in poset.elements:
        vk = vanishing_trace(fs, k).basis
        if family.op(k, k) != vk:
            out.append(Violation("inclusion", (k,), "E[K -> K] is not the inclusion of the vanishing-trace space"))
        if vk.cols == 0:
            continue
        for f in poset.elements:
            if not poset.leq(k, f) and (k, f) in family.ops and not family.ops[(k, f)].is_zero():
                out.append(Violation("support", (k, f), "E[K -> F] is nonzero although K is not below F"))
        for f in poset.elements:
            e_kf = family.op(k, f)
            for g in poset.below(f, strict=True):
                if fs.trace(g, f) @ e_kf != family.op(k, g):
                    out.append(Violation("compatibility", (k, g, f), "tr[G<=F] E[K -> F] != E[K -> G]"))
    return out


def consistent_from_local(space_hat: FunctionSpace, locals_: Mapping[str, RatMatrix]) -> ExtensionFamily:
    """Family on the poset with top element from one local operator per element.

    Each ``locals_[K]`` maps the vanishing-trace space of ``K`` into the top
    coordinates; the family is ``E[K -> F] = tr[F <= top] E[K -> top]``.
    """
    top = space_hat.top
    if top is None:
        raise ValueError("space has no top element")
    poset = space_hat.poset
    ops = {}
    for k in poset.elements:
        vk = vanishing_trace(space_hat, k).basis
        if k == top:
            ops[(k, k)] = vk
            continue
        local = locals_.get(k, RatMatrix.zeros(space_hat.dim(top), vk.cols))
        if local.shape != (space_hat.dim(top), vk.cols):
            raise ShapeMismatch(f"local operator for {k} has shape {local.shape}")
        if space_hat.trace(k, top) @ local != vk:
            raise NotLocalOperator(f"trace of the extension from {k} back onto {k} is not the inclusion")
        for f in poset.elements:
            image = space_hat.trace(f, top) @ local
            if not poset.leq(k, f) and not image.is_zero():
                raise NotLocalOperator(f"extension from {k} does not vanish on {f}")
            if not image.is_zero():
                ops[(k, f)] = image
    family = ExtensionFamily(space_hat, ops)
    problems = verify_consistent_family(family)
    if problems:
        raise InvalidFamily(problems)
    return family


def local_from_consistent(family: ExtensionFamily, global_space: GlobalSpace) -> dict[str, RatMatrix]:
    """Stack ``(E[K -> F])_F`` and express it in the global basis."""
    fs = family.space
    out = {}
    for k in fs.poset.elements:
        d = family.domain_dim(k)
        stacked = vstack([family.op(k, f) for f in fs.poset.elements], cols=d)
        result = solve(global_space.basis, stacked)
        if not isinstance(result, Solution):
            raise NotCompatible(f"stacked extension from {k} is not a compatible tuple")
        out[k] = result.x
    return out


def extend_family_to_hat(family: ExtensionFamily, global_space: GlobalSpace | None = None):
    """Return ``(space_hat, family_hat)`` with the global space as top element."""
    space_hat, g = adjoin_global(family.space, global_space)
    top = space_hat.top
    ops = dict(family.ops)
    for k, m in local_from_consistent(family, g).items():
        if not m.is_zero():
            ops[(k, top)] = m
    ops[(top, top)] = vanishing_trace(space_hat, top).basis
    hat = ExtensionFamily(space_hat, ops)
    problems = verify_consistent_family(hat)
    if problems:
        raise InvalidFamily(problems)
    return space_hat, hat


# -- extension to the full space ----------------------------------------------


@dataclass
class FullExtension:
    """``ops[(G, F)]`` extends all of ``F(G)`` into ``F(F)`` for ``G <= F``."""

    space: FunctionSpace
    ops: dict[tuple[str, str], RatMatrix]


def extend_to_full_space(family: ExtensionFamily, decompositions: Mapping[str, object]) -> FullExtension:
    """Extend each operator blockwise over the local decomposition of its domain.

    ``decompositions[G]`` is the decomposition of ``F(G)`` produced by
    :func:`~geodecomp.decomp.local_decomposition`; on its block for ``K`` the
    extension into ``F`` acts as ``E[K -> F]``.
    """
    fs = family.space
    ops = {}
    for g in fs.poset.elements:
        try:
            dec = decompositions[g]
        except KeyError:
            raise MissingDecomposition(g) from None
        parts = [k for k in dec.elements if dec.blocks[k].cols]
        combined = hstack([dec.blocks[k] for k in parts], rows=fs.dim(g))
        inv = inverse(combined)
        for f in fs.poset.above(g):
            image = hstack([family.op(k, f) for k in parts], rows=fs.dim(f))
            ops[(g, f)] = image @ inv
    return FullExtension(fs, ops)


def admissible_tuples(fs: FunctionSpace):
    """Tuples ``(K, F, G, T)`` with ``F, G <= T`` and ``K`` the meet of ``F`` and ``G``.

    ``K`` is None when ``F`` and ``G`` have no common lower bound.
    """
    poset = fs.poset
    for t in poset.elements:
        below = poset.below(t)
        for f in below:
            for g in below:
                yield poset.meet(f, g), f, g, t


def verify_full_extension(full: FullExtension) -> list[Violation]:
    fs = full.space
    out = []
    for (g, f), m in full.ops.items():
        if fs.trace(g, f) @ m != RatMatrix.identity(fs.dim(g)):
            out.append(Violation("left-inverse", (g, f), "tr[G<=F] E[G -> F] is not the identity"))
    for k, f, g, t in admissible_tuples(fs):
        lhs = fs.trace(g, t) @ full.ops[(f, t)]
        if k is None:
            if not lhs.is_zero():
                out.append(Violation("commuting", (None, f, g, t), "no common lower bound but nonzero trace"))
        elif lhs != full.ops[(k, g)] @ fs.trace(k, f):
            out.append(Violation("commuting", (k, f, g, t), "tr[G<=T] E[F -> T] != E[K -> G] tr[K<=F]"))
    return out
