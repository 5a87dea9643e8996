"""Geometric decomposition of the top space and of its dual.

Both inductions follow the peel orderings of :func:`~geodecomp.poset.peel_sequence`.
Each step can be certified independently: the subspaces involved are
recomputed from scratch as exact kernels and the split produced by the step is
checked against them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import InvalidDagger, InvalidFamily, MissingDecomposition, NotLowerSet, NotMaximal, DimensionMismatch
from .extension import ExtensionFamily, verify_consistent_family
from .funcspace import FunctionSpace, Violation, restrict_to_down_set, vanish_on_lower_set, vanishing_trace
from .linalg import (
    Certified,
    Failure,
    RatMatrix,
    Solution,
    direct_sum_check,
    hstack,
    independent_columns,
    inverse,
    kernel_basis,
    rank,
    solve,
    span_contains,
)
from .poset import is_lower_set, peel_sequence

__all__ = [
    "Decomposition",
    "DualDecomposition",
    "StepResult",
    "decompose_step",
    "dual_step",
    "geometric_decomposition",
    "local_decomposition",
    "dagger_euclidean",
    "dagger_projection",
    "verify_dagger",
    "choose_daggers",
    "dual_decomposition",
    "unisolvence_check",
]


@dataclass
class Decomposition:
    top: str
    elements: list[str]  # block order (poset element order)
    blocks: dict[str, RatMatrix]
    certificate: Certified | Failure
    order: list[str] = field(default_factory=list)  # peel actually used
    split_spans: dict[str, RatMatrix] = field(default_factory=dict)
    step_failures: list[tuple[str, Failure]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return isinstance(self.certificate, Certified) and not self.step_failures

    def block_dims(self) -> dict[str, int]:
        return {x: self.blocks[x].cols for x in self.elements}

    def combined(self) -> RatMatrix:
        rows = next(iter(self.blocks.values())).rows if self.blocks else 0
        return hstack([self.blocks[x] for x in self.elements], rows=rows)


@dataclass
class DualDecomposition:
    top: str
    elements: list[str]
    blocks: dict[str, RatMatrix]  # columns are functionals in top coordinates
    certificate: Certified | Failure
    order: list[str] = field(default_factory=list)
    step_failures: list[tuple[str, Failure]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return isinstance(self.certificate, Certified) and not self.step_failures

    def block_dims(self) -> dict[str, int]:
        return {x: self.blocks[x].cols for x in self.elements}

    def combined(self) -> RatMatrix:
        rows = next(iter(self.blocks.values())).rows if self.blocks else 0
        return hstack([self.blocks[x] for x in self.elements], rows=rows)


@dataclass
class StepResult:
    """One induction step on the lower set ``S`` with maximal element ``T``.

    ``outer`` spans the space for ``S`` minus ``T``, ``inner`` the space for
    ``S``; ``block`` is the new summand and ``split`` the summand parts that the
    step's splitting formula produced from the ``outer`` basis.
    """

    element: str
    outer: RatMatrix
    inner: RatMatrix
    block: RatMatrix
    split: RatMatrix
    certificate: Certified | Failure


def _require_top(fs: FunctionSpace) -> str:
    top = fs.top
    if top is None:
        raise ValueError("function space has no top element; adjoin the global space first")
    return top


def _check_peel(fs: FunctionSpace, order: Sequence[str], direction: str) -> None:
    if sorted(order) != sorted(fs.poset.elements):
        raise ValueError("peel order must list every element exactly once")
    remaining = set(fs.poset.elements)
    for t in order:
        pool = fs.poset.maximal(remaining) if direction == "down" else fs.poset.minimal(remaining)
        if t not in pool:
            raise NotMaximal(f"{t} is not {'maximal' if direction == 'down' else 'minimal'} when it is peeled")
        remaining.remove(t)


def _check_subset(fs: FunctionSpace, subset: set[str], t: str) -> None:
    if not is_lower_set(fs.poset, subset):
        raise NotLowerSet(f"{sorted(subset)} is not downward closed")
    if t not in subset or t not in fs.poset.maximal(subset):
        raise NotMaximal(f"{t} is not a maximal element of the lower set")


def decompose_step(fs_hat: FunctionSpace, family: ExtensionFamily, subset, t: str) -> StepResult:
    """Split the functions vanishing on ``subset - {t}`` into those vanishing on
    ``subset`` plus extensions of vanishing-trace functions on ``t``."""
    top = _require_top(fs_hat)
    members = set(subset)
    _check_subset(fs_hat, members, t)
    n = fs_hat.dim(top)
    outer = vanish_on_lower_set(fs_hat, members - {t}).basis
    inner = vanish_on_lower_set(fs_hat, members).basis
    block = family.op(t, top)
    vt = vanishing_trace(fs_hat, t).basis
    tr_t = fs_hat.trace(t, top)

    parts, rests = [], []
    failure = None
    for j in range(outer.cols):
        phi = outer.take_columns([j])
        coords = solve(vt, tr_t @ phi)
        if not isinstance(coords, Solution):
            failure = Failure(phi, f"trace onto {t} does not have vanishing trace")
            break
        part = block @ coords.x
        rest = phi - part
        if not span_contains(inner, rest):
            failure = Failure(phi, f"remainder does not vanish on {t}")
            break
        parts.append(part)
        rests.append(rest)
    split = hstack(parts, rows=n) if parts else RatMatrix.zeros(n, 0)
    if parts:
        split = split.take_columns(independent_columns(split))

    if failure is None:
        certificate = direct_sum_check([inner, block], n)
        if isinstance(certificate, Certified):
            if not (span_contains(outer, certificate.basis) and certificate.rank == outer.cols):
                certificate = Failure(None, "sum does not equal the outer space")
            elif split.cols != block.cols or not span_contains(block, split):
                certificate = Failure(None, "split parts do not span the extension block")
    else:
        certificate = failure
    return StepResult(t, outer, inner, block, split, certificate)


def geometric_decomposition(fs_hat: FunctionSpace, family: ExtensionFamily,
                            order: Sequence[str] | None = None, check_steps: bool = True) -> Decomposition:
    problems = verify_consistent_family(family)
    if problems:
        raise InvalidFamily(problems)
    top = _require_top(fs_hat)
    if order is None:
        order = peel_sequence(fs_hat.poset, "down")
    else:
        _check_peel(fs_hat, order, "down")
    n = fs_hat.dim(top)
    blocks = {}
    spans = {}
    failures = []
    remaining = set(fs_hat.poset.elements)
    for t in order:
        blocks[t] = family.op(t, top)
        if check_steps:
            step = decompose_step(fs_hat, family, remaining, t)
            spans[t] = step.split
            if isinstance(step.certificate, Failure):
                failures.append((t, step.certificate))
        remaining.remove(t)
    elements = list(fs_hat.poset.elements)
    certificate = direct_sum_check([blocks[x] for x in elements], n)
    if isinstance(certificate, Certified) and certificate.rank != n:
        certificate = Failure(None, f"blocks span only {certificate.rank} of {n} dimensions")
    return Decomposition(top, elements, blocks, certificate, list(order), spans, failures)


def local_decomposition(fs: FunctionSpace, family: ExtensionFamily, t: str,
                        check_steps: bool = True) -> Decomposition:
    sub = restrict_to_down_set(fs, t)
    return geometric_decomposition(sub, family.restrict(sub), check_steps=check_steps)


# -- dual side ------------------------------------------------------------------


def dagger_euclidean(fs: FunctionSpace, f: str) -> RatMatrix:
    """Functionals pairing (Euclidean, in coordinates) with the vanishing-trace basis."""
    return vanishing_trace(fs, f).basis


def dagger_projection(fs: FunctionSpace, family: ExtensionFamily, f: str,
                      decomposition: Decomposition | None = None) -> RatMatrix:
    """Coordinate functionals of the projection onto the element's own summand."""
    dec = decomposition if decomposition is not None else local_decomposition(fs, family, f, check_steps=False)
    if dec.top != f:
        raise MissingDecomposition(f"decomposition is for {dec.top}, not {f}")
    if not isinstance(dec.certificate, Certified):
        raise MissingDecomposition(f"no certified local decomposition at {f}")
    inv = inverse(dec.combined())
    start = 0
    for x in dec.elements:
        if x == f:
            break
        start += dec.blocks[x].cols
    size = dec.blocks[f].cols
    return inv.row_block(start, start + size).T


def verify_dagger(fs: FunctionSpace, f: str, dagger: RatMatrix) -> list[Violation]:
    vf = vanishing_trace(fs, f).basis
    if dagger.rows != fs.dim(f):
        return [Violation("shape", (f,), f"functionals have {dagger.rows} coordinates, expected {fs.dim(f)}")]
    pairing = dagger.T @ vf
    if pairing.rows != pairing.cols:
        return [Violation("pairing", (f,), f"pairing matrix is {pairing.rows}x{pairing.cols}, not square")]
    if rank(pairing) != pairing.rows:
        return [Violation("pairing", (f,), "pairing with the vanishing-trace space is singular")]
    return []


def choose_daggers(fs: FunctionSpace, family: ExtensionFamily | None = None,
                   kind: str | None = None) -> dict[str, RatMatrix]:
    """Daggers for every element; projection when a family is given, else Euclidean."""
    if kind is None:
        kind = "projection" if family is not None else "euclidean"
    if kind == "euclidean":
        return {x: dagger_euclidean(fs, x) for x in fs.poset.elements}
    if kind == "projection":
        if family is None:
            raise MissingDecomposition("projection daggers need an extension family")
        return {x: dagger_projection(fs, family, x) for x in fs.poset.elements}
    raise ValueError(f"unknown dagger kind {kind!r}")


def _annihilator(fs_hat: FunctionSpace, subset) -> RatMatrix:
    """Functionals (as columns) vanishing on every function that vanishes on ``subset``."""
    vanishing = vanish_on_lower_set(fs_hat, subset).basis
    return kernel_basis(vanishing.T)


def dual_step(fs_hat: FunctionSpace, family: ExtensionFamily, daggers: Mapping[str, RatMatrix],
              subset, t: str) -> StepResult:
    """Split the functionals annihilating the functions that vanish on ``subset``."""
    top = _require_top(fs_hat)
    members = set(subset)
    _check_subset(fs_hat, members, t)
    n = fs_hat.dim(top)
    outer = _annihilator(fs_hat, members)
    inner = _annihilator(fs_hat, members - {t})
    dagger = daggers[t]
    block = fs_hat.trace(t, top).T @ dagger
    ext = family.op(t, top)
    pairing = dagger.T @ vanishing_trace(fs_hat, t).basis

    parts = []
    failure = None
    for j in range(outer.cols):
        alpha = outer.take_columns([j])
        beta = ext.T @ alpha  # values of alpha on the extended basis
        y = solve(pairing.T, beta)
        if not isinstance(y, Solution):
            failure = Failure(alpha, f"dagger at {t} does not reach this functional")
            break
        part = block @ y.x
        if not span_contains(inner, alpha - part):
            failure = Failure(alpha, "remainder does not annihilate the smaller space")
            break
        parts.append(part)
    split = hstack(parts, rows=n) if parts else RatMatrix.zeros(n, 0)
    if parts:
        split = split.take_columns(independent_columns(split))

    if failure is None:
        certificate = direct_sum_check([inner, block], n)
        if isinstance(certificate, Certified):
            if not (span_contains(outer, certificate.basis) and certificate.rank == outer.cols):
                certificate = Failure(None, "sum does not equal the annihilator")
            elif not span_contains(block, split):
                certificate = Failure(None, "split parts leave the dagger block")
    else:
        certificate = failure
    return StepResult(t, outer, inner, block, split, certificate)


def dual_decomposition(fs_hat: FunctionSpace, family: ExtensionFamily, daggers: Mapping[str, RatMatrix],
                       order: Sequence[str] | None = None, check_steps: bool = True) -> DualDecomposition:
    problems = verify_consistent_family(family)
    if problems:
        raise InvalidFamily(problems)
    for x in fs_hat.poset.elements:
        if x not in daggers:
            raise InvalidDagger(f"no dagger chosen for {x}")
        bad = verify_dagger(fs_hat, x, daggers[x])
        if bad:
            raise InvalidDagger("; ".join(map(str, bad)))
    top = _require_top(fs_hat)
    if order is None:
        order = peel_sequence(fs_hat.poset, "up")
    else:
        _check_peel(fs_hat, order, "up")
    n = fs_hat.dim(top)
    blocks = {}
    failures = []
    current: set[str] = set()
    for t in order:
        current.add(t)
        blocks[t] = fs_hat.trace(t, top).T @ daggers[t]
        if check_steps:
            step = dual_step(fs_hat, family, daggers, current, t)
            if isinstance(step.certificate, Failure):
                failures.append((t, step.certificate))
    elements = list(fs_hat.poset.elements)
    certificate = direct_sum_check([blocks[x] for x in elements], n)
    if isinstance(certificate, Certified) and certificate.rank != n:
        certificate = Failure(None, f"functionals span only {certificate.rank} of {n} dimensions")
    return DualDecomposition(top, elements, blocks, certificate, list(order), failures)


def unisolvence_check(primal: Decomposition, dual: DualDecomposition) -> Certified | Failure:
    """The pairing of all functionals with all basis vectors must be invertible."""
    a = primal.combined()
    b = dual.combined()
    if a.rows != b.rows:
        raise DimensionMismatch(f"primal lives in dimension {a.rows}, dual in {b.rows}")
    pairing = b.T @ a
    if pairing.rows != pairing.cols:
        return Failure(None, f"pairing matrix is {pairing.rows}x{pairing.cols}")
    kernel = kernel_basis(pairing)
    if kernel.cols:
        return Failure(kernel.take_columns([0]), "pairing matrix is singular")
    return Certified(pairing)
