"""Finite posets stored as an explicit order closure (one bitmask per element)."""

from __future__ import annotations

import random
from typing import Hashable, Iterable, Sequence

from .errors import CycleDetected, UnknownIdentifier

__all__ = ["Poset", "build_poset", "down_set", "adjoin_top", "height", "peel_sequence", "is_lower_set"]

TOP_NAME = "𝒯"


class Poset:
    """An immutable finite partial order on opaque string identifiers.

    ``below[i]`` is the bitmask of every element ``j`` with ``j <= i``.
    """

    __slots__ = ("elements", "_index", "_below", "_above", "top")

    def __init__(self, elements: Sequence[str], below: Sequence[int], top: str | None = None):
        self.elements = tuple(elements)
        self._index = {e: i for i, e in enumerate(self.elements)}
        self._below = tuple(below)
        above = [0] * len(self.elements)
        for i, mask in enumerate(self._below):
            for j in _bits(mask):
                above[j] |= 1 << i
        self._above = tuple(above)
        self.top = top

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._index

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self) -> str:
        return f"Poset({len(self)} elements, {len(self.leq_pairs())} relations)"

    def index(self, x: str) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise UnknownIdentifier(x) from None

    def leq(self, a: str, b: str) -> bool:
        return bool(self._below[self.index(b)] >> self.index(a) & 1)

    def lt(self, a: str, b: str) -> bool:
        return a != b and self.leq(a, b)

    def leq_pairs(self) -> set[tuple[str, str]]:
        els = self.elements
        return {(els[j], els[i]) for i, mask in enumerate(self._below) for j in _bits(mask)}

    def below(self, x: str, strict: bool = False) -> list[str]:
        i = self.index(x)
        mask = self._below[i] & ~(1 << i) if strict else self._below[i]
        return [self.elements[j] for j in _bits(mask)]

    def above(self, x: str, strict: bool = False) -> list[str]:
        i = self.index(x)
        mask = self._above[i] & ~(1 << i) if strict else self._above[i]
        return [self.elements[j] for j in _bits(mask)]

    def lower_covers(self, x: str) -> list[str]:
        """Elements covered by ``x`` (immediately below it)."""
        strict = self.below(x, strict=True)
        return [k for k in strict if not any(k != g and self.lt(k, g) for g in strict)]

    def covers(self) -> list[tuple[str, str]]:
        return [(k, f) for f in self.elements for k in self.lower_covers(f)]

    def maximal(self, subset: Iterable[str] | None = None) -> list[str]:
        members = self._members(subset)
        mask = self._mask(members)
        return [x for x in members if not (self._above[self._index[x]] & mask & ~(1 << self._index[x]))]

    def minimal(self, subset: Iterable[str] | None = None) -> list[str]:
        members = self._members(subset)
        mask = self._mask(members)
        return [x for x in members if not (self._below[self._index[x]] & mask & ~(1 << self._index[x]))]

    def greatest(self) -> str | None:
        """The top element if one exists (recorded or detected)."""
        if self.top is not None:
            return self.top
        full = (1 << len(self.elements)) - 1
        for i, mask in enumerate(self._below):
            if mask == full:
                return self.elements[i]
        return None

    def meet(self, a: str, b: str) -> str | None:
        """Greatest common lower bound, or None when there is none."""
        common = self._below[self.index(a)] & self._below[self.index(b)]
        for j in _bits(common):
            if common & ~self._below[j] == 0:
                return self.elements[j]
        return None

    def restrict(self, subset: Iterable[str], top: str | None = None) -> "Poset":
        """Induced sub-order on ``subset`` (kept in this poset's element order)."""
        keep = set(subset)
        for x in keep:
            self.index(x)
        members = [x for x in self.elements if x in keep]
        new_index = {x: i for i, x in enumerate(members)}
        below = []
        for x in members:
            mask = 0
            for y in self.below(x):
                if y in new_index:
                    mask |= 1 << new_index[y]
            below.append(mask)
        return Poset(members, below, top=top)

    def _members(self, subset: Iterable[str] | None) -> list[str]:
        if subset is None:
            return list(self.elements)
        keep = set(subset)
        return [x for x in self.elements if x in keep]

    def _mask(self, members: Iterable[str]) -> int:
        mask = 0
        for x in members:
            mask |= 1 << self.index(x)
        return mask


def _bits(mask: int):
    j = 0
    while mask:
        if mask & 1:
            yield j
        mask >>= 1
        j += 1


def build_poset(elements: Sequence[Hashable], covers: Iterable[tuple]) -> Poset:
    """Reflexive-transitive closure of ``covers`` (pairs ``(lower, upper)``)."""
    elements = [str(e) for e in elements]
    if len(set(elements)) != len(elements):
        raise ValueError("poset identifiers must be distinct")
    index = {e: i for i, e in enumerate(elements)}
    children: list[list[int]] = [[] for _ in elements]
    for lo, hi in covers:
        lo, hi = str(lo), str(hi)
        for x in (lo, hi):
            if x not in index:
                raise UnknownIdentifier(x)
        children[index[hi]].append(index[lo])
    below = [0] * len(elements)
    state = [0] * len(elements)  # 0 new, 1 in progress, 2 done

    def visit(i: int) -> int:
        stack = [(i, iter(children[i]))]
        state[i] = 1
        while stack:
            node, it = stack[-1]
            child = next(it, None)
            if child is None:
                mask = 1 << node
                for c in children[node]:
                    mask |= below[c]
                below[node] = mask
                state[node] = 2
                stack.pop()
            elif state[child] == 1:
                raise CycleDetected(f"order relation has a cycle through {elements[child]!r}")
            elif state[child] == 0:
                state[child] = 1
                stack.append((child, iter(children[child])))
        return below[i]

    for i in range(len(elements)):
        if state[i] == 0:
            visit(i)
    return Poset(elements, below)


def down_set(poset: Poset, t: str) -> set[str]:
    """All ``F`` with ``F <= t``."""
    return set(poset.below(t))


def adjoin_top(poset: Poset, name: str = TOP_NAME) -> Poset:
    """Add a fresh element strictly above everything."""
    while name in poset:
        name += "'"
    n = len(poset)
    below = list(poset._below) + [(1 << (n + 1)) - 1]
    return Poset(list(poset.elements) + [name], below, top=name)


def height(poset: Poset) -> dict[str, int]:
    """Length of the longest strict chain ending at each element."""
    out: dict[str, int] = {}
    for x in sorted(poset.elements, key=lambda e: len(poset.below(e))):
        out[x] = max((out[k] + 1 for k in poset.lower_covers(x)), default=0)
    return out


def peel_sequence(poset: Poset, direction: str = "down", rng: random.Random | None = None) -> list[str]:
    """Order the elements so that the induction steps are valid.

    ``down`` repeatedly removes a maximal element of what remains, so every
    suffix is a lower set; ``up`` repeatedly takes a minimal element of what
    remains, so every prefix is a lower set.  Among the candidates, ``down``
    prefers the greatest height and ``up`` the smallest (faces go by
    dimension), then the smallest identifier.  With ``rng`` the choice among
    all candidates is random instead.
    """
    if direction not in ("down", "up"):
        raise ValueError(f"direction must be 'down' or 'up', not {direction!r}")
    h = height(poset)
    sign = -1 if direction == "down" else 1
    remaining = set(poset.elements)
    order = []
    while remaining:
        pool = poset.maximal(remaining) if direction == "down" else poset.minimal(remaining)
        if rng is not None:
            pick = rng.choice(sorted(pool))
        else:
            pick = min(pool, key=lambda x: (sign * h[x], x))
        order.append(pick)
        remaining.remove(pick)
    return order


def is_lower_set(poset: Poset, subset: Iterable[str]) -> bool:
    members = set(subset)
    for x in members:
        poset.index(x)
    return all(set(poset.below(x)) <= members for x in members)
