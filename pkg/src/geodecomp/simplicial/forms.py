"""Polynomial differential forms in barycentric coordinates.

A form on an ``n``-simplex is a finite sum of terms
``c * lambda^alpha * dlambda_sigma`` over all ``n + 1`` barycentric symbols,
with ``sigma`` strictly increasing.  This representation is redundant
(``sum lambda_i = 1`` and ``sum dlambda_i = 0``); equality goes through the
canonical form, which eliminates the last symbol.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from ..errors import DimensionMismatch
from ..linalg import as_rational

__all__ = ["BarycentricForm", "wedge_merge"]

Key = tuple[tuple[int, ...], tuple[int, ...]]


def wedge_merge(a: Sequence[int], b: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """``dl_a ^ dl_b`` as ``(sign, sorted indices)``; sign 0 when an index repeats."""
    merged = list(a) + list(b)
    if len(set(merged)) != len(merged):
        return 0, ()
    sign = 1
    # count inversions; the lists are tiny
    for i in range(len(merged)):
        for j in range(i + 1, len(merged)):
            if merged[i] > merged[j]:
                sign = -sign
    return sign, tuple(sorted(merged))


def _product(left: Mapping[Key, Fraction], right: Mapping[Key, Fraction]) -> dict[Key, Fraction]:
    out: dict[Key, Fraction] = {}
    for (ea, wa), ca in left.items():
        for (eb, wb), cb in right.items():
            sign, w = wedge_merge(wa, wb)
            if not sign:
                continue
            key = (tuple(x + y for x, y in zip(ea, eb)), w)
            val = out.get(key, 0) + sign * ca * cb
            if val:
                out[key] = val
            else:
                out.pop(key, None)
    return out


def _substitute(terms: Mapping[Key, Fraction], nvars: int,
                lam: Sequence[dict[Key, Fraction] | None],
                dlam: Sequence[dict[Key, Fraction] | None]) -> dict[Key, Fraction]:
    """Replace each symbol by a form in ``nvars`` symbols (None means zero)."""
    one = {((0,) * nvars, ()): Fraction(1)}
    out: dict[Key, Fraction] = {}
    for (exps, wedge), c in terms.items():
        acc = {((0,) * nvars, ()): c}
        for w, a in enumerate(exps):
            if not a:
                continue
            image = lam[w]
            if image is None:
                acc = {}
                break
            power = one
            for _ in range(a):
                power = _product(power, image)
            acc = _product(acc, power)
        if acc:
            for w in wedge:
                image = dlam[w]
                if image is None:
                    acc = {}
                    break
                acc = _product(acc, image)
        for key, val in acc.items():
            total = out.get(key, 0) + val
            if total:
                out[key] = total
            else:
                out.pop(key, None)
    return out


class BarycentricForm:
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Key, object] | None = None):
        self.n = n
        clean: dict[Key, Fraction] = {}
        for (exps, wedge), c in (terms or {}).items():
            exps, wedge = tuple(exps), tuple(wedge)
            if len(exps) != n + 1 or any(w < 0 or w > n for w in wedge):
                raise DimensionMismatch(f"term {(exps, wedge)} does not live on a {n}-simplex")
            sign, sorted_wedge = wedge_merge(wedge, ())
            if not sign:
                continue
            c = as_rational(c)
            key = (exps, sorted_wedge)
            val = clean.get(key, 0) + sign * c
            if val:
                clean[key] = val
            else:
                clean.pop(key, None)
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def monomial(cls, n: int, exps: Sequence[int], wedge: Sequence[int] = (), coeff=1) -> "BarycentricForm":
        return cls(n, {(tuple(exps), tuple(wedge)): coeff})

    @classmethod
    def lam(cls, n: int, i: int) -> "BarycentricForm":
        return cls.monomial(n, tuple(int(j == i) for j in range(n + 1)))

    @classmethod
    def dlam(cls, n: int, i: int) -> "BarycentricForm":
        return cls.monomial(n, (0,) * (n + 1), (i,))

    @classmethod
    def constant(cls, n: int, c=1) -> "BarycentricForm":
        return cls.monomial(n, (0,) * (n + 1), (), c)

    @classmethod
    def whitney(cls, n: int, sigma: Sequence[int]) -> "BarycentricForm":
        """``sum_i (-1)^i lambda_{s_i} dlambda_{s_0} ^ .. (omit s_i) .. ^ dlambda_{s_k}``."""
        sigma = tuple(sigma)
        terms: dict[Key, Fraction] = {}
        for i, s in enumerate(sigma):
            exps = tuple(int(j == s) for j in range(n + 1))
            terms[(exps, sigma[:i] + sigma[i + 1:])] = Fraction((-1) ** i)
        return cls(n, terms)

    # -- algebra ------------------------------------------------------------
    def _check(self, other: "BarycentricForm") -> None:
        if self.n != other.n:
            raise DimensionMismatch(f"forms live on simplices of dimension {self.n} and {other.n}")

    def __add__(self, other: "BarycentricForm") -> "BarycentricForm":
        self._check(other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0) + c
        return BarycentricForm(self.n, terms)

    def __neg__(self) -> "BarycentricForm":
        return BarycentricForm(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "BarycentricForm") -> "BarycentricForm":
        return self + (-other)

    def scale(self, c) -> "BarycentricForm":
        c = as_rational(c)
        return BarycentricForm(self.n, {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c) -> "BarycentricForm":
        return self.scale(c)

    def wedge(self, other: "BarycentricForm") -> "BarycentricForm":
        """Exterior (and polynomial) product."""
        self._check(other)
        return BarycentricForm(self.n, _product(self.terms, other.terms))

    def __xor__(self, other: "BarycentricForm") -> "BarycentricForm":
        return self.wedge(other)

    def form_degrees(self) -> set[int]:
        return {len(w) for _, w in self.terms}

    # -- canonical form and equality -------------------------------------------
    def canonical(self) -> dict[Key, Fraction]:
        """Coefficients after eliminating ``lambda_n`` and ``dlambda_n``."""
        n = self.n
        lam: list[dict[Key, Fraction] | None] = []
        dlam: list[dict[Key, Fraction] | None] = []
        zero = (0,) * n
        for i in range(n):
            unit = tuple(int(j == i) for j in range(n))
            lam.append({(unit, ()): Fraction(1)})
            dlam.append({(zero, (i,)): Fraction(1)})
        last = {(zero, ()): Fraction(1)}
        for i in range(n):
            last[(tuple(int(j == i) for j in range(n)), ())] = Fraction(-1)
        lam.append(last)
        dlam.append({(zero, (i,)): Fraction(-1) for i in range(n)} or None)
        return _substitute(self.terms, n, lam, dlam)

    def is_zero(self) -> bool:
        return not self.canonical()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BarycentricForm):
            return NotImplemented
        return self.n == other.n and self.canonical() == other.canonical()

    __hash__ = None

    # -- pullback ---------------------------------------------------------------
    def pullback(self, vertex_images: Sequence[int], domain_n: int | None = None) -> "BarycentricForm":
        """Pull back along the affine map sending domain vertex ``v`` to ``vertex_images[v]``.

        ``lambda_w`` becomes the sum of ``lambda_v`` over the preimages of
        ``w`` (zero when there are none), and likewise for ``dlambda_w``.
        """
        m = len(vertex_images) - 1 if domain_n is None else domain_n
        if len(vertex_images) != m + 1:
            raise DimensionMismatch("one image per domain vertex is required")
        if any(w < 0 or w > self.n for w in vertex_images):
            raise DimensionMismatch(f"vertex image outside the {self.n}-simplex")
        zero = (0,) * (m + 1)
        lam: list[dict[Key, Fraction] | None] = []
        dlam: list[dict[Key, Fraction] | None] = []
        for w in range(self.n + 1):
            pre = [v for v, img in enumerate(vertex_images) if img == w]
            if not pre:
                lam.append(None)
                dlam.append(None)
                continue
            lam.append({(tuple(int(j == v) for j in range(m + 1)), ()): Fraction(1) for v in pre})
            dlam.append({(zero, (v,)): Fraction(1) for v in pre})
        return BarycentricForm(m, _substitute(self.terms, m + 1, lam, dlam))

    def __repr__(self) -> str:
        if not self.terms:
            return f"BarycentricForm(n={self.n}, 0)"
        parts = []
        for (exps, wedge), c in sorted(self.terms.items()):
            factors = [f"λ{i}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(exps) if a]
            if wedge:
                factors.append("∧".join(f"dλ{i}" for i in wedge))
            body = "·".join(factors) or "1"
            parts.append(f"{c}·{body}" if c != 1 else body)
        return f"BarycentricForm(n={self.n}, {' + '.join(parts)})"
