"""Dense exact rational linear algebra.

Matrices are stored as an integer numerator matrix over one positive common
denominator, always reduced so that the gcd of the denominator and all
numerators is one.  Elimination is fraction-free (Bareiss) on the integer
rows; rationals only appear in the final normalization.  Nothing in this
module uses floating point or tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import DimensionMismatch, SingularMatrix

__all__ = [
    "RatMatrix",
    "Solution",
    "Infeasible",
    "Certified",
    "Failure",
    "as_rational",
    "format_rational",
    "hstack",
    "vstack",
    "rref",
    "rank",
    "kernel_basis",
    "solve",
    "inverse",
    "direct_sum_check",
    "independent_columns",
    "span_contains",
    "same_span",
]


def as_rational(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(q) -> str:
    q = as_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _reduce(num: list[list[int]], den: int) -> tuple[list[list[int]], int]:
    g = den
    for row in num:
        for x in row:
            if x:
                g = gcd(g, x)
                if g == 1:
                    return num, den
    if g != 1:
        num = [[x // g for x in row] for row in num]
        den //= g
    return num, den


class RatMatrix:
    """Immutable dense matrix of exact rationals."""

    __slots__ = ("rows", "cols", "_num", "_den")

    def __init__(self, data: Iterable[Sequence] = (), rows: int | None = None, cols: int | None = None):
        entries = [[as_rational(x) for x in row] for row in data]
        if rows is None:
            rows = len(entries)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise DimensionMismatch(f"ragged or mis-sized data for a {rows}x{cols} matrix")
        den = 1
        for row in entries:
            for q in row:
                if q.denominator != 1:
                    den = lcm(den, q.denominator)
        num = [[q.numerator * (den // q.denominator) for q in row] for row in entries]
        self.rows, self.cols = rows, cols
        self._num, self._den = _reduce(num, den)

    @classmethod
    def _raw(cls, num: list[list[int]], den: int, rows: int, cols: int, reduced: bool = False) -> "RatMatrix":
        m = cls.__new__(cls)
        m.rows, m.cols = rows, cols
        if den < 0:
            num = [[-x for x in row] for row in num]
            den = -den
        m._num, m._den = (num, den) if reduced else _reduce(num, den)
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls._raw([[0] * cols for _ in range(rows)], 1, rows, cols, reduced=True)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls._raw([[int(i == j) for j in range(n)] for i in range(n)], 1, n, n, reduced=True)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "RatMatrix":
        cols = [[as_rational(x) for x in c] for c in columns]
        if any(len(c) != rows for c in cols):
            raise DimensionMismatch("column length differs from the row count")
        return cls([[c[i] for c in cols] for i in range(rows)], rows=rows, cols=len(cols))

    # -- access -----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return Fraction(self._num[i][j], self._den)

    def entries(self) -> list[list[Fraction]]:
        d = self._den
        return [[Fraction(x, d) for x in row] for row in self._num]

    def integer_rows(self) -> list[list[int]]:
        """Rows scaled by the common denominator (same row space)."""
        return [row[:] for row in self._num]

    def column(self, j: int) -> list[Fraction]:
        return [Fraction(row[j], self._den) for row in self._num]

    def take_columns(self, idx: Sequence[int]) -> "RatMatrix":
        return RatMatrix._raw([[row[j] for j in idx] for row in self._num], self._den, self.rows, len(idx))

    def take_rows(self, idx: Sequence[int]) -> "RatMatrix":
        return RatMatrix._raw([self._num[i][:] for i in idx], self._den, len(idx), self.cols)

    def row_block(self, start: int, stop: int) -> "RatMatrix":
        return self.take_rows(range(start, stop))

    def col_block(self, start: int, stop: int) -> "RatMatrix":
        return self.take_columns(range(start, stop))

    @property
    def T(self) -> "RatMatrix":
        num = [[self._num[i][j] for i in range(self.rows)] for j in range(self.cols)]
        return RatMatrix._raw(num, self._den, self.cols, self.rows, reduced=True)

    def is_zero(self) -> bool:
        return not any(any(row) for row in self._num)

    # -- arithmetic -------------------------------------------------------
    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        p = other.cols
        bnum = other._num
        out = []
        for row in self._num:
            acc = [0] * p
            for k, a in enumerate(row):
                if a:
                    bk = bnum[k]
                    for j in range(p):
                        b = bk[j]
                        if b:
                            acc[j] += a * b
            out.append(acc)
        return RatMatrix._raw(out, self._den * other._den, self.rows, p)

    def _combine(self, other: "RatMatrix", sign: int) -> "RatMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"shape {self.shape} differs from {other.shape}")
        d = lcm(self._den, other._den)
        fa, fb = d // self._den, sign * (d // other._den)
        num = [[a * fa + b * fb for a, b in zip(ra, rb)] for ra, rb in zip(self._num, other._num)]
        return RatMatrix._raw(num, d, self.rows, self.cols)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self._combine(other, -1)

    def __neg__(self) -> "RatMatrix":
        return RatMatrix._raw([[-x for x in row] for row in self._num], self._den, self.rows, self.cols, True)

    def scale(self, c) -> "RatMatrix":
        c = as_rational(c)
        num = [[x * c.numerator for x in row] for row in self._num]
        return RatMatrix._raw(num, self._den * c.denominator, self.rows, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        # both sides are reduced, so the representation is canonical
        return self.shape == other.shape and self._den == other._den and self._num == other._num

    __hash__ = None

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(q) for q in row] for row in self.entries()]

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(r) + "]" for r in self.to_strings())
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"


def hstack(blocks: Sequence[RatMatrix], rows: int | None = None) -> RatMatrix:
    if rows is None:
        if not blocks:
            raise DimensionMismatch("hstack of nothing needs an explicit row count")
        rows = blocks[0].rows
    if any(b.rows != rows for b in blocks):
        raise DimensionMismatch("hstack blocks disagree on row count")
    d = 1
    for b in blocks:
        d = lcm(d, b._den)
    num = [[] for _ in range(rows)]
    for b in blocks:
        f = d // b._den
        for i in range(rows):
            num[i].extend(x * f for x in b._num[i])
    return RatMatrix._raw(num, d, rows, sum(b.cols for b in blocks))


def vstack(blocks: Sequence[RatMatrix], cols: int | None = None) -> RatMatrix:
    if cols is None:
        if not blocks:
            raise DimensionMismatch("vstack of nothing needs an explicit column count")
        cols = blocks[0].cols
    if any(b.cols != cols for b in blocks):
        raise DimensionMismatch("vstack blocks disagree on column count")
    d = 1
    for b in blocks:
        d = lcm(d, b._den)
    num = []
    for b in blocks:
        f = d // b._den
        num.extend([x * f for x in row] for row in b._num)
    return RatMatrix._raw(num, d, len(num), cols)


# -- elimination ----------------------------------------------------------


def _bareiss_echelon(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free forward elimination, in place.  Returns (rows, pivot columns)."""
    nrows = len(rows)
    prev = 1
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        if p != r:
            rows[p], rows[r] = rows[r], rows[p]
        prow = rows[r]
        piv = prow[c]
        tail = range(c + 1, ncols)
        for i in range(r + 1, nrows):
            row = rows[i]
            a = row[c]
            if a:
                for j in tail:
                    row[j] = (piv * row[j] - a * prow[j]) // prev
                row[c] = 0
            elif piv != prev:
                for j in tail:
                    if row[j]:
                        row[j] = piv * row[j] // prev
        prev = piv
        pivots.append(c)
        r += 1
    return rows, pivots


def _content_reduce(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return row
    if g > 1:
        return [x // g for x in row]
    return row


def _rref_int(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Integer rows in reduced echelon shape (pivot entries not yet normalized)."""
    rows, pivots = _bareiss_echelon(rows, ncols)
    rank = len(pivots)
    top = [_content_reduce(rows[i]) for i in range(rank)]
    for i in range(rank - 1, -1, -1):
        c = pivots[i]
        pi = top[i]
        for k in range(i):
            a = top[k][c]
            if a:
                p = pi[c]
                top[k] = _content_reduce([p * x - a * y for x, y in zip(top[k], pi)])
    return top, pivots


def rref(m: RatMatrix) -> tuple[RatMatrix, list[int], int]:
    """Reduced row echelon form, pivot columns and rank."""
    top, pivots = _rref_int(m.integer_rows(), m.cols)
    data = []
    for row, c in zip(top, pivots):
        p = row[c]
        data.append([Fraction(x, p) for x in row])
    data.extend([[Fraction(0)] * m.cols for _ in range(m.rows - len(pivots))])
    return RatMatrix(data, rows=m.rows, cols=m.cols), pivots, len(pivots)


def rank(m: RatMatrix) -> int:
    _, pivots = _bareiss_echelon(m.integer_rows(), m.cols)
    return len(pivots)


def kernel_basis(m: RatMatrix) -> RatMatrix:
    """Columns spanning the null space, one per free column (that entry set to 1)."""
    top, pivots = _rref_int(m.integer_rows(), m.cols)
    pivset = set(pivots)
    free = [j for j in range(m.cols) if j not in pivset]
    columns = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for row, c in zip(top, pivots):
            if row[f]:
                v[c] = Fraction(-row[f], row[c])
        columns.append(v)
    return RatMatrix.from_columns(columns, m.cols)


def independent_columns(m: RatMatrix) -> list[int]:
    """Indices of a maximal independent set of columns (first-come)."""
    _, pivots = _bareiss_echelon(m.integer_rows(), m.cols)
    return pivots


# -- solving ----------------------------------------------------------------


@dataclass(frozen=True)
class Solution:
    x: RatMatrix


@dataclass(frozen=True)
class Infeasible:
    """``y`` is a column with ``y.T @ M == 0`` and ``y.T @ B != 0``."""

    certificate: RatMatrix


def solve(m: RatMatrix, b: RatMatrix) -> Solution | Infeasible:
    """Solve ``m @ x == b`` exactly (free variables set to zero)."""
    if m.rows != b.rows:
        raise DimensionMismatch(f"row counts differ: {m.rows} vs {b.rows}")
    aug = hstack([m, b], rows=m.rows)
    top, pivots = _rref_int(aug.integer_rows(), aug.cols)
    if any(c >= m.cols for c in pivots):
        left = kernel_basis(m.T)
        for col in range(left.cols):
            y = left.take_columns([col])
            if not (y.T @ b).is_zero():
                return Infeasible(y)
        raise AssertionError("inconsistent system without a left-kernel certificate")
    x = [[Fraction(0)] * b.cols for _ in range(m.cols)]
    for row, c in zip(top, pivots):
        p = row[c]
        for j in range(b.cols):
            x[c][j] = Fraction(row[m.cols + j], p)
    return Solution(RatMatrix(x, rows=m.cols, cols=b.cols))


def inverse(m: RatMatrix) -> RatMatrix:
    if m.rows != m.cols:
        raise DimensionMismatch(f"cannot invert a {m.rows}x{m.cols} matrix")
    if m.rows == 0:
        return RatMatrix.zeros(0, 0)
    if rank(m) < m.rows:
        raise SingularMatrix("matrix is singular")
    result = solve(m, RatMatrix.identity(m.rows))
    assert isinstance(result, Solution)
    return result.x


@dataclass(frozen=True)
class Certified:
    """The blocks are independent; ``basis`` is their concatenation."""

    basis: RatMatrix

    @property
    def rank(self) -> int:
        return self.basis.cols


@dataclass(frozen=True)
class Failure:
    """``witness`` is a nonzero coefficient column with ``basis @ witness == 0``.

    Callers that fail for another reason may leave it as None.
    """

    witness: RatMatrix | None
    reason: str = "blocks are linearly dependent"


def direct_sum_check(blocks: Sequence[RatMatrix], ambient_dim: int) -> Certified | Failure:
    if any(b.rows != ambient_dim for b in blocks):
        raise DimensionMismatch(f"every block must have {ambient_dim} rows")
    combined = hstack(list(blocks), rows=ambient_dim)
    kernel = kernel_basis(combined)
    if kernel.cols:
        return Failure(kernel.take_columns([0]))
    return Certified(combined)


def span_contains(a: RatMatrix, b: RatMatrix) -> bool:
    """True iff every column of ``b`` lies in the column span of ``a``."""
    if b.cols == 0:
        return True
    return rank(hstack([a, b], rows=a.rows)) == rank(a)


def same_span(a: RatMatrix, b: RatMatrix) -> bool:
    return span_contains(a, b) and span_contains(b, a)
