"""Independent reference computations and frozen expected values for the tests.

Nothing here goes through geodecomp's elimination code: ranks come from sympy
and dimensions from direct enumeration.
"""

from itertools import combinations, product
from math import comb

import sympy

from geodecomp.linalg import RatMatrix

SQUARE_CELLS = [(0, 1, 2), (0, 2, 3)]

# frozen values (closed formulas and hand counts on the two-triangle square:
# 4 vertices, 5 edges, 2 triangles)
LAGRANGE2_TRIANGLE_BLOCKS = {"0": 1, "1": 1, "2": 1, "0,1": 1, "0,2": 1, "1,2": 1, "0,1,2": 0}
LAGRANGE3_TRIANGLE_BLOCKS = {"0": 1, "1": 1, "2": 1, "0,1": 2, "0,2": 2, "1,2": 2, "0,1,2": 1}
LAGRANGE2_SQUARE_DIM = 9
LAGRANGE3_SQUARE_DIM = 16
LAGRANGE1_SQUARE_DIM = 4
WHITNEY1_SQUARE_DIM = 5
SQUARE_EDGES = ["0,1", "0,2", "0,3", "1,2", "2,3"]


def to_sympy(m: RatMatrix) -> sympy.Matrix:
    return sympy.Matrix(m.rows, m.cols, [sympy.Rational(m[i, j].numerator, m[i, j].denominator)
                                         for i in range(m.rows) for j in range(m.cols)])


def sympy_rank(m: RatMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return to_sympy(m).rank()


def count_polynomials(n: int, r: int) -> int:
    """Monomials of degree <= r in n variables, by brute enumeration."""
    return sum(1 for e in product(range(r + 1), repeat=n) if sum(e) <= r)


def count_polyforms(n: int, r: int, k: int) -> int:
    return count_polynomials(n, r) * sum(1 for _ in combinations(range(n), k))


def count_whitney(n: int, k: int) -> int:
    return sum(1 for _ in combinations(range(n + 1), k + 1))


def lagrange_interior(d: int, r: int) -> int:
    """Lattice points of the degree-r grid strictly inside a d-simplex."""
    return sum(1 for e in product(range(1, r + 1), repeat=d + 1) if sum(e) == r)


def lagrange_global_dim(faces, r: int) -> int:
    return sum(lagrange_interior(len(f) - 1, r) for f in faces)


def inverse_limit_dim(fs) -> int:
    """dim of compatible tuples over all comparable pairs, via a sympy rank."""
    elements = list(fs.poset.elements)
    offsets, total = {}, 0
    for x in elements:
        offsets[x] = total
        total += fs.dim(x)
    rows = []
    for f in elements:
        for k in fs.poset.below(f, strict=True):
            tr = fs.trace(k, f)
            for i in range(tr.rows):
                row = [0] * total
                for j in range(tr.cols):
                    row[offsets[f] + j] = tr[i, j]
                row[offsets[k] + i] -= 1
                rows.append(row)
    if not rows:
        return total
    return total - sympy.Matrix(rows).rank()


def binom(n: int, k: int) -> int:
    return comb(n, k)
