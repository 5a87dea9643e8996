from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from geodecomp.errors import DimensionMismatch, SingularMatrix
from geodecomp.linalg import (
    Certified,
    Failure,
    Infeasible,
    RatMatrix,
    Solution,
    direct_sum_check,
    format_rational,
    hstack,
    inverse,
    kernel_basis,
    rank,
    rref,
    same_span,
    solve,
    span_contains,
    vstack,
)
from oracles import sympy_rank, to_sympy

small = st.integers(min_value=-4, max_value=4)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    den = draw(st.integers(1, 3))
    data = [[Fraction(draw(small), den) for _ in range(c)] for _ in range(r)]
    return RatMatrix(data, rows=r, cols=c)


def test_rational_text_form():
    assert format_rational(Fraction(3, 1)) == "3"
    assert format_rational(Fraction(-2, 6)) == "-1/3"
    assert RatMatrix([[Fraction(1, 2), 2]]).to_strings() == [["1/2", "2"]]


def test_rref_examples():
    i3 = RatMatrix.identity(3)
    r, piv, k = rref(i3)
    assert r == i3 and piv == [0, 1, 2] and k == 3
    z = RatMatrix.zeros(2, 4)
    r, piv, k = rref(z)
    assert r == z and piv == [] and k == 0
    r, piv, k = rref(RatMatrix([[1, 2], [2, 4]]))
    assert r == RatMatrix([[1, 2], [0, 0]]) and k == 1


def test_kernel_examples():
    k = kernel_basis(RatMatrix([[1, 1]]))
    assert k.shape == (2, 1) and same_span(k, RatMatrix([[1], [-1]]))
    assert kernel_basis(RatMatrix.identity(3)).cols == 0
    assert kernel_basis(RatMatrix.zeros(1, 2)).cols == 2


def test_solve_examples():
    res = solve(RatMatrix([[2]]), RatMatrix([[1]]))
    assert isinstance(res, Solution) and res.x == RatMatrix([[Fraction(1, 2)]])
    res = solve(RatMatrix([[0]]), RatMatrix([[1]]))
    assert isinstance(res, Infeasible) and res.certificate == RatMatrix([[1]])
    b = RatMatrix([[1, Fraction(2, 3)], [-5, 7]])
    res = solve(RatMatrix.identity(2), b)
    assert isinstance(res, Solution) and res.x == b
    with pytest.raises(DimensionMismatch):
        solve(RatMatrix.identity(2), RatMatrix.zeros(3, 1))


def test_direct_sum_examples():
    e1 = RatMatrix([[1], [0]])
    e2 = RatMatrix([[0], [1]])
    cert = direct_sum_check([e1, e2], 2)
    assert isinstance(cert, Certified) and cert.rank == 2
    fail = direct_sum_check([e1, e1], 2)
    assert isinstance(fail, Failure)
    assert same_span(fail.witness, RatMatrix([[1], [-1]]))
    empty = direct_sum_check([], 0)
    assert isinstance(empty, Certified) and empty.rank == 0
    with pytest.raises(DimensionMismatch):
        direct_sum_check([e1], 3)


def test_inverse():
    m = RatMatrix([[2, 1], [1, 1]])
    assert m @ inverse(m) == RatMatrix.identity(2)
    with pytest.raises(SingularMatrix):
        inverse(RatMatrix([[1, 2], [2, 4]]))
    with pytest.raises(DimensionMismatch):
        inverse(RatMatrix.zeros(2, 3))
    assert inverse(RatMatrix.zeros(0, 0)).shape == (0, 0)


def test_stacking_and_blocks():
    a = RatMatrix([[1, 2], [3, 4]])
    assert hstack([a, a]).shape == (2, 4)
    assert vstack([a, a]).shape == (4, 2)
    assert hstack([], rows=3).shape == (3, 0)
    assert vstack([], cols=2).shape == (0, 2)
    assert a.T == RatMatrix([[1, 3], [2, 4]])
    assert a.take_columns([1]) == RatMatrix([[2], [4]])
    assert a.row_block(1, 2) == RatMatrix([[3, 4]])
    assert (a - a).is_zero()
    assert a.scale(Fraction(1, 2)) == RatMatrix([[Fraction(1, 2), 1], [Fraction(3, 2), 2]])


def test_equality_ignores_internal_scaling():
    assert RatMatrix([[Fraction(2, 4)]]) == RatMatrix([[Fraction(1, 2)]])
    assert RatMatrix([[1]]) != RatMatrix([[1, 0]])


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == sympy_rank(m)
    assert rank(m) == rank(m.T)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rref_properties(m):
    r, piv, k = rref(m)
    assert k == len(piv) == sympy_rank(m)
    assert rref(r)[0] == r
    if m.rows and m.cols:
        assert to_sympy(r) == to_sympy(m).rref()[0]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_kernel_properties(m):
    k = kernel_basis(m)
    assert k.rows == m.cols
    assert k.cols == m.cols - rank(m)
    assert (m @ k).is_zero()
    assert rank(k) == k.cols


@settings(max_examples=150, deadline=None)
@given(matrices(), st.integers(0, 3), st.data())
def test_solve_is_exhaustive(m, nrhs, data):
    b = RatMatrix([[data.draw(small) for _ in range(nrhs)] for _ in range(m.rows)], rows=m.rows, cols=nrhs)
    res = solve(m, b)
    if isinstance(res, Solution):
        assert m @ res.x == b
        assert span_contains(m, b)
    else:
        y = res.certificate
        assert (y.T @ m).is_zero()
        assert not (y.T @ b).is_zero()
        assert not span_contains(m, b)


@settings(max_examples=80, deadline=None)
@given(matrices(max_rows=4, max_cols=3), matrices(max_rows=4, max_cols=3))
def test_direct_sum_agrees_with_rank(a, b):
    if a.rows != b.rows:
        b = RatMatrix.zeros(a.rows, b.cols)
    cert = direct_sum_check([a, b], a.rows)
    combined = hstack([a, b], rows=a.rows)
    if isinstance(cert, Certified):
        assert sympy_rank(combined) == a.cols + b.cols
    else:
        assert sympy_rank(combined) < a.cols + b.cols
        assert (combined @ cert.witness).is_zero() and not cert.witness.is_zero()
