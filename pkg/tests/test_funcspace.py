import pytest
from hypothesis import given, settings, strategies as st

from geodecomp.errors import NotLowerSet, ShapeMismatch, UnknownIdentifier
from geodecomp.extension import verify_consistent_family
from geodecomp.funcspace import (
    FunctionSpace,
    adjoin_global,
    assemble_global,
    restrict_to_down_set,
    synthesize_presheaf,
    vanish_on_lower_set,
    vanishing_trace,
    verify_function_space,
)
from geodecomp.linalg import RatMatrix
from geodecomp.poset import build_poset
from geodecomp.simplicial import build_complex, reference_complex, space_lagrange
from oracles import LAGRANGE1_SQUARE_DIM, SQUARE_CELLS, inverse_limit_dim


@pytest.fixture(scope="module")
def p1_triangle():
    return space_lagrange(1).on_complex(reference_complex(2))


@pytest.fixture(scope="module")
def p2_triangle():
    return space_lagrange(2).on_complex(reference_complex(2))


def brute_force_functorial(fs):
    for f in fs.poset.elements:
        for g in fs.poset.below(f):
            for k in fs.poset.below(g):
                if fs.trace(k, g) @ fs.trace(g, f) != fs.trace(k, f):
                    return False
    return True


def test_lagrange_triangle_is_valid(p1_triangle):
    assert verify_function_space(p1_triangle) == []
    assert brute_force_functorial(p1_triangle)


def test_perturbed_trace_is_reported(p2_triangle):
    tr = p2_triangle.trace("0", "0,1")
    bumped = tr + RatMatrix([[1] + [0] * (tr.cols - 1)])
    broken = p2_triangle.with_trace("0", "0,1", bumped)
    problems = verify_function_space(broken)
    assert problems
    assert any(v.condition == "composition" and v.witnesses == ("0", "0,1", "0,1,2") for v in problems)


def test_wrong_shape_raises(p2_triangle):
    broken = p2_triangle.with_trace("0", "0,1", RatMatrix.zeros(2, 3))
    with pytest.raises(ShapeMismatch):
        verify_function_space(broken)


def test_discrete_space():
    p = build_poset(["a", "b"], [])
    fs = FunctionSpace(p, {"a": 2, "b": 3}, {})
    assert verify_function_space(fs) == []
    assert assemble_global(fs).dim == 5
    assert vanishing_trace(fs, "a").dim == 2


def test_vanishing_trace_examples(p2_triangle):
    edge = vanishing_trace(p2_triangle, "0,1")
    assert edge.dim == 1
    for k in ("0", "1"):
        assert (p2_triangle.trace(k, "0,1") @ edge.basis).is_zero()
    assert vanishing_trace(p2_triangle, "0,1,2").dim == 0
    assert vanishing_trace(p2_triangle, "0").dim == p2_triangle.dim("0") == 1
    with pytest.raises(UnknownIdentifier):
        vanishing_trace(p2_triangle, "9")


def test_global_dims():
    square = build_complex(4, SQUARE_CELLS)
    fs1 = space_lagrange(1).on_complex(square)
    assert assemble_global(fs1).dim == LAGRANGE1_SQUARE_DIM == inverse_limit_dim(fs1)
    fs0 = space_lagrange(0).on_complex(square)
    assert assemble_global(fs0).dim == 1 == inverse_limit_dim(fs0)


def test_global_columns_are_compatible():
    fs = space_lagrange(2).on_complex(build_complex(4, SQUARE_CELLS))
    g = assemble_global(fs)
    for f in fs.poset.elements:
        for k in fs.poset.below(f):
            assert fs.trace(k, f) @ g.projection(f) == g.projection(k)


def test_hat_top_has_no_vanishing_functions(p2_triangle):
    hat, g = adjoin_global(p2_triangle)
    assert hat.dim(hat.top) == g.dim == 6
    assert vanishing_trace(hat, hat.top).dim == 0
    assert verify_function_space(hat) == []


def test_restrict_to_down_set(p2_triangle):
    assert len(restrict_to_down_set(p2_triangle, "0,1,2").poset) == 7
    edge = restrict_to_down_set(p2_triangle, "0,1")
    assert set(edge.poset.elements) == {"0", "1", "0,1"} and edge.top == "0,1"
    assert edge.trace("0", "0,1") == p2_triangle.trace("0", "0,1")
    assert len(restrict_to_down_set(p2_triangle, "2").poset) == 1
    with pytest.raises(UnknownIdentifier):
        restrict_to_down_set(p2_triangle, "5")


def test_vanish_on_lower_set(p2_triangle):
    hat, _ = adjoin_global(p2_triangle)
    assert vanish_on_lower_set(hat, set()).dim == 6
    assert vanish_on_lower_set(hat, set(hat.poset.elements)).dim == 0
    skeleton = {"0", "1", "2", "0,1", "0,2", "1,2"}
    assert vanish_on_lower_set(hat, skeleton).dim == 0
    assert vanish_on_lower_set(hat, {"0", "1", "2"}).dim == 3
    with pytest.raises(NotLowerSet):
        vanish_on_lower_set(hat, {"0,1"})


def test_synthesize_examples():
    fs, family = synthesize_presheaf(0)
    assert verify_function_space(fs) == []
    assert verify_consistent_family(family) == []
    single, fam = synthesize_presheaf(3, max_elements=1)
    assert len(single.poset) == 1
    only = single.poset.elements[0]
    assert single.dim(only) == 1
    assert list(fam.ops) == [(only, only)]


def test_synthesize_is_deterministic():
    a, _ = synthesize_presheaf(11)
    b, _ = synthesize_presheaf(11)
    assert a.poset.elements == b.poset.elements
    assert all(a.trace(k, f) == b.trace(k, f) for (k, f), _ in a.trace_items())


def test_synthesize_is_not_trivial():
    sizes, nonidentity = [], 0
    for seed in range(30):
        fs, _ = synthesize_presheaf(seed)
        sizes.append(len(fs.poset))
        nonidentity += any(k != f and not fs.trace(k, f).is_zero() for (k, f), _ in fs.trace_items())
    assert max(sizes) >= 10 and nonidentity >= 20


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_synthesized_space_properties(seed):
    fs, family = synthesize_presheaf(seed)
    assert verify_function_space(fs) == []
    assert brute_force_functorial(fs)
    assert verify_consistent_family(family) == []
    g = assemble_global(fs)
    assert g.dim == inverse_limit_dim(fs)
    assert g.dim <= fs.total_dim()
    # strict inequality exactly when some nonzero space sits strictly below another element
    constrained = any(fs.dim(k) > 0 for f in fs.poset.elements for k in fs.poset.below(f, strict=True))
    assert (g.dim < fs.total_dim()) == constrained
    for x in fs.poset.elements:
        v = vanishing_trace(fs, x).basis
        for k in fs.poset.below(x, strict=True):
            assert (fs.trace(k, x) @ v).is_zero()
