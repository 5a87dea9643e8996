"""The nine acceptance criteria, each exact and timed.

Run under pytest (one line per criterion is printed) or directly with
``python tests/test_acceptance.py``.
"""

import io
import json
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from geodecomp.cli import run_command  # noqa: E402
from geodecomp.decomp import (  # noqa: E402
    choose_daggers,
    dual_decomposition,
    geometric_decomposition,
    local_decomposition,
    unisolvence_check,
)
from geodecomp.extension import (  # noqa: E402
    extend_family_to_hat,
    extend_to_full_space,
    verify_consistent_family,
    verify_full_extension,
)
from geodecomp.funcspace import assemble_global, synthesize_presheaf, vanishing_trace, verify_function_space  # noqa: E402
from geodecomp.linalg import Certified, hstack, rank  # noqa: E402
from geodecomp.poset import peel_sequence  # noqa: E402
from geodecomp.simplicial import (  # noqa: E402
    NoExtension,
    build_complex,
    bubble_extension,
    default_extension,
    local_ops_from_simplicial,
    reference_complex,
    simplicial_from_local,
    solve_simpext,
    space_lagrange,
    space_polyforms,
    space_whitney,
    whitney_extension,
)
from oracles import (  # noqa: E402
    LAGRANGE2_TRIANGLE_BLOCKS,
    LAGRANGE3_SQUARE_DIM,
    SQUARE_CELLS,
    SQUARE_EDGES,
    WHITNEY1_SQUARE_DIM,
    count_polynomials,
    inverse_limit_dim,
    sympy_rank,
)


def _hat(space, complex_):
    ems = {m: default_extension(space, m) for m in range(complex_.dim)}
    family = local_ops_from_simplicial(complex_, space, ems)
    return family, *extend_family_to_hat(family)


def criterion_1():
    _, hat_space, hat = _hat(space_lagrange(2), reference_complex(2))
    dec = geometric_decomposition(hat_space, hat)
    dims = {x: d for x, d in dec.block_dims().items() if x != hat_space.top}
    ok = (dims == LAGRANGE2_TRIANGLE_BLOCKS and sum(dims.values()) == count_polynomials(2, 2)
          and dec.ok and sympy_rank(dec.combined()) == 6)
    return ok, f"blocks {[dims[x] for x in sorted(dims, key=lambda n: (n.count(','), n))]}"


def criterion_2():
    square = build_complex(4, SQUARE_CELLS)
    fs = space_lagrange(3).on_complex(square)
    family, hat_space, hat = _hat(space_lagrange(3), square)
    g = assemble_global(fs).dim
    vanishing = sum(vanishing_trace(fs, x).dim for x in fs.poset.elements)
    dec = geometric_decomposition(hat_space, hat)
    ok = g == vanishing == LAGRANGE3_SQUARE_DIM == inverse_limit_dim(fs) and dec.ok and dec.certificate.rank == g
    return ok, f"global dim {g}, sum of vanishing dims {vanishing}"


def criterion_3():
    square = build_complex(4, SQUARE_CELLS)
    fs = space_whitney(1).on_complex(square)
    _, hat_space, hat = _hat(space_whitney(1), square)
    dec = geometric_decomposition(hat_space, hat)
    nonzero = sorted(x for x, d in dec.block_dims().items() if d)
    g = assemble_global(fs).dim
    ok = (nonzero == SQUARE_EDGES and sum(dec.block_dims().values()) == g == WHITNEY1_SQUARE_DIM
          == inverse_limit_dim(fs) and dec.ok)
    return ok, f"nonzero blocks on {nonzero}, total {g}"


def criterion_4():
    details, ok = [], True
    for k in (1, 2):
        res = solve_simpext(space_polyforms(0, k), k)
        good = (isinstance(res, NoExtension) and (res.certificate.T @ res.system).is_zero()
                and not (res.certificate.T @ res.rhs).is_zero())
        ok = ok and good
        details.append(f"k={k} {'Infeasible' if good else 'unexpected'}")
    return ok, ", ".join(details)


MESHES_5 = {
    "square": {"vertices": 4, "cells": [[0, 1, 2], [0, 2, 3]]},
    "edge": {"vertices": 2, "cells": [[0, 1]]},
    "tetrahedron": {"vertices": 4, "cells": [[0, 1, 2, 3]]},
    "strip": {"vertices": 6, "cells": [[0, 1, 2], [1, 2, 3], [3, 4], [4, 5]]},
}


def criterion_5(tmp_dir: Path):
    ok, details = True, []
    for name, mesh in MESHES_5.items():
        path = tmp_dir / f"{name}.json"
        path.write_text(json.dumps(mesh), encoding="utf-8")
        out = io.StringIO()
        start = time.perf_counter()
        code = run_command(["decompose", "--mesh", str(path), "--space", "lagrange:0"], stdout=out, stderr=io.StringIO())
        elapsed = time.perf_counter() - start
        expected = f"no consistent family: dim ℱ(𝒯)=1 < Σ dim ℱ̊(F)={mesh['vertices']}"
        good = code == 1 and expected in out.getvalue() and elapsed < 1
        ok = ok and good
        details.append(f"{name} {'ok' if good else 'FAILED'}")
    return ok, ", ".join(details)


def criterion_6():
    failures = []
    for seed in range(100):
        fs, family = synthesize_presheaf(seed, max_elements=20)
        if verify_function_space(fs) or verify_consistent_family(family):
            failures.append(seed)
            continue
        hat_space, hat = extend_family_to_hat(family)
        primal = geometric_decomposition(hat_space, hat)
        good = primal.ok and primal.certificate.rank == assemble_global(fs).dim
        for kind in ("euclidean", "projection"):
            dual = dual_decomposition(hat_space, hat, choose_daggers(hat_space, hat, kind))
            good = good and dual.ok and isinstance(unisolvence_check(primal, dual), Certified)
        if not good:
            failures.append(seed)
    return not failures, f"100 presheaves, failures: {failures or 'none'}"


def criterion_7():
    spaces = [space_lagrange(r) for r in (1, 2, 3)] + [space_whitney(k) for k in (0, 1, 2)]
    bad, checked = [], 0
    for space in spaces:
        for n in (1, 2, 3):
            family, _, _ = _hat(space, reference_complex(n))
            fs = family.space
            decs = {x: local_decomposition(fs, family, x) for x in fs.poset.elements}
            full = extend_to_full_space(family, decs)
            checked += 1
            if verify_full_extension(full) or not all(d.ok for d in decs.values()):
                bad.append((space.name, n))
    return not bad, f"{checked} space/complex pairs, failures: {bad or 'none'}"


def criterion_8():
    cplx = reference_complex(3)
    bad = []
    for r in (1, 2, 3):
        sp = space_lagrange(r)
        ems = {m: bubble_extension(r, m) for m in range(3)}
        family = local_ops_from_simplicial(cplx, sp, ems)
        bad += [(sp.name, m) for m in range(3) if simplicial_from_local(cplx, sp, family, m) != ems[m]]
    for k in range(3):
        sp = space_whitney(k)
        ems = {m: whitney_extension(k, m) for m in range(3)}
        family = local_ops_from_simplicial(cplx, sp, ems)
        if simplicial_from_local(cplx, sp, family, k) != ems[k]:
            bad.append((sp.name, k))
    return not bad, f"round trips failing: {bad or 'none'}"


def criterion_9():
    _, hat_space, hat = _hat(space_lagrange(2), build_complex(4, SQUARE_CELLS))
    rng = random.Random(2024)
    runs = []
    for _ in range(10):
        order = peel_sequence(hat_space.poset, "down", rng)
        runs.append(geometric_decomposition(hat_space, hat, order=order))
    ok = all(d.ok for d in runs)
    for a in runs:
        for b in runs:
            for x in a.elements:
                for span_a, span_b in ((a.blocks[x], b.blocks[x]), (a.split_spans[x], b.split_spans[x])):
                    if rank(hstack([span_a, span_b], rows=span_a.rows)) != span_a.cols or span_a.cols != span_b.cols:
                        ok = False
    orders = {tuple(d.order) for d in runs}
    return ok, f"{len(orders)} distinct peel orders, spans agree"


CRITERIA = [
    (1, "Lagrange r=2 triangle blocks (1,1,1|1,1,1|0)", criterion_1, 1),
    (2, "Lagrange r=3 square: global dim 16", criterion_2, 5),
    (3, "Whitney k=1 square: edge blocks, total 5", criterion_3, 5),
    (4, "constant k-forms have no extension operator", criterion_4, 1),
    (5, "piecewise constants have no local basis", criterion_5, None),
    (6, "100 synthetic presheaves pass the whole pipeline", criterion_6, 60),
    (7, "full extension identities on reference complexes", criterion_7, 30),
    (8, "simplicial extension round trip", criterion_8, 10),
    (9, "peel-order independence", criterion_9, 10),
]


def _evaluate(number, title, func, limit, tmp_dir):
    start = time.perf_counter()
    ok, detail = func(tmp_dir) if number == 5 else func()
    elapsed = time.perf_counter() - start
    in_time = limit is None or elapsed < limit
    status = "PASS" if ok and in_time else "FAIL"
    budget = f" (limit {limit}s)" if limit is not None else ""
    line = f"criterion {number}: {status}  {title}: {detail}; {elapsed:.2f}s{budget}"
    return ok and in_time, line


@pytest.mark.parametrize("number,title,func,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, func, limit, tmp_path, capsys):
    passed, line = _evaluate(number, title, func, limit, tmp_path)
    with capsys.disabled():
        print("\n" + line)
    assert passed, line


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        results = [_evaluate(*c, Path(tmp)) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
