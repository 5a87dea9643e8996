"""Command line front end.

Exit codes: 0 success, 1 verification failure or obstruction, 2 infeasible
extension problem, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .decomp import choose_daggers, dual_decomposition, geometric_decomposition, unisolvence_check
from .errors import DuplicateVertexInCell, GeodecompError, IndexOutOfRange, InvalidFamily, ParseError, ValidationError
from .extension import extend_family_to_hat
from .funcspace import FunctionSpace, assemble_global, synthesize_presheaf, vanishing_trace, verify_function_space
from .linalg import Certified, RatMatrix
from .simplicial import (
    Feasible,
    SimplicialComplex,
    SimplicialSpace,
    build_complex,
    default_extension,
    local_ops_from_simplicial,
    reference_complex,
    solve_simpext,
    space_lagrange,
    space_polyforms,
    space_whitney,
    verify_simpext,
)

__all__ = ["MeshFile", "parse_mesh", "parse_space", "run_command", "main"]

EXIT_OK, EXIT_FAIL, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2, 3

SQUARE = {"vertices": 4, "cells": [[0, 1, 2], [0, 2, 3]]}


class InputError(Exception):
    pass


class Outcome(Exception):
    """Carries a finished report plus its exit code out of a command."""

    def __init__(self, report: dict, code: int):
        super().__init__(report.get("status", ""))
        self.report = report
        self.code = code


# -- inputs -------------------------------------------------------------------------


@dataclass(frozen=True)
class MeshFile:
    vertex_count: int
    cells: tuple[tuple[int, ...], ...]

    def to_complex(self) -> SimplicialComplex:
        return build_complex(self.vertex_count, self.cells)


def mesh_from_object(data, source: str = "<mesh>") -> MeshFile:
    if not isinstance(data, dict):
        raise ParseError(f"{source}: top level must be an object with 'vertices' and 'cells'")
    for key in ("vertices", "cells"):
        if key not in data:
            raise ParseError(f"{source}: missing field '{key}'")
    n = data["vertices"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"{source}: field 'vertices' must be a positive integer")
    cells = data["cells"]
    if not isinstance(cells, list):
        raise ParseError(f"{source}: field 'cells' must be a list")
    out = []
    for i, cell in enumerate(cells):
        if not isinstance(cell, list) or not cell or not all(isinstance(v, int) and not isinstance(v, bool) for v in cell):
            raise ParseError(f"{source}: field 'cells[{i}]' must be a nonempty list of integers")
        out.append(tuple(cell))
    mesh = MeshFile(n, tuple(out))
    try:
        mesh.to_complex()
    except (DuplicateVertexInCell, IndexOutOfRange) as exc:
        raise ValidationError(f"{source}: {exc}") from None
    return mesh


def parse_mesh(path) -> MeshFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ParseError(f"{path}: not UTF-8") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return mesh_from_object(data, str(path))


def _int_field(text: str, spec: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise InputError(f"bad space {spec!r}: {text!r} is not an integer") from None
    if value < 0:
        raise InputError(f"bad space {spec!r}: parameters must be nonnegative")
    return value


def parse_space(spec: str) -> SimplicialSpace | int:
    """A built-in space, or the seed (an int) for ``presheaf:<seed>``."""
    parts = spec.split(":")
    kind, args = parts[0], parts[1:]
    arity = {"lagrange": 1, "plambda": 2, "p0lambda": 1, "whitney": 1, "presheaf": 1}
    if kind not in arity:
        raise InputError(f"unknown space {spec!r} (expected lagrange:r, plambda:r:k, p0lambda:k, whitney:k, presheaf:seed)")
    if len(args) != arity[kind]:
        raise InputError(f"bad space {spec!r}: {kind} takes {arity[kind]} parameter(s)")
    if kind == "presheaf":
        env = os.environ.get("GEODECOMP_SEED")
        return _int_field(env if env is not None else args[0], spec)
    nums = [_int_field(a, spec) for a in args]
    if kind == "lagrange":
        return space_lagrange(nums[0])
    if kind == "plambda":
        return space_polyforms(nums[0], nums[1])
    if kind == "p0lambda":
        return space_polyforms(0, nums[0])
    return space_whitney(nums[0])


# -- report helpers -------------------------------------------------------------------


def _matrix(m: RatMatrix) -> list[list[str]]:
    return m.to_strings()


def _certificate(cert) -> dict:
    if isinstance(cert, Certified):
        return {"kind": "Certified", "rank": cert.rank}
    out = {"kind": "Failure", "reason": cert.reason}
    if cert.witness is not None:
        out["witness"] = _matrix(cert.witness)
    return out


def _infeasible(result) -> dict:
    y = result.certificate
    return {
        "kind": "Infeasible",
        "y": _matrix(y),
        "yT_M_is_zero": (y.T @ result.system).is_zero(),
        "yT_B": _matrix(y.T @ result.rhs),
    }


def _build(space, mesh: MeshFile | None):
    """``(function space, complex or None, presheaf family or None)``."""
    if isinstance(space, int):
        fs, family = synthesize_presheaf(space)
        return fs, None, family
    complex_ = mesh.to_complex() if mesh is not None else reference_complex(2)
    return space.on_complex(complex_), complex_, None


def _space_name(space) -> str:
    return f"presheaf:{space}" if isinstance(space, int) else space.name


def _face_rows(fs: FunctionSpace) -> list[dict]:
    return [{"face": x, "dim": fs.dim(x), "vanishing": vanishing_trace(fs, x).dim} for x in fs.poset.elements]


def _family(fs, complex_, space, presheaf_family, report):
    """Consistent family on the faces, or an Outcome with the obstruction."""
    g = assemble_global(fs)
    total_vanishing = sum(vanishing_trace(fs, x).dim for x in fs.poset.elements)
    report["global_dim"] = g.dim
    report["vanishing_total"] = total_vanishing
    if g.dim != total_vanishing:
        rel = "<" if g.dim < total_vanishing else ">"
        report["status"] = f"no consistent family: dim ℱ(𝒯)={g.dim} {rel} Σ dim ℱ̊(F)={total_vanishing}"
        raise Outcome(report, EXIT_FAIL)
    if presheaf_family is not None:
        return presheaf_family, g
    ems = {}
    for m in range(complex_.dim):
        em = default_extension(space, m)
        if em is None:
            result = solve_simpext(space, m)
            if not isinstance(result, Feasible):
                report["status"] = f"Infeasible: no simplicial extension operator in dimension {m}"
                report["certificate"] = _infeasible(result)
                raise Outcome(report, EXIT_INFEASIBLE)
            em = result.matrix
        ems[m] = em
    return local_ops_from_simplicial(complex_, space, ems, fs), g


# -- commands ---------------------------------------------------------------------------


def cmd_verify_space(args) -> tuple[dict, int]:
    space = parse_space(args.space)
    mesh = parse_mesh(args.mesh) if args.mesh else None
    if mesh is None and args.dim is not None and not isinstance(space, int):
        mesh = MeshFile(args.dim + 1, (tuple(range(args.dim + 1)),))
    fs, complex_, family = _build(space, mesh)
    problems = verify_function_space(fs)
    report = {"command": "verify-space", "space": _space_name(space), "rows": _face_rows(fs),
              "violations": [str(v) for v in problems]}
    if not isinstance(space, int):
        wrong = [x for x in fs.poset.elements if fs.dim(x) != space.formula_dim(len(complex_.face(x)) - 1)]
        report["violations"] += [f"dimension of {x} differs from the closed formula" for x in wrong]
    report["status"] = "Valid" if not report["violations"] else "Invalid"
    return report, EXIT_OK if not report["violations"] else EXIT_FAIL


def cmd_extension(args) -> tuple[dict, int]:
    space = parse_space(args.space)
    if isinstance(space, int):
        raise InputError("extension operators are defined for the built-in simplicial spaces only")
    m = args.dim
    report = {"command": "extension", "space": space.name, "dim": m}
    if args.solve:
        result = solve_simpext(space, m)
        if isinstance(result, Feasible):
            report["status"] = "Feasible"
            report["matrix"] = _matrix(result.matrix)
            return report, EXIT_OK
        report["status"] = f"Infeasible: no simplicial extension operator in dimension {m}"
        report["certificate"] = _infeasible(result)
        return report, EXIT_INFEASIBLE
    em = default_extension(space, m)
    if em is None:
        report["status"] = "no built-in extension operator (try --solve)"
        return report, EXIT_FAIL
    problems = verify_simpext(space, m, em)
    report["matrix"] = _matrix(em)
    report["violations"] = [str(v) for v in problems]
    report["status"] = "Valid" if not problems else "Invalid"
    return report, EXIT_OK if not problems else EXIT_FAIL


def _decompose(args, command: str):
    space = parse_space(args.space)
    mesh = parse_mesh(args.mesh) if args.mesh else None
    if mesh is None and not isinstance(space, int):
        raise InputError(f"{command} needs --mesh for built-in spaces")
    fs, complex_, presheaf_family = _build(space, mesh)
    report = {"command": command, "space": _space_name(space)}
    if args.mesh:
        report["mesh"] = str(args.mesh)
    report["rows"] = _face_rows(fs)
    family, g = _family(fs, complex_, space, presheaf_family, report)
    hat, family_hat = extend_family_to_hat(family, g)
    primal = geometric_decomposition(hat, family_hat)
    dims = primal.block_dims()
    for row in report["rows"]:
        row["block"] = dims[row["face"]]
    total = sum(dims.values())
    # independent cross-check of the totals
    oracle = assemble_global(fs).dim
    report["total"] = total
    report["certificate"] = _certificate(primal.certificate)
    report["step_failures"] = [f"{t}: {f.reason}" for t, f in primal.step_failures]
    ok = primal.ok and total == oracle
    return report, ok, hat, family_hat, primal


def cmd_decompose(args) -> tuple[dict, int]:
    report, ok, *_ = _decompose(args, "decompose")
    report["status"] = "Certified" if ok else "Failure"
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_dofs(args) -> tuple[dict, int]:
    report, ok, hat, family_hat, primal = _decompose(args, "dofs")
    report["dagger"] = args.dagger
    daggers = choose_daggers(hat, family_hat, args.dagger)
    dual = dual_decomposition(hat, family_hat, daggers)
    dims = dual.block_dims()
    for row in report["rows"]:
        row["dofs"] = dims[row["face"]]
    uni = unisolvence_check(primal, dual)
    report["dual_certificate"] = _certificate(dual.certificate)
    report["unisolvence"] = _certificate(uni)
    ok = ok and dual.ok and isinstance(uni, Certified)
    report["status"] = "Certified" if ok else "Failure"
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_demo(args) -> tuple[dict, int]:
    if args.name == "p0-lagrange":
        mesh = mesh_from_object(SQUARE, "square")
        fs, complex_, _ = _build(space_lagrange(0), mesh)
        report = {"command": "demo p0-lagrange", "space": "lagrange:0", "mesh": "two-triangle square",
                  "rows": _face_rows(fs)}
        _family(fs, complex_, space_lagrange(0), None, report)
        report["status"] = "consistent family exists"
        return report, EXIT_OK
    ns = argparse.Namespace(space=f"p0lambda:{args.k}", dim=args.k, solve=True)
    report, code = cmd_extension(ns)
    report["command"] = f"demo p0-forms --k {args.k}"
    return report, code


# -- output -------------------------------------------------------------------------------


def _render_text(report: dict) -> str:
    lines = [" ".join(f"{k}={report[k]}" for k in ("command", "space", "mesh", "dim", "dagger") if k in report)]
    rows = report.get("rows")
    if rows:
        cols = [c for c in ("face", "dim", "vanishing", "block", "dofs") if c in rows[0]]
        table = [cols] + [[str(r[c]) for c in cols] for r in rows]
        if "block" in cols:
            total = ["total"] + ["" for _ in cols[1:]]
            total[cols.index("block")] = str(report.get("total", ""))
            if "dofs" in cols:
                total[cols.index("dofs")] = str(sum(r["dofs"] for r in rows))
            table.append(total)
        widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
        for row in table:
            lines.append("  ".join(cell.ljust(widths[0]) if i == 0 else cell.rjust(widths[i])
                                   for i, cell in enumerate(row)))
    if "global_dim" in report:
        lines.append(f"global dimension: {report['global_dim']}")
    for key in ("certificate", "dual_certificate", "unisolvence"):
        if key in report:
            cert = report[key]
            detail = f" rank {cert['rank']}" if "rank" in cert else f" ({cert.get('reason', '')})" if "reason" in cert else ""
            lines.append(f"{key.replace('_', ' ')}: {cert['kind']}{detail}")
            if "y" in cert:
                lines.append("  y = [" + ", ".join(r[0] for r in cert["y"]) + "]")
                lines.append(f"  y^T M = 0: {cert['yT_M_is_zero']}")
                lines.append("  y^T B = [" + ", ".join(cert["yT_B"][0]) + "]")
    if "matrix" in report:
        lines.append("matrix:")
        lines.extend("  " + " ".join(row) for row in report["matrix"])
    for v in report.get("violations", []) + report.get("step_failures", []):
        lines.append(f"violation: {v}")
    lines.append(f"status: {report['status']}")
    return "\n".join(lines) + "\n"


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geodecomp", description="Exact geometric decompositions of finite element spaces.")
    p.add_argument("--format", choices=("text", "json"), default="text")
    # also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-space", parents=[common], help="check functoriality of a space on a mesh")
    s.add_argument("--space", required=True)
    s.add_argument("--mesh")
    s.add_argument("--dim", type=int, help="use one reference simplex of this dimension instead of a mesh")
    s.set_defaults(func=cmd_verify_space)

    s = sub.add_parser("extension", parents=[common], help="check or search for a simplicial extension operator")
    s.add_argument("--space", required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--solve", action="store_true", help="solve the defining linear system")
    s.set_defaults(func=cmd_extension)

    s = sub.add_parser("decompose", parents=[common], help="geometric decomposition of the global space")
    s.add_argument("--mesh")
    s.add_argument("--space", required=True)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("dofs", parents=[common], help="degrees of freedom and unisolvence")
    s.add_argument("--mesh")
    s.add_argument("--space", required=True)
    s.add_argument("--dagger", choices=("projection", "euclidean"), default="projection")
    s.set_defaults(func=cmd_dofs)

    s = sub.add_parser("demo", parents=[common], help="built-in examples without a local basis")
    s.add_argument("name", choices=("p0-lagrange", "p0-forms"))
    s.add_argument("--k", type=int, default=1)
    s.set_defaults(func=cmd_demo)
    return p


def run_command(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "dim", None) is not None and args.dim < 0 or getattr(args, "k", 1) < 0:
        print("error: dimensions must be nonnegative", file=stderr)
        return EXIT_INPUT
    try:
        report, code = args.func(args)
    except Outcome as out:
        report, code = out.report, out.code
    except (InputError, ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except InvalidFamily as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_FAIL
    except GeodecompError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    if args.format == "json":
        stdout.write(json.dumps(report, ensure_ascii=False, indent=2) + "\n")
    else:
        stdout.write(_render_text(report))
    return code


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
