"""Command-line entry point: ``seedopt validate|solve|graph|fixpoint``.

Exit codes: 0 success, 1 invalid system or failed computation, 2 malformed
input or bad arguments, 3 path enumeration overflowed (report still written).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .documents import DocumentError, decode_system, encode_report, json_number
from .fixedpoint import (
    NonConvergenceError,
    affine_problem,
    contraction_iterate,
    derivative_operator,
    linear_fixed_space,
)
from .graph import build_graph, export_dot
from .model import GenerationSystem, validate_system
from .solver import DEFAULT_MAX_PATHS, Mode, Objective, ObjectiveError, Ranking, rank_seeds

EXIT_OK, EXIT_INVALID, EXIT_MALFORMED, EXIT_OVERFLOW = 0, 1, 2, 3


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code
        self.message = message


def _load_valid(path: Path) -> GenerationSystem:
    """Read, decode and validate; warnings go to stderr, errors abort."""
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise _Exit(EXIT_MALFORMED, f"cannot read {path}: {exc.strerror}")
    try:
        system = decode_system(data)
    except DocumentError as exc:
        raise _Exit(EXIT_MALFORMED, f"{path}: {exc}")
    diagnostics = validate_system(system)
    for d in diagnostics:
        print(d, file=sys.stderr)
    if any(d.severity == "error" for d in diagnostics):
        raise _Exit(EXIT_INVALID)
    return system


def cmd_validate(args) -> int:
    _load_valid(args.file)
    return EXIT_OK


def _table(ranking: Ranking) -> str:
    pareto = ranking.objective.mode is Mode.PARETO
    header = ["rank", "seed", "transport_mass", "best_cost", "best_path"] + (["pareto"] if pareto else [])
    rows = [header]
    for r in ranking:
        row = [str(r.rank), str(r.seed), str(json_number(r.transport_mass)),
               str(r.best_cost), " ".join(r.best_path.rule_ids) or "-"]
        if pareto:
            row.append("yes" if r.pareto_optimal else "no")
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    if ranking.overflow:
        lines.append("warning: path enumeration overflowed; results may be incomplete")
    return "\n".join(lines) + "\n"


def cmd_solve(args) -> int:
    system = _load_valid(args.file)
    keys = tuple(k.strip() for k in args.objective.split(","))
    try:
        objective = Objective(keys, Mode(args.mode), args.rng_seed)
        objective.check(system)
    except ObjectiveError as exc:
        raise _Exit(EXIT_MALFORMED, str(exc))
    ranking = rank_seeds(build_graph(system), system, objective, args.max_paths)
    sys.stdout.write(encode_report(ranking) if args.format == "json" else _table(ranking))
    return EXIT_OVERFLOW if ranking.overflow else EXIT_OK


def cmd_graph(args) -> int:
    system = _load_valid(args.file)
    sys.stdout.write(export_dot(build_graph(system)))
    return EXIT_OK


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _Exit(EXIT_MALFORMED, f"{what}: malformed JSON: {exc}")


def _floats(values) -> list[float]:
    return [float(v) for v in values]


def cmd_fixpoint_affine(args) -> int:
    matrix = offset = None
    if args.input is not None:
        try:
            doc = json.loads(args.input.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise _Exit(EXIT_MALFORMED, f"{args.input}: {exc}")
        if not isinstance(doc, dict):
            raise _Exit(EXIT_MALFORMED, f"{args.input}: expected an object with matrix and offset")
        matrix, offset = doc.get("matrix"), doc.get("offset")
    if args.matrix is not None:
        matrix = _json_arg(args.matrix, "--matrix")
    if args.offset is not None:
        offset = _json_arg(args.offset, "--offset")
    if matrix is None or offset is None:
        raise _Exit(EXIT_MALFORMED, "affine map needs both a matrix and an offset")
    x0 = _json_arg(args.x0, "--x0") if args.x0 is not None else None

    try:
        problem = affine_problem(matrix, offset, x0=x0, tol=args.tol, max_iter=args.max_iter)
    except (TypeError, ValueError) as exc:
        code = EXIT_INVALID if "not a contraction" in str(exc) else EXIT_MALFORMED
        raise _Exit(code, str(exc))
    try:
        result = contraction_iterate(problem)
    except NonConvergenceError as exc:
        raise _Exit(EXIT_INVALID, str(exc))
    out = {
        "point": _floats(result.point),
        "iterations": result.iterations,
        "residual": result.residual,
        "certified_bound": result.certified_bound,
        "modulus": problem.lam,
        "diagnostics": list(result.diagnostics),
    }
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def cmd_fixpoint_derivative(args) -> int:
    if args.degree < 0:
        raise _Exit(EXIT_MALFORMED, "--degree must be nonnegative")
    basis = linear_fixed_space(derivative_operator(args.degree), args.tol)
    out = {"degree": args.degree, "dimension": len(basis), "basis": [_floats(v) for v in basis]}
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seedopt", description="Optimal seeds of self-replicating systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a system document")
    p.add_argument("file", type=Path)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="rank the seeds of the full machine set")
    p.add_argument("file", type=Path)
    p.add_argument("--objective", required=True,
                   help="comma-separated keys: transport_mass and/or cost component names")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.LEXICOGRAPHIC.value)
    p.add_argument("--max-paths", type=_positive, default=DEFAULT_MAX_PATHS)
    p.add_argument("--rng-seed", type=_nonnegative, default=None)
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("graph", help="export the generation graph")
    p.add_argument("file", type=Path)
    p.add_argument("--emit", choices=["dot"], default="dot")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("fixpoint", help="fixed-point demos for the single-resource case")
    fsub = p.add_subparsers(dest="kind", required=True)
    a = fsub.add_parser("affine", help="iterate x -> A x + b")
    a.add_argument("--matrix", help="JSON matrix, e.g. [[0.5]]")
    a.add_argument("--offset", help="JSON vector, e.g. [1]")
    a.add_argument("--input", type=Path, help='JSON file {"matrix": ..., "offset": ...}')
    a.add_argument("--x0", help="JSON start vector (default zeros)")
    a.add_argument("--tol", type=float, default=1e-10)
    a.add_argument("--max-iter", type=_positive, default=10_000)
    a.set_defaults(func=cmd_fixpoint_affine)
    d = fsub.add_parser("derivative", help="fixed space of d/dt on polynomials of degree <= d")
    d.add_argument("--degree", type=int, required=True)
    d.add_argument("--tol", type=float, default=1e-10)
    d.set_defaults(func=cmd_fixpoint_derivative)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        if exc.message:
            print(f"seedopt: {exc.message}", file=sys.stderr)
        return exc.code


def run() -> None:
    sys.exit(main())
