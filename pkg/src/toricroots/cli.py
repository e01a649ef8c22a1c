"""Command-line interface: ``toricroots <command> ...``.

Every command prints canonical JSON (or report lines for ``selftest``) on
stdout.  Exit codes: 0 success, 2 validation failure with witnesses,
3 input error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .formats import InputError, canonical_json, load_datum, load_root_table, root_table, table_to_dict
from .linalg import as_matrix, is_unimodular
from .oracles import InvalidUpsilonError, LinearUpsilon
from .reconstruct import brute_force_iso, glue_and_extend, validate_upsilon
from .cones import facet_group_generators
from .roots import weight_monoid_from_roots
from .selftest import run_selftest

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INPUT = 3


def _emit(obj) -> None:
    sys.stdout.write(canonical_json(obj))


def _rays(vs):
    return [list(v) for v in vs]


def cmd_dual(args) -> int:
    X = load_datum(args.cone)
    _emit({"lattice_rank": X.rank, "sigma_rays": _rays(X.rays),
           "dual_rays": _rays(X.sigma_dual.rays),
           "dual_inequalities": _rays(X.sigma_dual.inequalities)})
    return EXIT_OK


def _parse_matrix(text: str, n: int):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError:
        raise InputError(InputError.SCHEMA, "--map must be a JSON integer matrix") from None
    if (not isinstance(raw, list) or len(raw) != n
            or not all(isinstance(r, list) and len(r) == n and all(type(a) is int for a in r) for r in raw)):
        raise InputError(InputError.RANK_MISMATCH, f"--map must be an {n}x{n} integer matrix")
    matrix = as_matrix(raw)
    if not is_unimodular(matrix):
        raise InputError(InputError.SCHEMA, "--map must be unimodular")
    return matrix


def cmd_roots(args) -> int:
    X = load_datum(args.cone)
    if args.bound < 0:
        raise InputError(InputError.SCHEMA, "--bound must be non-negative")
    upsilon = LinearUpsilon(X, _parse_matrix(args.map, X.rank)) if args.map else None
    _emit(table_to_dict(root_table(X, args.bound, upsilon)))
    return EXIT_OK


def cmd_invariants(args) -> int:
    X = load_datum(args.cone)
    rays = []
    for i, v in enumerate(X.rays):
        slab = X.slabs[i]
        rays.append({
            "ray": list(v),
            "slab": {"base": list(slab.base), "directions": _rays(slab.directions.rays),
                     "equalities": [{"normal": list(c), "value": d} for c, d in slab.equalities]},
            "facet_rays": _rays(X.facets[i].rays),
            "facet_generators": _rays(facet_group_generators(X.sigma_dual, v)),
        })
    _emit({"lattice_rank": X.rank, "rays": rays})
    return EXIT_OK


def cmd_monoid(args) -> int:
    X = load_datum(args.cone)
    monoid = weight_monoid_from_roots(X)
    _emit({"case": monoid.case, "rays": _rays(monoid.cone.rays),
           "inequalities": _rays(monoid.cone.inequalities),
           "equals_sigma_dual": monoid.cone == X.sigma_dual})
    return EXIT_OK


def cmd_iso(args) -> int:
    X, Y = load_datum(args.source), load_datum(args.target)
    if X.rank != Y.rank:
        raise InputError(InputError.RANK_MISMATCH, f"lattice ranks {X.rank} and {Y.rank} differ")
    psi = brute_force_iso(X, Y)
    _emit({"isomorphic": psi is not None, "matrix": None if psi is None else _rays(psi.matrix)})
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    X, Y = load_datum(args.source), load_datum(args.target)
    if X.rank != Y.rank:
        raise InputError(InputError.RANK_MISMATCH, f"lattice ranks {X.rank} and {Y.rank} differ")
    table = load_root_table(args.upsilon)
    if table.datum != X or table.target != Y:
        raise InputError(InputError.SCHEMA, "the table's data do not match the given cone files")
    try:
        upsilon = table.upsilon()
    except InvalidUpsilonError as exc:
        raise InputError(InputError.SCHEMA, exc.message) from None
    report = validate_upsilon(upsilon, table.bound)
    psi = None
    if report.passed:
        try:
            psi = glue_and_extend(upsilon, report)
        except InvalidUpsilonError as exc:
            report.record(exc)
    out = report.as_dict()
    out["psi"] = None if psi is None else _rays(psi.matrix)
    _emit(out)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_selftest(args) -> int:
    report = run_selftest(args.seed, args.instances, args.rank_max, corrupt=args.corrupt)
    if args.json:
        _emit(report.as_dict(timings=args.timings))
    else:
        sys.stdout.write("\n".join(report.lines(timings=args.timings)) + "\n")
    return report.exit_code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="toricroots", description="Demazure roots of affine toric varieties.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dual", help="dual cone of sigma")
    p.add_argument("cone")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("roots", help="Demazure roots in a box, optionally with a linear upsilon table")
    p.add_argument("cone")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--map", help="unimodular matrix as JSON; adds the table of its images")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("invariants", help="per-ray slabs and facet generators")
    p.add_argument("cone")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("monoid", help="weight monoid recovered from the roots")
    p.add_argument("cone")
    p.set_defaults(func=cmd_monoid)

    p = sub.add_parser("iso", help="brute-force toric isomorphism search")
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("reconstruct", help="rebuild Psi from a root table")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--upsilon", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("selftest", help="random round trips through the reconstruction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--rank-max", type=int, default=2)
    p.add_argument("--corrupt", action="store_true", help="swap one pair of root images per instance")
    p.add_argument("--timings", action="store_true", help="include per-stage timings (not deterministic)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        _emit({"error": exc.code, "message": exc.message})
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
