"""
Command-line front end.

    drsubmod validate instances/fig5.json
    drsubmod hull vertices instances/fig3e.json
    drsubmod solve instances/quad2d.json --report out.json

Human-readable results go to stdout, logs to stderr. Exit codes: 0 success,
1 usage or validation error, 2 degraded (bound-only) solve, 3 numerical failure.
"""

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from .bruteforce.oracles import max_violation_over_permutations, min_over_extreme_points, min_over_lattice
from .config.repository import InstanceDocument, load_document, load_vector
from .config.settings import settings
from .cuts.dr_cut import cut_violation, separate
from .exceptions import DrSubmodError, IterationLimit, NumericalFailure
from .forest.instance import ForestInstance, check_assumption1, check_assumption2, classify_instance
from .forest.normalize import lift_solution, normalize_property1
from .forest.oracle import ValueOracle, check_dr_submodularity
from .hull.extreme import enumerate_extreme_points
from .hull.rows import cz_rows
from .linopt.certificate import verify_certificate
from .linopt.tree_solver import solve_forest
from .lp.cz import solve_over_cz
from .perm.decomposition import decompose
from .solver.cutting_plane import minimize
from .solver.models import SolverOptions, SolveStatus

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_DEGRADED, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _vector_argument(tokens: Optional[List[str]], key: str) -> Optional[List[float]]:
    """
    A vector option is either one JSON/YAML file (a list, or a mapping with
    the list under key) or numbers split by spaces or commas.
    """
    if tokens is None:
        return None
    try:
        return [float(v) for token in tokens for v in token.replace(",", " ").split()]
    except ValueError:
        if len(tokens) == 1:
            return load_vector(tokens[0], key)
        raise UsageError(f"expected a vector file or numbers, got '{' '.join(tokens)}'")


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def _fmt_vector(values: Sequence[float]) -> str:
    return "[" + ", ".join(_fmt(v) for v in values) + "]"


def _fmt_set(values) -> str:
    return "{" + ", ".join(str(v) for v in sorted(values)) + "}"


class ReportEncoder(json.JSONEncoder):
    """Writes floats with 17 significant digits; numpy values, sets and pydantic models are converted."""

    def default(self, o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, (set, frozenset)):
            return sorted(o)
        if isinstance(o, BaseModel):
            return o.model_dump(mode="json")
        return super().default(o)

    def iterencode(self, o, _one_shot=False):
        def floatstr(value):
            if math.isnan(value):
                text = "NaN"
            elif math.isinf(value):
                text = "Infinity" if value > 0 else "-Infinity"
            else:
                return format(value, ".17g")
            if not self.allow_nan:
                raise ValueError(f"Out of range float value {text} in report")
            return text

        encoder = json.encoder.encode_basestring_ascii if self.ensure_ascii else json.encoder.encode_basestring
        markers = {} if self.check_circular else None
        return json.encoder._make_iterencode(
            markers, self.default, encoder, self.indent, floatstr,
            self.key_separator, self.item_separator, self.sort_keys, self.skipkeys, _one_shot,
        )(o, 0)


def dump_report(data: Any) -> str:
    """JSON text with every float written to 17 significant digits."""
    return json.dumps(data, cls=ReportEncoder) + "\n"


def _write_report(args: argparse.Namespace, data: dict) -> None:
    if not args.report:
        return
    path = Path(args.report)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_report(data), encoding="utf-8")
    logger.info(f"Report written to {path}")


def _load(args: argparse.Namespace):
    document = load_document(args.instance)
    inst = document.build()
    logger.info(f"Loaded instance '{document.name}': {inst!r}")
    return document, inst


def _oracle(document: InstanceDocument) -> ValueOracle:
    oracle = document.build_oracle()
    oracle.memoize = True
    return oracle


def _hull_ready(inst: ForestInstance, oracle: Optional[ValueOracle] = None):
    """Normalizes Property 1 when needed; a zero oracle stands in when none is given."""
    oracle = oracle or ValueOracle(lambda z: 0.0, inst.n, name="zero")
    ext, ext_oracle, vertex_map = normalize_property1(inst, oracle)
    if not vertex_map.is_identity:
        print(f"Property 1 normalization inserted vertices {vertex_map.inserted}")
    return ext, ext_oracle, vertex_map


def _query_point(args: argparse.Namespace, document: InstanceDocument, n: int) -> np.ndarray:
    values = _vector_argument(args.point, "point")
    values = values if values is not None else document.point
    if values is None:
        raise UsageError("a query point is required (--point or 'point' in the instance)")
    z = np.asarray(values, dtype=float)
    if z.shape != (n,):
        raise UsageError(f"point has {z.shape[0]} entries, instance has {n} vertices")
    return z


def cmd_validate(args: argparse.Namespace) -> int:
    document, inst = _load(args)
    a1, a2 = check_assumption1(inst), check_assumption2(inst)
    print(f"Instance {document.name}: |V|={inst.n}, arcs={len(inst.arcs)}, roots={_fmt_set(inst.roots)}")
    print(f"Class: {classify_instance(inst).value}")
    print(f"Psi = {_fmt_set(inst.psi)}")
    print(f"Assumption 1: {'OK' if a1.holds else 'FAILS: ' + a1.message}")
    print(f"Assumption 2: {'OK' if a2.holds else 'FAILS: ' + a2.message + ' (solve runs in degraded mode)'}")
    print(f"Property 1: {'OK' if inst.satisfies_property1() else 'normalization needed'}")
    if a1.holds and a2.holds:
        print("assumptions OK")
    _write_report(args, {
        "instance": inst.to_dict(),
        "class": classify_instance(inst).value,
        "psi": sorted(inst.psi),
        "assumption1": a1.model_dump(),
        "assumption2": a2.model_dump(),
        "property1": inst.satisfies_property1(),
    })
    return EXIT_OK if a1.holds else EXIT_INVALID


def cmd_hull(args: argparse.Namespace) -> int:
    _, inst = _load(args)
    ext, _, _ = _hull_ready(inst)
    if args.what == "rows":
        rows = cz_rows(ext)
        for row in rows:
            print(row.describe())
        _write_report(args, {"rows": [row.model_dump(mode="json") for row in rows]})
        return EXIT_OK
    points = []
    for S, point in enumerate_extreme_points(ext, canonical=True):
        print(f"S={_fmt_set(S)}  P(S)={_fmt_vector(point)}")
        points.append({"subset": sorted(S), "point": point.tolist()})
    print(f"{len(points)} distinct extreme points")
    _write_report(args, {"extreme_points": points})
    return EXIT_OK


def cmd_linopt(args: argparse.Namespace) -> int:
    document, inst = _load(args)
    a = _vector_argument(args.objective, "a")
    a = a if a is not None else document.a
    if a is None:
        raise UsageError("a linear objective is required (--objective or 'a' in the instance)")
    ext, _, _ = _hull_ready(inst)
    a_ext = np.concatenate([np.asarray(a, dtype=float), np.zeros(ext.n - inst.n)])
    result = solve_forest(ext, a_ext)
    check = verify_certificate(ext, a_ext, result.z, result.certificate)
    print(f"S* = {_fmt_set(result.subset)}")
    print(f"z = {_fmt_vector(result.z[: inst.n])}")
    print(f"objective = {_fmt(result.objective)}  dual objective = {_fmt(check.dual_objective)}")
    print("cases: " + ", ".join(f"{psi}:{case.value}" for psi, case in sorted(result.cases.items())))
    print(f"certificate {'valid' if check.valid else 'INVALID'} (max residual {check.max_residual:.3g})")
    report = {
        "subset": sorted(result.subset),
        "z": result.z[: inst.n].tolist(),
        "objective": result.objective,
        "certificate": result.certificate.to_dict(),
        "check": check.model_dump(),
        "cases": {str(k): v.value for k, v in sorted(result.cases.items())},
    }
    if args.check_lp:
        lp = solve_over_cz(ext, a_ext)
        objective = "-" if lp.objective is None else _fmt(lp.objective)
        print(f"LP over CZ: {lp.status.value}, objective = {objective}")
        report["lp_objective"] = lp.objective
    _write_report(args, report)
    return EXIT_OK if check.valid else EXIT_NUMERICAL


def cmd_decompose(args: argparse.Namespace) -> int:
    document, inst = _load(args)
    ext, _, vertex_map = _hull_ready(inst)
    z = _query_point(args, document, inst.n)
    if not vertex_map.is_identity:
        z = lift_solution(z, ext, vertex_map)
    decomposition = decompose(ext, z)
    print(f"permutation = {list(decomposition.permutation.order)}")
    print(f"t = {_fmt_vector(decomposition.t)}")
    for k in decomposition.support():
        print(f"  lambda_{k} = {_fmt(decomposition.weights[k])}  P(delta,{k}) = {_fmt_vector(decomposition.points[k])}")
    _write_report(args, decomposition.to_dict())
    return EXIT_OK


def cmd_separate(args: argparse.Namespace) -> int:
    document, inst = _load(args)
    ext, ext_oracle, vertex_map = _hull_ready(inst, _oracle(document))
    z = _query_point(args, document, inst.n)
    if not vertex_map.is_identity:
        z = lift_solution(z, ext, vertex_map)
    w = args.w if args.w is not None else (document.w if document.w is not None else 0.0)
    cut = separate(ext, ext_oracle, z, w)
    violation = cut_violation(cut, z, w)
    print(cut.describe())
    print(f"permutation = {cut.permutation}")
    print(f"violation at (z, w={_fmt(w)}) = {_fmt(violation)}")
    report = cut.model_dump()
    report["violation"] = violation
    _write_report(args, report)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    document, inst = _load(args)
    options = SolverOptions(
        epsilon=args.epsilon,
        max_iterations=args.max_iters,
        seed_point=args.seed_point,
        check_dr=args.check_dr,
        allow_degraded=not args.strict,
        seed=args.seed,
    )
    report = minimize(inst, _oracle(document), options)
    coords = ", ".join(_fmt(v) for v in report.point)
    print(f"status: {report.status.value}")
    print(f"optimum {_fmt(report.value)} at ({coords})")
    print(f"master bound {_fmt(report.master_bound)}, {report.iterations} iterations, {report.cuts_generated} cuts")
    if report.flags:
        print(f"flags: {', '.join(report.flags)}")
    data = report.model_dump(mode="json")
    data.pop("wall_time")
    _write_report(args, data)
    return EXIT_DEGRADED if report.status == SolveStatus.DEGRADED else EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    document, inst = _load(args)
    oracle = _oracle(document)
    if args.mode == "extreme":
        best = min_over_extreme_points(inst, oracle)
        value = best.value + oracle.base_value
        print(f"minimum over extreme points {_fmt(value)} at {_fmt_vector(best.point)}")
        _write_report(args, {"mode": args.mode, "value": value, "point": best.point.tolist()})
    elif args.mode == "lattice":
        point, value = min_over_lattice(inst, oracle, grid_step=args.grid_step)
        value += oracle.base_value
        print(f"minimum over the grid (step {_fmt(args.grid_step)}) {_fmt(value)} at {_fmt_vector(point)}")
        _write_report(args, {"mode": args.mode, "value": value, "point": point.tolist()})
    else:
        ext, ext_oracle, vertex_map = _hull_ready(inst, oracle)
        z = _query_point(args, document, inst.n)
        if not vertex_map.is_identity:
            z = lift_solution(z, ext, vertex_map)
        w = args.w if args.w is not None else (document.w if document.w is not None else 0.0)
        perm, violation = max_violation_over_permutations(ext, ext_oracle, z, w)
        print(f"most violated DR cut over all valid permutations: {list(perm.order)}, violation {_fmt(violation)}")
        _write_report(args, {"mode": args.mode, "permutation": list(perm.order), "violation": violation})
    return EXIT_OK


def cmd_check_dr(args: argparse.Namespace) -> int:
    document, inst = _load(args)
    result = check_dr_submodularity(_oracle(document), inst, samples=args.samples, seed=args.seed)
    print(f"DR-submodular check ({result.method}): {'passed' if result.passed else 'FAILED'}, "
          f"worst violation {_fmt(result.worst_violation)}")
    _write_report(args, result.model_dump())
    return EXIT_OK if result.passed else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--seed', type=int, default=0, help='Seed for sampled checks.')
    common.add_argument('--epsilon', type=float, default=settings.VIOLATION_TOL,
                        help='Cut violation tolerance of the solver.')
    common.add_argument('--report', type=str, default=None, help='Write a machine-readable JSON report here.')
    common.add_argument(
        '--log-level', type=str, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
        default='WARNING', help='Set the logging level.'
    )
    common.add_argument('--log-file', type=str, default=None, help='Also write logs to this file.')

    parser = _Parser(prog='drsubmod', description='DR-submodular minimization over directed rooted forests.')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('validate', parents=[common], help='Check an instance and its assumptions.')
    p.add_argument('instance')
    p.set_defaults(handler=cmd_validate)

    p = commands.add_parser('hull', parents=[common], help='Extreme points or linear description of the hull.')
    p.add_argument('what', choices=['vertices', 'rows'])
    p.add_argument('instance')
    p.set_defaults(handler=cmd_hull)

    p = commands.add_parser('linopt', parents=[common], help='Linear optimization over the hull with certificate.')
    p.add_argument('instance')
    p.add_argument('--objective', nargs='+', default=None, metavar='FILE_OR_VALUE',
                   help='Objective a: a JSON/YAML file (a list, or a mapping with "a") or its entries.')
    p.add_argument('--check-lp', action='store_true', help='Cross-check with the simplex over the CZ rows.')
    p.set_defaults(handler=cmd_linopt)

    for name, handler, text in (
        ('decompose', cmd_decompose, 'Convex decomposition of a hull point.'),
        ('separate', cmd_separate, 'Most violated DR cut at a point.'),
    ):
        p = commands.add_parser(name, parents=[common], help=text)
        p.add_argument('instance')
        p.add_argument('--point', nargs='+', default=None, metavar='FILE_OR_VALUE',
                       help='Point z: a JSON/YAML file (a list, or a mapping with "point") or its entries.')
        if name == 'separate':
            p.add_argument('--w', type=float, default=None, help='Epigraph value w.')
        p.set_defaults(handler=handler)

    p = commands.add_parser('solve', parents=[common], help='Minimize the instance objective.')
    p.add_argument('instance')
    p.add_argument('--max-iters', type=int, default=None, help='Cap on master LP solves.')
    p.add_argument('--seed-point', choices=['zero', 'upper'], default='zero', help='Point of the seed cut.')
    p.add_argument('--check-dr', action='store_true', help='Check DR-submodularity first.')
    p.add_argument('--strict', action='store_true', help='Fail instead of running degraded when Assumption 2 fails.')
    p.set_defaults(handler=cmd_solve)

    p = commands.add_parser('oracle', parents=[common], help='Exhaustive reference computations.')
    p.add_argument('instance')
    p.add_argument('--mode', choices=['extreme', 'lattice', 'perms'], required=True)
    p.add_argument('--grid-step', type=float, default=0.5, help='Grid spacing of continuous coordinates.')
    p.add_argument('--point', nargs='+', default=None, metavar='FILE_OR_VALUE', help='Point z for perms mode.')
    p.add_argument('--w', type=float, default=None, help='Epigraph value for perms mode.')
    p.set_defaults(handler=cmd_oracle)

    p = commands.add_parser('check-dr', parents=[common], help='Check DR-submodularity of the objective.')
    p.add_argument('instance')
    p.add_argument('--samples', type=int, default=None, help='Sample count for non-quadratic objectives.')
    p.set_defaults(handler=cmd_check_dr)
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    handlers = [logging.StreamHandler(sys.stderr)]
    if args.log_file:
        handlers.append(logging.FileHandler(args.log_file, mode='w'))
    logging.basicConfig(
        level=args.log_level.upper(),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_INVALID
    _configure_logging(args)
    try:
        return args.handler(args)
    except (UsageError, ValueError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalFailure, IterationLimit) as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DrSubmodError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run(sys.argv[1:]))
