"""Command-line front end: parse instances, run the algorithms, verify against oracles."""

import argparse
import json
import random
import re
import sys
from fractions import Fraction

from .cyclecover import (
    DIRECTED_CAP,
    edge_fixed_reduction,
    pareto_cycle_covers,
    format_graph,
    norm_edge,
    parse_graph,
    random_graph,
)
from .discrepancy import FractionalColoring, beck_fiala_round, deviation
from .errors import CapRefusal, DomainError, InternalError, ParseError
from .exactmath import ZERO, norm_one
from .maxsat import (
    SAT_ORACLE_CAP,
    alg_k_maxsat,
    brute_force_sat,
    default_cap,
    format_assignment,
    format_mowcnf,
    is_heuristic,
    parse_mowcnf,
    random_instance,
    satisfied_weight,
)
from .maxtsp import TspConfig, alg_k_maxtsp, brute_force_tsp, format_tour
from .mocore import format_rational as _fmt, verify_approx_pareto

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_CAP = 4
EXIT_DOMAIN = 5
EXIT_INTERNAL = 6

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text):
    if not _RATIONAL.match(text):
        raise ValueError(f"not an integer or num/den rational: {text!r}")
    return Fraction(text)


def _rational_arg(text):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_matrix(text):
    """Rows of whitespace-separated rationals, one row per non-blank line."""
    rows = []
    for no, line in enumerate(text.splitlines(), 1):
        fields = line.split()
        if not fields or fields[0].startswith("#"):
            continue
        try:
            rows.append([parse_rational(f) for f in fields])
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), no) from None
        if len(rows[-1]) != len(rows[0]):
            raise ParseError(f"expected {len(rows[0])} entries, got {len(rows[-1])}", no)
    if not rows:
        raise ParseError("empty matrix file")
    return rows


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write_report(report, out):
    out.write(report.to_tsv() + "\n")
    status = "PASS" if report.satisfied else "FAIL"
    out.write(f"verify\t{status}\talpha={_fmt(report.alpha)}\n")
    for entry in report.uncovered():
        best = "none" if entry.best is None else " ".join(map(str, entry.best))
        out.write(f"uncovered\ttarget={' '.join(map(str, entry.target))}\tbest={best}\n")


def _finish(args, out, payload, report):
    if args.format == "json":
        if report is not None:
            payload["report"] = report.to_json()
        out.write(json.dumps(payload, indent=2) + "\n")
        if report is not None and not report.satisfied:
            for entry in report.uncovered():
                sys.stderr.write(f"uncovered Pareto point: {' '.join(map(str, entry.target))}\n")
    elif report is not None:
        _write_report(report, out)
    if report is not None and not report.satisfied:
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# --- subcommands -----------------------------------------------------------

def cmd_round(args, out):
    A = parse_matrix(_read(args.matrix))
    ncols = len(A[0])
    c = args.colors
    if ncols % c:
        raise DomainError(f"{ncols} columns is not a multiple of c={c}")
    n = ncols // c
    if args.p:
        values = [v for row in parse_matrix(_read(args.p)) for v in row]
        p = FractionalColoring(c, n, values)
    else:
        p = FractionalColoring.uniform(c, n)
    chi = beck_fiala_round(A, p)
    dev = deviation(A, p, chi)
    bound = 2 * norm_one(A)
    worst = max((abs(d) for d in dev), default=ZERO)
    ok = worst <= bound
    if args.format == "json":
        payload = {"choice": list(chi.choice), "deviation": [_fmt(d) for d in dev],
                   "bound": _fmt(bound), "max_deviation": _fmt(worst), "pass": ok}
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        for b, color in enumerate(chi.choice):
            out.write(f"block\t{b}\t{color}\n")
        out.write("deviation\t" + "\t".join(_fmt(d) for d in dev) + "\n")
        out.write(f"bound\t{_fmt(bound)}\n")
        out.write(f"check\t{'PASS' if ok else 'FAIL'}\t{_fmt(worst)} <= {_fmt(bound)}\n")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_tsp(args, out):
    G = parse_graph(_read(args.graph))
    c = 2 if G.directed else 3
    paper = TspConfig.paper(G.k, G.directed)
    config = TspConfig(c, paper.cap_fh if args.cap_fh is None else args.cap_fh,
                       paper.cap_fl if args.cap_fl is None else args.cap_fl,
                       paper.t, epsilon=args.epsilon)
    oracle_cap = args.oracle_cap if args.oracle_cap is not None else DIRECTED_CAP
    if args.verify and G.n > oracle_cap:
        raise CapRefusal("Hamiltonian cycle enumeration", G.n, oracle_cap)
    tours = alg_k_maxtsp(G, config)
    weights = [G.weight(t.edges()) for t in tours]
    heuristic = config.heuristic(G.k)
    report = None
    if args.verify:
        alpha = args.alpha if args.alpha is not None else Fraction(c - 1, c)
        exact = [w for _, w in brute_force_tsp(G, oracle_cap)]
        report = verify_approx_pareto(weights, exact, alpha)
    payload = {"heuristic": heuristic, "cap_fh": config.cap_fh, "cap_fl": config.cap_fl,
               "tours": [{"order": list(t.order), "weight": list(w)}
                         for t, w in zip(tours, weights)]}
    if args.format == "tsv":
        if heuristic:
            out.write(f"# heuristic mode: cap_fh={config.cap_fh} cap_fl={config.cap_fl}\n")
        for t, w in zip(tours, weights):
            out.write(format_tour(t, w) + "\n")
    return _finish(args, out, payload, report)


def cmd_sat(args, out):
    H = parse_mowcnf(_read(args.instance))
    cap = default_cap(H.k) if args.sat_cap is None else args.sat_cap
    oracle_cap = args.oracle_cap if args.oracle_cap is not None else SAT_ORACLE_CAP
    if args.verify and H.num_vars > oracle_cap:
        raise CapRefusal("assignment enumeration", H.num_vars, oracle_cap)
    assignments = alg_k_maxsat(H, cap)
    weights = [satisfied_weight(H, a) for a in assignments]
    heuristic = is_heuristic(H.k, cap)
    report = None
    if args.verify:
        alpha = args.alpha if args.alpha is not None else Fraction(1, 2)
        exact = [w for _, w in brute_force_sat(H, oracle_cap)]
        report = verify_approx_pareto(weights, exact, alpha)
    payload = {"heuristic": heuristic, "cap": cap,
               "assignments": [{"literals": [v if b else -v for v, b in enumerate(a, 1)],
                                "weight": list(w)} for a, w in zip(assignments, weights)]}
    if args.format == "tsv":
        if heuristic:
            out.write(f"# heuristic mode: cap={cap}\n")
        for a, w in zip(assignments, weights):
            out.write(f"{format_assignment(a)} | {' '.join(map(str, w))}\n")
    return _finish(args, out, payload, report)


def _parse_fixed(items, directed):
    edges = []
    for item in items:
        parts = item.split(",")
        if len(parts) != 2:
            raise DomainError(f"fixed edge must look like 'u,v', got {item!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise DomainError(f"fixed edge must look like 'u,v', got {item!r}") from None
        edges.append(norm_edge(u, v, directed))
    return edges


def cmd_cyclecover(args, out):
    G = parse_graph(_read(args.graph))
    F = _parse_fixed(args.fix, G.directed)
    epsilon = args.epsilon if args.epsilon is not None else Fraction(1, 2)
    cap = args.oracle_cap
    c = args.min_length

    def base(graph, eps):
        return [cov for cov, _ in pareto_cycle_covers(graph, c, (), cap)]

    covers = edge_fixed_reduction(G, F, epsilon, base)
    for cov in covers:
        if not set(F) <= cov.edges:
            raise InternalError("reduction returned a cover missing a fixed edge")
    rows = [(cov, G.weight(cov.edge_list())) for cov in covers]
    if args.format == "json":
        payload = {"fixed": [list(e) for e in F],
                   "covers": [{"cycles": [list(cy) for cy in cov.cycles], "weight": list(w)}
                              for cov, w in rows]}
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        if not rows:
            out.write("# no cycle cover contains the fixed edges\n")
        for cov, w in rows:
            cycles = " ; ".join(" ".join(map(str, cy)) for cy in cov.cycles)
            out.write(f"cover {cycles} | {' '.join(map(str, w))}\n")
    return EXIT_OK


def cmd_gen(args, out):
    rng = random.Random(args.seed)
    if args.kind == "tsp":
        G = random_graph(rng, args.n, args.k, not args.undirected, args.low, args.high)
        out.write(format_graph(G))
    else:
        H = random_instance(rng, args.n, args.clauses, args.k, args.low, args.high)
        out.write(format_mowcnf(H))
    return EXIT_OK


# --- argument parsing ------------------------------------------------------

def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="moapprox",
        description="Approximate Pareto sets for multiobjective maximum TSP and MaxSAT.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("tsv", "json"), default="tsv")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("round", parents=[common],
                       help="round a fractional coloring with bounded discrepancy")
    p.add_argument("matrix", help="matrix file, one row of rationals per line")
    p.add_argument("-c", "--colors", type=int, default=2)
    p.add_argument("--p", help="fractional coloring file (c*n rationals); uniform if omitted")
    p.set_defaults(func=cmd_round)

    def add_verify(q, alpha_help):
        q.add_argument("--verify", action="store_true", help="compare with the exact Pareto set")
        q.add_argument("--oracle-cap", type=_positive, help="size limit of the brute-force oracle")
        q.add_argument("--alpha", type=_rational_arg, help=alpha_help)

    p = sub.add_parser("tsp", parents=[common], help="approximate Pareto set of Hamiltonian cycles")
    p.add_argument("graph")
    p.add_argument("--cap-fh", type=_nonnegative, help="largest heavy fixed set")
    p.add_argument("--cap-fl", type=_nonnegative, help="largest light fixed set")
    p.add_argument("--epsilon", type=_rational_arg,
                   help="accuracy passed to the cycle cover solver")
    add_verify(p, "ratio to verify (default 1/2 directed, 2/3 undirected)")
    p.set_defaults(func=cmd_tsp)

    p = sub.add_parser("sat", parents=[common], help="approximate Pareto set of truth assignments")
    p.add_argument("instance")
    p.add_argument("--sat-cap", type=_nonnegative, help="largest |V0 u V1| (default 4k^2)")
    add_verify(p, "ratio to verify (default 1/2)")
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("cyclecover", parents=[common],
                       help="Pareto cycle covers containing fixed edges")
    p.add_argument("graph")
    p.add_argument("--fix", action="append", default=[], metavar="U,V")
    p.add_argument("--epsilon", type=_rational_arg)
    p.add_argument("-c", "--min-length", type=_positive,
                   help="minimum cycle length (default 2 directed, 3 undirected)")
    p.add_argument("--oracle-cap", type=_positive)
    p.set_defaults(func=cmd_cyclecover)

    p = sub.add_parser("gen", parents=[common], help="generate a seeded random instance")
    p.add_argument("kind", choices=("tsp", "sat"))
    p.add_argument("--n", type=_positive, required=True, help="vertices or variables")
    p.add_argument("--k", type=_positive, default=2)
    p.add_argument("--clauses", type=_positive, default=10)
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--seed", type=_nonnegative, default=0)
    p.add_argument("--low", type=_nonnegative, default=0)
    p.add_argument("--high", type=_nonnegative, default=20)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except CapRefusal as exc:
        sys.stderr.write(f"refused: {exc}\n")
        return EXIT_CAP
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except InternalError as exc:
        sys.stderr.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
