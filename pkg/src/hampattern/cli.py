"""Command line front end.

Exit codes: 0 success, 1 honest negative (no cycle, invalid cycle, failed
robustness), 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .absorber import (
    RmbgError,
    build_gadget_template,
    build_rmbg,
    gadget_absorb_route,
)
from .core import ColourPattern, SolverParams, verify_pattern_cycle
from .instances import (
    PATTERN_KINDS,
    gen_counterexample,
    gen_identical,
    gen_random_dirac,
    load_instance,
    make_pattern,
    save_instance,
)
from .oracle import exact_solve, count_solutions, OracleBudgetExceeded
from .pipeline import solve

GENERATE_KINDS = ("random-dirac", "counterexample", "identical")


def _cmd_generate(args) -> int:
    m = args.m if args.m is not None else args.n
    if args.kind == "counterexample":
        collection, pattern = gen_counterexample(args.n)
        if args.pattern:
            print("counterexample ships its own pattern; ignoring --pattern", file=sys.stderr)
    elif args.kind == "identical":
        base = gen_random_dirac(args.n, 1, args.alpha, seed=args.seed)[0]
        collection = gen_identical(base, m)
        pattern = make_pattern(args.pattern, args.n, m, args.seed) if args.pattern else None
    else:
        collection = gen_random_dirac(args.n, m, args.alpha, seed=args.seed)
        pattern = make_pattern(args.pattern, args.n, m, args.seed) if args.pattern else None
    save_instance(args.out, collection, pattern)
    print(f"wrote {args.out}: kind={args.kind} n={collection.n} m={collection.m}")
    return 0


def _load_with_pattern(path):
    collection, pattern = load_instance(path)
    if pattern is None:
        if collection.m < collection.n:
            raise ValueError(
                "instance has no pattern and too few graphs for the identity default"
            )
        pattern = ColourPattern.identity(collection.n)
    return collection, pattern


def _print_cycle(walk) -> None:
    print(f"cycle with {walk.num_vertices} vertices")
    print(" ".join(str(v) for v in walk.vertices))


def _cmd_solve(args) -> int:
    collection, pattern = _load_with_pattern(args.infile)
    params = SolverParams(
        alpha=args.alpha,
        beta=args.beta,
        gamma=args.gamma,
        epsilon=args.epsilon,
        k_part=args.k,
        max_retries=args.max_retries,
        seed=args.seed,
    )
    result = solve(collection, pattern, params)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            json.dump(result.trace, fh, indent=1)
    if result.status == "cycle":
        _print_cycle(result.cycle)
        return 0
    print(f"{result.status}: {result.reason}", file=sys.stderr)
    return 1


def _read_cycle_file(path):
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if isinstance(obj, dict):
        obj = obj.get("cycle")
    if not isinstance(obj, list) or not all(isinstance(v, int) for v in obj):
        raise ValueError("cycle file must hold a JSON list of vertices (or {'cycle': [...]})")
    return obj


def _cmd_verify(args) -> int:
    collection, pattern = _load_with_pattern(args.infile)
    cycle = _read_cycle_file(args.cycle)
    report = verify_pattern_cycle(collection, pattern, cycle)
    if report.ok:
        print("valid pattern Hamilton cycle")
        return 0
    where = "" if report.position is None else f" at position {report.position}"
    print(f"invalid: {report.reason}{where} {report.detail or ''}".rstrip(), file=sys.stderr)
    return 1


def _cmd_oracle(args) -> int:
    collection, pattern = _load_with_pattern(args.infile)
    if args.count:
        try:
            print(count_solutions(collection, pattern, args.budget))
            return 0
        except OracleBudgetExceeded:
            print("budget exhausted before the count completed", file=sys.stderr)
            return 1
    result = exact_solve(collection, pattern, args.budget, any_rotation=args.any_rotation)
    if result.status == "cycle":
        _print_cycle(result.cycle)
        return 0
    print(result.status, file=sys.stderr)
    return 1


def _cmd_gadget(args) -> int:
    if args.rmbg:
        if args.m is None or args.beta is None:
            print("--rmbg needs --m and --beta", file=sys.stderr)
            return 2
        try:
            tpl = build_rmbg(args.m, args.beta, seed=args.seed, cache_dir=args.cache)
        except (RmbgError, ValueError) as e:
            print(f"no robust template: {e}", file=sys.stderr)
            return 1
        lo, hi = tpl.degree_bounds()
        stats = tpl.stats
        print(
            f"robust template m={tpl.m} beta={tpl.beta:g}: {tpl.num_edges()} edges, "
            f"degrees {lo}..{hi}, deletions {tpl.deleted}, "
            f"verified {stats.get('mode')} ({stats.get('checked')} checked)"
        )
        return 0
    tpl = build_gadget_template(args.ell)
    for i in range(1, args.ell + 2):
        route = gadget_absorb_route(tpl, i)
        if list(route.colours) != list(range(1, tpl.num_colours + 1)):
            print(f"route {i} has a broken colour sequence", file=sys.stderr)
            return 1
        if route.vertices[0] != tpl.b(0) or route.vertices[-1] != tpl.b(3 * args.ell + 1):
            print(f"route {i} has wrong endpoints", file=sys.stderr)
            return 1
    print(
        f"{args.ell + 1} routes verified, {len(tpl.edges)} edges, "
        f"colours 1..{tpl.num_colours}"
    )
    return 0


def _cmd_bench(args) -> int:
    from .bench import run_suite

    csv_path, figures = run_suite(
        args.suite, seeds=args.seeds, jobs=args.jobs, csv_path=args.csv, figdir=args.figdir
    )
    print(f"wrote {csv_path}")
    for p in figures:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hampattern",
        description="Hamilton cycles through a prescribed colour pattern over a graph collection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random or adversarial instance")
    p.add_argument("--kind", choices=GENERATE_KINDS, default="random-dirac")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="graph count (default n)")
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pattern", choices=PATTERN_KINDS, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("solve", help="run the constructive solver on an instance file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--k", type=int, default=None, help="part count for the path cover")
    p.add_argument("--max-retries", type=int, default=20)
    p.add_argument("--trace", default=None, help="write the stage trace as JSON")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="check a cycle file against an instance")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--cycle", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("oracle", help="exact search on small instances")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.add_argument("--count", action="store_true", help="count cycles instead of finding one")
    p.add_argument("--any-rotation", action="store_true", help="sweep the pattern anchor")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gadget", help="inspect the gadget or the robust template")
    p.add_argument("--ell", type=int, default=3)
    p.add_argument("--check-routes", action="store_true", help="verify all absorb routes (default mode)")
    p.add_argument("--rmbg", action="store_true", help="build and verify a robust template")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache", default=None, help="directory for the template cache")
    p.set_defaults(func=_cmd_gadget)

    p = sub.add_parser("bench", help="run a suite, write CSV and figures")
    p.add_argument("--suite", default="smoke")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", default=None)
    p.add_argument("--figdir", default=None)
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
