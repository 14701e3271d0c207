"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource
guard tripped. A file argument of ``-`` means standard input (or output).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import acceptance
from .constructions import (
    clique_loops_transposition,
    complete_schedule_system,
    copy_walk_fds,
    degree2_obstruction_check,
    kn_boolean,
    red_light_fds,
)
from .digraph import (
    Digraph,
    alpha_p_bruteforce,
    alpha_p_flow,
    edmonds_alpha1,
    format_digraph,
    parse_digraph,
    scc_summary,
    walk_certificate,
)
from .errors import ConstructionError, FdsRankError, InputError, ResourceLimitError
from .fds import (
    apply_schedule,
    format_fds,
    format_schedule,
    interaction_graph,
    iterate,
    materialize,
    parse_fds,
    parse_schedule,
    periodic_rank,
    random_block_sequential,
    random_complete,
    rank,
    scaled,
)
from .sampling import (
    RejectionCapError,
    estimate_average_periodic_rank,
    estimate_average_scaled_rank,
    sample_exact,
    trial_seed,
)

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _digraph_record(D: Digraph) -> dict:
    return {"n": D.n, "arcs": [list(a) for a in D.sorted_arcs()]}


def _emit(args, text: str, record: dict) -> None:
    if args.json:
        sys.stdout.write(json.dumps(record, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- subcommands --------------------------------------------------------------------------


def cmd_alpha(args) -> int:
    D = parse_digraph(_read(args.digraph))
    if args.method == "edmonds":
        if args.p != 1:
            raise InputError("the edmonds method only computes p = 1")
        value = edmonds_alpha1(D)
    elif args.method == "brute":
        value = alpha_p_bruteforce(D, args.p)
    else:
        value = alpha_p_flow(D, args.p)
    record = {"digraph": _digraph_record(D), "p": args.p, "method": args.method, "alpha": value}
    lines = [str(value)]
    if args.certificate:
        walks = walk_certificate(D, args.p)
        record["walks"] = [list(w) for w in walks.walks]
        lines += [" ".join(map(str, w)) for w in walks.walks]
    _emit(args, "\n".join(lines), record)
    return EXIT_OK


def _transition(f, schedule_path):
    if schedule_path:
        return apply_schedule(f, parse_schedule(_read(schedule_path), f.n))
    return materialize(f)


def cmd_rank(args) -> int:
    f = parse_fds(_read(args.fds))
    T = _transition(f, args.schedule)
    if args.p != 1:
        T = iterate(T, args.p)
    r = rank(T)
    record = {"q": f.q, "n": f.n, "p": args.p, "schedule": args.schedule, "rank": r, "scaled_rank": scaled(r, f.q)}
    _emit(args, str(r), record)
    return EXIT_OK


def cmd_periodic(args) -> int:
    f = parse_fds(_read(args.fds))
    per = periodic_rank(_transition(f, args.schedule))
    record = {"q": f.q, "n": f.n, "schedule": args.schedule, "periodic_rank": per,
              "scaled_periodic_rank": scaled(per, f.q)}
    _emit(args, str(per), record)
    return EXIT_OK


def cmd_ig(args) -> int:
    f = parse_fds(_read(args.fds))
    G = interaction_graph(f)
    _emit(args, format_digraph(G), {"digraph": _digraph_record(G)})
    return EXIT_OK


def cmd_construct(args) -> int:
    kind = args.kind
    if kind == "degree2-check":
        report = degree2_obstruction_check(parse_digraph(_read(args.digraph)))
        record = {
            "systems": report.systems,
            "max_rank": {str(p): r for p, r in report.max_rank.items()},
            "bound": {str(p): b for p, b in report.bound.items()},
            "strict": report.strict,
        }
        _emit(args, "\n".join(report.lines()), record)
        return EXIT_OK if report.strict else EXIT_VERIFY
    if kind == "copy":
        D = parse_digraph(_read(args.digraph))
        f = copy_walk_fds(D, args.p, walk_certificate(D, args.p))
    elif kind == "redlight":
        D = parse_digraph(_read(args.digraph))
        f = red_light_fds(D, args.q, args.p, walk_certificate(D, args.p))
    elif kind == "kn":
        f = kn_boolean(args.n)
    elif kind == "clique-loops":
        f = clique_loops_transposition(args.n)
    else:
        built = complete_schedule_system(parse_digraph(_read(args.digraph)), args.m, args.seed, args.retries)
        f = built.fds
        _write(args.schedule_out, format_schedule(built.schedule))
    _write(args.out, format_fds(f))
    return EXIT_OK


def cmd_sample(args) -> int:
    D = parse_digraph(_read(args.digraph))
    estimator = estimate_average_periodic_rank if args.periodic else estimate_average_scaled_rank
    est = estimator(D, args.q, args.trials, args.seed, workers=args.workers)
    record = {
        "digraph": _digraph_record(D),
        "q": args.q,
        "trials": args.trials,
        "seed": args.seed,
        "statistic": "periodic_rank" if args.periodic else "scaled_rank",
        "mean": est.mean,
        "stderr": est.stderr,
    }
    _emit(args, f"mean {est.mean!r}\nstderr {est.stderr!r}", record)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        names = acceptance.suite_names(args.suite)
    except KeyError:
        raise InputError(f"unknown suite {args.suite!r}; choose from all, {', '.join(acceptance.SUITES)}") from None
    failed = False
    for name in names:
        result = acceptance.run_suite(name)
        failed |= not result.passed
        if args.json:
            _emit(args, "", {"criterion": result.number, "suite": name, "passed": result.passed,
                             "seconds": round(result.seconds, 3), "detail": result.detail})
        else:
            print(result.line(), flush=True)
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_explore(args) -> int:
    """Random search around two open questions; reports, never asserts."""
    D = parse_digraph(_read(args.digraph))
    best = 0.0
    for trial in range(args.trials):
        seq = trial_seed(args.seed, trial)
        rng = np.random.default_rng(seq)
        f = sample_exact(D, args.q, rng)
        if args.problem == "periodic-block":
            T = apply_schedule(f, random_block_sequential(D.n, rng))
            value = float(scaled(periodic_rank(T), args.q))
        else:
            T = apply_schedule(f, random_complete(D.n, rng))
            value = float(scaled(rank(T), args.q))
        best = max(best, value)
    if args.problem == "periodic-block":
        reference, label = alpha_p_flow(D, D.n), "alpha_n"
    else:
        reference, label = D.n - scc_summary(D).trivial_count, "n - T(D)"
    record = {"problem": args.problem, "q": args.q, "trials": args.trials, "seed": args.seed,
              "max_scaled": best, "reference": reference, "reference_name": label}
    _emit(args, f"max scaled {best!r}\n{label} {reference}", record)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON record per result")

    parser = argparse.ArgumentParser(prog="fdsrank", description="Maximum (periodic) rank of finite dynamical systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("alpha", parents=[common], help="maximum number of independent p-walks")
    p.add_argument("digraph")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--method", choices=["flow", "brute", "edmonds"], default="flow")
    p.add_argument("--certificate", action="store_true", help="also print a maximum walk family")
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("rank", parents=[common], help="rank of f^p or of a scheduled map")
    p.add_argument("fds")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--schedule")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("periodic", parents=[common], help="number of periodic points")
    p.add_argument("fds")
    p.add_argument("--schedule")
    p.set_defaults(func=cmd_periodic)

    p = sub.add_parser("ig", parents=[common], help="interaction graph in digraph format")
    p.add_argument("fds")
    p.set_defaults(func=cmd_ig)

    emits = argparse.ArgumentParser(add_help=False, parents=[common])
    emits.add_argument("--out", default="-", help="FDS output file (default stdout)")

    p = sub.add_parser("construct", help="build extremal systems")
    kinds = p.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("copy", parents=[emits])
    k.add_argument("digraph")
    k.add_argument("--p", type=int, default=1)
    k = kinds.add_parser("redlight", parents=[emits])
    k.add_argument("digraph")
    k.add_argument("--q", type=int, default=3)
    k.add_argument("--p", type=int, default=1)
    for name in ("kn", "clique-loops"):
        k = kinds.add_parser(name, parents=[emits])
        k.add_argument("--n", type=int, required=True)
    k = kinds.add_parser("complete-schedule", parents=[emits])
    k.add_argument("digraph")
    k.add_argument("--m", type=int, default=2)
    k.add_argument("--seed", type=int, required=True)
    k.add_argument("--retries", type=int, default=64)
    k.add_argument("--schedule-out", required=True)
    k = kinds.add_parser("degree2-check", parents=[common])
    k.add_argument("digraph")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("sample", parents=[common], help="Monte-Carlo average (periodic) rank")
    p.add_argument("digraph")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--periodic", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", parents=[common], help="run a named acceptance suite")
    p.add_argument("suite", help="'all' or one of: " + ", ".join(acceptance.SUITES))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("explore", parents=[common], help="random search on open questions")
    p.add_argument("problem", choices=["periodic-block", "rank-complete"])
    p.add_argument("digraph")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_explore)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ResourceLimitError, RejectionCapError, ConstructionError) as exc:
        print(f"fdsrank: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (FdsRankError, ValueError) as exc:
        print(f"fdsrank: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
