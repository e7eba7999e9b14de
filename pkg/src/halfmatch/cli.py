"""Command-line front end.

Subcommands: solve-max-srti, solve-gamma, solve-max-pri, solve-pop-crit,
solve-pop-maxw, verify, bench, generate. Exit codes: 0 on success, 1 on
any verification failure, 2 on input errors. Identical inputs and flags
always produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .core import InstanceError, MatchingError, blocking_edges, matching_size
from .engine import BoundExceeded, brute_force_max_stable
from .generate import GAMMA_PRESETS, generate_random
from .io import (
    build_result,
    check_result,
    format_matching,
    format_rational,
    load_instance,
    load_result,
    parse_matching,
    serialize_instance,
    serialize_result,
)
from .popularity import is_popular, is_popular_critical
from .solvers import (
    InfeasibleCritical,
    VerificationFailed,
    max_weight_dual,
    solve_max_gamma,
    solve_max_pri,
    solve_max_srti,
    solve_pop_crit,
    solve_pop_maxw,
)

ZERO = Fraction(0)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (InstanceError, MatchingError, InfeasibleCritical, BoundExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailed as exc:
        print(f"self-verification failed: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfmatch",
        description="stable and popular half-integral matchings on general graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for tag in ("solve-max-srti", "solve-gamma", "solve-max-pri",
                "solve-pop-crit", "solve-pop-maxw"):
        p = sub.add_parser(tag, help=f"run {tag} and write a self-verified result")
        p.add_argument("--input", required=True, help="instance file")
        p.add_argument("--output", help="result file (stdout when omitted)")
        p.add_argument("--critical", help="comma-separated critical vertices "
                       "(solve-pop-crit; defaults to the instance's set)")
        p.add_argument("--weights", choices=["instance", "unit"], default="instance",
                       help="weight source for solve-pop-maxw")
        p.add_argument("--oracle-bound", type=int, default=0,
                       help="when positive and the instance is small enough, "
                       "also record a popularity check (solve-max-pri)")
        p.add_argument("--scope", choices=["half", "sampled"], default="half")
        p.add_argument("--seed", type=int, default=None,
                       help="generator seed to record in the result file")
        p.set_defaults(handler=_cmd_solve, tag=tag)

    p = sub.add_parser("verify", help="re-check a result file from scratch")
    p.add_argument("--input", required=True, help="instance file")
    p.add_argument("--result", required=True, help="result file to re-check")
    p.add_argument("--oracle-bound", type=int, default=0,
                   help="re-run popularity checks when the instance fits")
    p.add_argument("--scope", choices=["half", "sampled"], default="half")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("bench", help="sweep seeds, compare against brute force, emit CSV")
    p.add_argument("--seeds", type=int, required=True, help="number of seeds (0..k-1)")
    p.add_argument("--n", type=int, required=True, help="vertices per instance")
    p.add_argument("--oracle-bound", type=int, default=8,
                   help="run the brute-force oracle when |E| is at most this")
    p.add_argument("--output", help="CSV path (stdout when omitted)")
    p.add_argument("--edge-density", type=float, default=0.5)
    p.add_argument("--parallel-prob", type=float, default=0.2)
    p.add_argument("--tie-prob", type=float, default=0.4)
    p.add_argument("--gamma-preset", choices=list(GAMMA_PRESETS), default="none",
                   help="with a preset, bench solve-gamma instead of solve-max-srti")
    p.add_argument("--bipartite", action="store_true")
    p.set_defaults(handler=_cmd_bench)

    p = sub.add_parser("generate", help="write a seeded random instance file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output", help="instance path (stdout when omitted)")
    p.add_argument("--edge-density", type=float, default=0.5)
    p.add_argument("--parallel-prob", type=float, default=0.0)
    p.add_argument("--tie-prob", type=float, default=0.0)
    p.add_argument("--weight-min", type=int, default=None)
    p.add_argument("--weight-max", type=int, default=None)
    p.add_argument("--gamma-preset", choices=list(GAMMA_PRESETS), default="none")
    p.add_argument("--bipartite", action="store_true")
    p.add_argument("--critical-count", type=int, default=0)
    p.set_defaults(handler=_cmd_generate)
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_solve(args) -> int:
    inst = load_instance(args.input)
    tag = args.tag
    verification: dict = {}

    if tag == "solve-max-srti":
        m = solve_max_srti(inst)
        bad = blocking_edges(inst, m, "weak")
        verification = {"mode": "weak", "blocking_edges": bad, "stable": not bad}
    elif tag == "solve-gamma":
        m = solve_max_gamma(inst)
        bad = blocking_edges(inst, m, "gamma")
        verification = {"mode": "gamma", "blocking_edges": bad, "stable": not bad}
    elif tag == "solve-max-pri":
        m = solve_max_pri(inst)
        verification = {"derived_stable": True}
        if 0 < len(inst.edges) <= args.oracle_bound:
            verdict = is_popular(inst, m, bound=args.oracle_bound, scope=args.scope)
            verification["popular"] = verdict.popular
            verification["popular_scope"] = verdict.scope
            if verdict.counterexample:
                rival, res = verdict.counterexample
                verification["counterexample"] = {
                    "matching": format_matching(rival),
                    "delta": format_rational(res.value),
                }
    elif tag == "solve-pop-crit":
        crit = (
            frozenset(x for x in args.critical.split(",") if x)
            if args.critical
            else inst.critical
        )
        m = solve_pop_crit(inst, crit)
        verification = {"derived_stable": True, "critical": sorted(crit),
                        "critical_ok": True}
    else:  # solve-pop-maxw
        if args.weights == "unit":
            weights = {e.eid: Fraction(1) for e in inst.edges}
        else:
            weights = dict(inst.weights or {})
        dual = max_weight_dual(inst, weights)
        m = solve_pop_maxw(inst, weights)
        got = sum((weights.get(e, ZERO) * val for e, val in m.items()), ZERO)
        verification = {
            "derived_stable": True,
            "weights_source": args.weights,
            "weight": format_rational(got),
            "dual_objective": format_rational(dual.objective),
            "critical": sorted(dual.critical),
        }

    # re-check through the same code path `verify` uses before writing
    result = build_result(tag, inst, m, verification, seed=args.seed)
    problems = check_result(inst, result)
    if problems:
        for msg in problems:
            print(f"self-verification failed: {msg}", file=sys.stderr)
        return 1
    _emit(serialize_result(result), args.output)
    return 0


def _cmd_verify(args) -> int:
    inst = load_instance(args.input)
    result = load_result(args.result)
    problems = check_result(inst, result)
    ver = result.get("verification", {})
    if args.oracle_bound and 0 < len(inst.edges) <= args.oracle_bound:
        m = parse_matching(result.get("matching", {}))
        if "popular" in ver:
            verdict = is_popular(inst, m, bound=args.oracle_bound, scope=args.scope)
            if verdict.popular != ver["popular"]:
                problems.append("popularity verdict does not re-derive")
        if "critical" in ver and ver.get("critical") is not None:
            try:
                crit_ok = is_popular_critical(
                    inst, m, frozenset(ver["critical"]), bound=args.oracle_bound
                ).popular
            except InstanceError:
                crit_ok = False
            if not crit_ok:
                problems.append("matching is not popular among critical rivals")
    if problems:
        for msg in problems:
            print(f"verification failure: {msg}", file=sys.stderr)
        return 1
    print("ok")
    return 0


def _cmd_bench(args) -> int:
    mode = "gamma" if args.gamma_preset != "none" else "weak"
    rows = []
    for seed in range(args.seeds):
        inst = generate_random(
            seed,
            args.n,
            edge_density=args.edge_density,
            parallel_prob=args.parallel_prob,
            tie_prob=args.tie_prob,
            gamma_preset=args.gamma_preset,
            bipartite=args.bipartite,
        )
        out = solve_max_gamma(inst) if mode == "gamma" else solve_max_srti(inst)
        size = matching_size(out)
        oracle = ratio = ""
        if len(inst.edges) <= args.oracle_bound:
            best, _ = brute_force_max_stable(inst, mode, bound=args.oracle_bound)
            oracle = format_rational(best)
            ratio = format_rational(best / size) if size else "1"
        rows.append(
            (seed, args.n, len(inst.edges), mode, format_rational(size), oracle, ratio)
        )
    rows.sort()
    lines = ["seed,n,edges,mode,size,oracle,ratio"]
    lines += [",".join(str(x) for x in row) for row in rows]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_generate(args) -> int:
    weight_range = None
    if args.weight_min is not None or args.weight_max is not None:
        lo = args.weight_min if args.weight_min is not None else 0
        hi = args.weight_max if args.weight_max is not None else max(lo, 1)
        weight_range = (lo, hi)
    inst = generate_random(
        args.seed,
        args.n,
        edge_density=args.edge_density,
        parallel_prob=args.parallel_prob,
        tie_prob=args.tie_prob,
        weight_range=weight_range,
        gamma_preset=args.gamma_preset,
        bipartite=args.bipartite,
        critical_count=args.critical_count,
    )
    _emit(serialize_instance(inst), args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
