"""Command-line interface: ``deltaip {solve,decompose,gen,props}``."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time

from . import io as iio
from .decomp import DecompBounds, DecoratedWitness, Graph, Inconclusive, decompose, validate
from .dpengine import SolverOptions, decorated_parameter, solve_problem2
from .exactmat import max_abs_subdet
from .generate import random_p1, random_p2, random_pok, random_signed_graph
from .ipcore import Problem1Instance, Problem2Instance, SizeError, Status, brute_force_solve, box_optimum
from .props import SUITES
from .reduction import PokInstance, pok_brute_force, solve_pok, solve_problem1
from .sgraph import terminals

EXIT_OK, EXIT_SCHEMA, EXIT_MISMATCH, EXIT_INCONCLUSIVE = 0, 2, 3, 4

AUDIT_CAP = 12


def _p1_brute(P: Problem1Instance, cap: int = 10 ** 7):
    """Enumerate the box implied by the single-variable rows of a Problem 1 instance."""
    from .reduction import presolve_box
    INF = 10 ** 9
    lo, hi = presolve_box(P.M, P.b, [-INF] * P.n, [INF] * P.n)
    if any(abs(v) >= INF for v in lo + hi):
        raise SizeError("Problem 1 instance has no explicit finite box")
    return box_optimum(lo, hi, P.c, (P.M, P.b), cap=cap)


def _options(args) -> SolverOptions:
    return SolverOptions(f_bound=args.f_bound, fallback=args.fallback, audit_delta=args.audit_delta,
                         threads=args.threads)


def cmd_solve(args) -> int:
    inst = iio.load(args.path)
    opts = _options(args)
    t0 = time.perf_counter()
    report: dict = {"problem": type(inst).__name__, "seed": args.seed}
    if isinstance(inst, Problem2Instance):
        if args.dump_dp:
            opts.keep_dp = True
        sol = solve_problem2(inst, opts)
        report.update(status=str(sol.status), objective=sol.objective, x=list(sol.x) if sol.x else None)
        info = dict(sol.info)
        info.pop("dp_engine", None)
        report["info"] = info
    elif isinstance(inst, Problem1Instance):
        if args.audit_delta:
            actual = max_abs_subdet(inst.M)
            report["audited_delta"] = actual
        sol = solve_problem1(inst, opts)
        report.update(status=str(sol.status), objective=sol.objective, x=list(sol.x) if sol.x else None,
                      info=sol.info)
    elif isinstance(inst, PokInstance):
        res = solve_pok(inst, opts)
        sol = res
        report.update(status=str(res.status), profit=res.profit, chosen=list(res.chosen), info=res.info)
    else:
        print("solve: unsupported problem kind", file=sys.stderr)
        return EXIT_SCHEMA
    report["wall_time"] = round(time.perf_counter() - t0, 4)
    code = EXIT_OK
    if args.oracle:
        verdict = _oracle(inst, report)
        report["oracle"] = verdict
        if verdict["verdict"] == "MISMATCH":
            code = EXIT_MISMATCH
    if report["status"] == str(Status.INCONCLUSIVE) and code == EXIT_OK:
        code = EXIT_INCONCLUSIVE
    _emit(report, args)
    return code


def _oracle(inst, report) -> dict:
    try:
        if isinstance(inst, Problem2Instance):
            ref = brute_force_solve(inst)
            want = (str(ref.status), ref.objective)
            got = (report["status"], report["objective"])
        elif isinstance(inst, Problem1Instance):
            ref = _p1_brute(inst)
            want = ("infeasible", None) if ref is None else ("optimal", ref[0])
            got = (report["status"], report["objective"])
        else:
            ref = pok_brute_force(inst)
            want = ("infeasible", None) if ref is None else ("optimal", ref[0])
            got = (report["status"], report["profit"])
    except SizeError as exc:
        return {"verdict": "SKIPPED", "reason": str(exc)}
    return {"verdict": "MATCH" if got == want else "MISMATCH", "solver": list(got), "oracle": list(want)}


def _emit(report: dict, args):
    if args.json_out:
        print(json.dumps(report, indent=1, sort_keys=True, default=str))
        return
    print(f"status: {report['status']}")
    if "profit" in report:
        print(f"profit: {report['profit']}")
        print(f"chosen: {' '.join(map(str, report['chosen']))}")
    else:
        print(f"objective: {report['objective']}")
        if report.get("x") is not None:
            print(f"x: {' '.join(map(str, report['x']))}")
    print(f"wall_time: {report['wall_time']}s")
    info = report.get("info", {})
    if "audited_delta" in report or "audited_delta" in info:
        print(f"audited_delta: {report.get('audited_delta', info.get('audited_delta'))}")
    if "decomposition" in info:
        d = info["decomposition"]
        print("decomposition: " + ", ".join(f"{k}={v}" for k, v in d.items()))
    if "fallback_reason" in info:
        print(f"fallback: {info['fallback_reason']}")
    if getattr(args, "dump_dp", False) and "dp" in info:
        dp = info["dp"]
        print(f"dp: keys={dp['keys']} chi_keys={dp['chi_keys']} distinct_targets={dp['distinct_targets']} "
              f"target_space={dp['target_space']} max_assignment_space={dp['max_assignment_space']}")
        for row in dp["nodes"]:
            print("  node {node} [{label}] type={type} bag={bag} adh={adhesion} chi_keys={chi_keys} entries={entries}".format(**row))
    if "oracle" in report:
        o = report["oracle"]
        if o["verdict"] == "SKIPPED":
            print(f"oracle: SKIPPED ({o['reason']})")
        else:
            print(f"oracle: {o['verdict']} solver={o['solver']} oracle={o['oracle']}")


def cmd_decompose(args) -> int:
    inst = iio.load(args.path)
    if not isinstance(inst, Problem2Instance):
        print("decompose: expects a p2 instance", file=sys.stderr)
        return EXIT_SCHEMA
    G, R = Graph.from_matrix(inst.A), terminals(inst.W)
    r = args.r if args.r is not None else decorated_parameter(inst)
    out = decompose(G, R, r)
    print(f"r: {r}  terminals: {sorted(R)}")
    if isinstance(out, DecoratedWitness):
        tag = " (heuristic search)" if out.heuristic else ""
        print(f"witness{tag}: tree on {sorted(out.vertices)} with terminal leaves {sorted(out.terminal_leaves)}")
        print(f"witness verifies: {out.verify(G, R)}")
        return EXIT_OK
    if isinstance(out, Inconclusive):
        print(f"inconclusive: {out.reason}")
        return EXIT_INCONCLUSIVE
    print(f"decomposition: {len(out.bags)} bags, root {out.root}")
    for t, bag in enumerate(out.bags):
        print(f"  {t} [{out.labels[t]}] type={int(out.types[t])} parent={out.parent[t]} bag={sorted(bag)}")
    rep = validate(out, G, R, DecompBounds.for_r(r))
    for line in rep.lines():
        print(f"  {line}")
    return EXIT_OK if rep.ok else EXIT_INCONCLUSIVE


def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    kind = args.kind
    if kind == "p2-random":
        if args.n > AUDIT_CAP:
            print(f"gen: n={args.n} exceeds the audit cap {AUDIT_CAP}", file=sys.stderr)
            return EXIT_SCHEMA
        obj = random_p2(rng, args.n, args.m if args.m is not None else args.n, args.k)
    elif kind == "p1-random":
        if args.n1 + args.n2 > AUDIT_CAP:
            print(f"gen: n1+n2 exceeds the audit cap {AUDIT_CAP}", file=sys.stderr)
            return EXIT_SCHEMA
        obj = random_p1(rng, args.n1, args.n2, args.m if args.m is not None else args.n1, args.m2)
    elif kind == "pok-random":
        obj = random_pok(rng, args.n, args.k or 1)
    else:
        obj = random_signed_graph(rng, args.n, args.m if args.m is not None else args.n)
    text = iio.dumps(obj)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_props(args) -> int:
    res = SUITES[args.suite](args.count, args.seed)
    print(res.summary())
    return EXIT_OK if res.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="deltaip", description="Exact IP solver for two-non-zero rows plus few extra rows/columns")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("path")
    s.add_argument("--audit-delta", action="store_true", help="compute the true max |subdeterminant| (exponential)")
    s.add_argument("--oracle", action="store_true", help="also solve by brute force and compare")
    s.add_argument("--dump-dp", action="store_true", help="print per-node DP table statistics")
    s.add_argument("--fallback", choices=("auto", "off"), default="auto")
    s.add_argument("--f-bound", choices=("nd", "sharp"), default="nd")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--json-out", action="store_true")
    s.set_defaults(func=cmd_solve)

    d = sub.add_parser("decompose", help="decompose the graph of a p2 instance")
    d.add_argument("path")
    d.add_argument("--r", type=int, default=None, help="decorated-tree parameter (default 2*k*delta+1)")
    d.set_defaults(func=cmd_decompose)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("kind", choices=("p2-random", "p1-random", "pok-random", "signed-graph-random"))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=6)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--n1", type=int, default=4)
    g.add_argument("--n2", type=int, default=1)
    g.add_argument("--m2", type=int, default=1)
    g.add_argument("-o", "--out", default=None)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("props", help="run a property suite")
    r.add_argument("suite", choices=sorted(SUITES))
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--count", type=int, default=100)
    r.set_defaults(func=cmd_props)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except iio.SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
