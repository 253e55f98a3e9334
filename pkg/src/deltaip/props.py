"""Randomised property suites with greedy counterexample minimisation."""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from math import ceil, floor
from typing import Callable

from .decomp import DecompBounds, DecoratedWitness, Graph, Inconclusive, decompose, validate
from .dpengine import SolverOptions, solve_problem2
from .exactmat import ExactMatrix, det, max_abs_subdet
from .generate import random_p2, random_pok, random_signed_graph, random_tree
from .ipcore import (Problem2Instance, Status, box_optimum, brute_force_solve, lp_solve,
                     p2_relaxation, proximity_bound)
from .reduction import pok_brute_force, pok_to_ip, solve_pok
from .sgraph import SignedGraph, alt_graph_exact, alt_tree, ocp_exact, to_incidence


@dataclass
class SuiteResult:
    suite: str
    passed: int = 0
    failed: int = 0
    counterexample: object = None
    detail: str = ""
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def summary(self) -> str:
        head = f"{self.suite}: {self.passed} passed, {self.failed} failed"
        if self.counterexample is not None:
            head += f"\n  minimal counterexample: {self.counterexample!r}\n  {self.detail}"
        return head


# --------------------------------------------------------------------------
# minimisation
# --------------------------------------------------------------------------

def minimize_graph(S: SignedGraph, fails: Callable[[SignedGraph], bool]) -> SignedGraph:
    """Drop edges, then isolated top vertices, while the property still fails."""
    changed = True
    while changed:
        changed = False
        for i in range(S.m):
            T = SignedGraph(S.n, S.edges[:i] + S.edges[i + 1:])
            if fails(T):
                S, changed = T, True
                break
        if not changed and S.n > 1 and all(max(u, v) < S.n - 1 for u, v, _ in S.edges):
            T = SignedGraph(S.n - 1, S.edges)
            if fails(T):
                S, changed = T, True
    return S


def minimize_p2(P: Problem2Instance, fails: Callable[[Problem2Instance], bool]) -> Problem2Instance:
    """Greedy deletion of rows, then columns, then shrinking of entries and boxes."""

    def attempts(P):
        for i in range(P.m):
            keep = [j for j in range(P.m) if j != i]
            yield replace(P, A=P.A.submatrix(keep, range(P.n)) if keep else ExactMatrix.zeros(0, P.n),
                          b=tuple(P.b[j] for j in keep))
        for i in range(P.k):
            keep = [j for j in range(P.k) if j != i]
            yield replace(P, W=P.W.submatrix(keep, range(P.n)) if keep else ExactMatrix.zeros(0, P.n),
                          d=tuple(P.d[j] for j in keep))
        for v in range(P.n):
            if all(r[v] == 0 for r in P.A):
                cols = [j for j in range(P.n) if j != v]
                if P.l[v] <= 0 <= P.u[v]:
                    yield Problem2Instance(P.A.submatrix(range(P.m), cols) if P.m else ExactMatrix.zeros(0, len(cols)),
                                           P.W.submatrix(range(P.k), cols) if P.k else ExactMatrix.zeros(0, len(cols)),
                                           P.b, P.d, [P.c[j] for j in cols], [P.l[j] for j in cols],
                                           [P.u[j] for j in cols], P.delta)
        for j in range(P.n):
            if P.c[j]:
                c = list(P.c); c[j] -= 1 if c[j] > 0 else -1
                yield replace(P, c=tuple(c))
            if P.l[j] < P.u[j]:
                l = list(P.l); l[j] += 1
                yield replace(P, l=tuple(l))
                u = list(P.u); u[j] -= 1
                yield replace(P, u=tuple(u))
        for i in range(P.k):
            for j in range(P.n):
                if P.W[i, j]:
                    rows = P.W.tolist()
                    rows[i][j] -= 1 if rows[i][j] > 0 else -1
                    yield replace(P, W=ExactMatrix(rows, cols=P.n))

    changed = True
    while changed:
        changed = False
        for Q in attempts(P):
            try:
                bad = fails(Q)
            except Exception:
                bad = False
            if bad:
                P, changed = Q, True
                break
    return P


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------

def _run(name, count, seed, make, check, minimize=None) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult(name)
    for _ in range(count):
        case = make(rng)
        ok, why = check(case)
        if ok:
            res.passed += 1
            continue
        res.failed += 1
        if res.counterexample is None:
            if minimize is not None:
                case = minimize(case, lambda c: not check(c)[0])
                why = check(case)[1]
            res.counterexample = case
            res.detail = why
    return res


def suite_prop3(count: int, seed: int, incidence=to_incidence) -> SuiteResult:
    def make(rng):
        n = rng.randint(2, 7)
        return random_signed_graph(rng, n, rng.randint(1, min(9, 2 * n)))

    def check(S):
        got, want = max_abs_subdet(incidence(S)), 2 ** ocp_exact(S)
        return got == want, f"max |subdet| = {got}, 2^ocp = {want}"

    return _run("prop3", count, seed, make, check, minimize_graph)


def suite_prop4(count: int, seed: int, incidence=to_incidence) -> SuiteResult:
    def make(rng):
        T = random_tree(rng, rng.randint(1, 8))
        return T, tuple(rng.randint(-5, 5) for _ in range(T.n))

    def check(case):
        T, w = case
        M = incidence(T).vstack(ExactMatrix([w], cols=T.n))
        got = abs(det(M))
        want = alt_tree(T.tree(range(T.m), range(T.n)), w)
        return got == want, f"|det| = {got}, alternating weight = {want}"

    return _run("prop4", count, seed, make, check)


def suite_det_identity(count: int, seed: int) -> SuiteResult:
    def make(rng):
        n = rng.randint(1, 6)
        S = random_signed_graph(rng, n, rng.randint(0, 2 * n))
        return S, tuple(rng.randint(-4, 4) for _ in range(n))

    def check(case):
        S, w = case
        M = to_incidence(S).vstack(ExactMatrix([w], cols=S.n))
        a, bound = alt_graph_exact(S, w), max_abs_subdet(M)
        return a <= bound, f"alt = {a} exceeds max |subdet| = {bound}"

    return _run("det-identity", count, seed, make, check)


def random_decomp_case(rng: random.Random):
    """Graph, terminal set and decorated parameter for ``k <= 2``, ``delta <= 3``."""
    n = rng.randint(1, 14)
    S = random_signed_graph(rng, n, rng.randint(0, 2 * n), simple=True)
    G = Graph.from_signed(S)
    k = rng.randint(1, 2)
    delta = rng.randint(1, 3)
    R = frozenset(rng.sample(range(n), rng.randint(0, n)))
    return G, R, 2 * k * delta + 1


def check_decomp_case(case):
    G, R, r = case
    out = decompose(G, R, r)
    if isinstance(out, DecoratedWitness):
        return out.verify(G, R), "witness does not verify"
    if isinstance(out, Inconclusive):
        return False, out.reason
    rep = validate(out, G, R, DecompBounds.for_r(r))
    return rep.ok, "; ".join(str(v) for v in rep.violations)


def suite_decomp_valid(count: int, seed: int) -> SuiteResult:
    return _run("decomp-valid", count, seed, random_decomp_case, check_decomp_case)


def random_dp_case(rng: random.Random) -> Problem2Instance:
    n = rng.randint(1, 10)
    m = rng.randint(0, min(20, 2 * n))
    k = rng.randint(0, 2)
    return random_p2(rng, n, m, k, max_terminals=3, box_points=20000, feasible=rng.random() < 0.85)


def check_dp_case(P: Problem2Instance):
    got = solve_problem2(P, SolverOptions(fallback="off"))
    want = brute_force_solve(P)
    if got.status != want.status:
        return False, f"status {got.status} vs brute force {want.status}"
    if got.optimal and got.objective != want.objective:
        return False, f"objective {got.objective} vs brute force {want.objective}"
    return True, ""


def suite_dp_oracle(count: int, seed: int) -> SuiteResult:
    return _run("dp-oracle", count, seed, random_dp_case, check_dp_case, minimize_p2)


def random_proximity_case(rng: random.Random) -> Problem2Instance:
    n = rng.randint(1, 6)
    k = rng.randint(0, 1)
    return random_p2(rng, n, rng.randint(0, 2 * n), k, box=8, wmax=2, max_terminals=2,
                     box_points=60000, feasible=True)


def proximity_check(P: Problem2Instance):
    """Compare the global optimum with the optimum over the proximity box
    around the LP vertex.  Returns ``(ok, message, box_was_smaller)``."""
    M, rhs, senses = p2_relaxation(P)
    lp = lp_solve(M, rhs, P.c, senses)
    if lp.status != Status.OPTIMAL or not lp.vertex:
        return False, f"LP status {lp.status}, vertex={lp.vertex}", False
    f = proximity_bound(P.n, P.delta)
    lo = [max(l, ceil(x - f)) for l, x in zip(P.l, lp.x)]
    hi = [min(u, floor(x + f)) for u, x in zip(P.u, lp.x)]
    smaller = any(a > l or b < u for a, b, l, u in zip(lo, hi, P.l, P.u))
    full = brute_force_solve(P)
    near = box_optimum(lo, hi, P.c, (P.A, P.b), (P.W, P.d))
    if not full.optimal:
        return near is None, "infeasible globally but not near the LP optimum", smaller
    if near is None or near[0] != full.objective:
        return False, f"best near LP vertex {near}, global {full.objective}", smaller
    return True, "", smaller


def suite_proximity(count: int, seed: int) -> SuiteResult:
    res = _run("proximity", count, seed, random_proximity_case, lambda P: proximity_check(P)[:2])
    return res


def suite_pok(count: int, seed: int) -> SuiteResult:
    def make(rng):
        return random_pok(rng, rng.randint(1, 12), rng.randint(1, 2))

    def check(K):
        want = pok_brute_force(K)
        got = solve_pok(K)
        if want is None:
            return got.status == Status.INFEASIBLE, f"pipeline {got.status}, brute force infeasible"
        if got.profit != want[0]:
            return False, f"pipeline profit {got.profit}, brute force {want[0]}"
        P = pok_to_ip(K)
        if P.m1 and max_abs_subdet(P.A) != 1:
            return False, "precedence block is not totally unimodular"
        return True, ""

    return _run("pok", count, seed, make, check)


SUITES = {
    "prop3": suite_prop3,
    "prop4": suite_prop4,
    "det-identity": suite_det_identity,
    "decomp-valid": suite_decomp_valid,
    "dp-oracle": suite_dp_oracle,
    "proximity": suite_proximity,
    "pok": suite_pok,
}
