"""Dynamic program over a typed tree-decomposition for Problem 2.

Rooted instance ``(t, chi, d)``: the subproblem on all vertices below node
``t`` with the adhesion variables fixed to ``chi`` and the extra rows summed
over vertices first seen at or below ``t`` required to equal ``d``.  Each
vertex pays its objective and extra-row contribution exactly once, at the
topmost node containing it (adhesion columns are zeroed everywhere else).

Tables are computed per ``(t, chi)`` for every reachable ``d`` at once and
memoised; children are folded in one at a time.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from math import prod
from typing import Callable

from .decomp import (BagType, DecompBounds, DecoratedWitness, Graph, Inconclusive,
                     TreeDecomposition, decompose, default_size_bound, validate)
from .exactmat import ExactMatrix, max_abs_subdet
from .ipcore import (InstanceError, Problem2Instance, SizeError, Solution, Status,
                     base_case_solve, brute_force_solve, check_feasible_p2, proximity_bound)
from .sgraph import terminals

log = logging.getLogger(__name__)


@dataclass
class RootedDecomposition:
    td: TreeDecomposition
    root: int
    children: list[list[int]]
    adh: list[frozenset]
    subtree: list[frozenset]

    @property
    def nodes(self) -> int:
        return len(self.td.bags)

    def local(self, t: int) -> frozenset:
        """Vertices charged at ``t``: the bag minus its adhesion."""
        return self.td.bags[t] - self.adh[t]

    def postorder(self) -> list[int]:
        out, stack = [], [(self.root, False)]
        while stack:
            t, done = stack.pop()
            if done:
                out.append(t)
                continue
            stack.append((t, True))
            stack.extend((c, False) for c in reversed(self.children[t]))
        return out


def build_rooted(td: TreeDecomposition) -> RootedDecomposition:
    roots = [t for t, p in enumerate(td.parent) if p is None]
    if roots != [td.root]:
        raise ValueError(f"decomposition must have exactly one root, found {roots}")
    ch = td.children()
    adh = [td.adhesion(t) for t in range(len(td.bags))]
    rd = RootedDecomposition(td, td.root, ch, adh, [frozenset()] * len(td.bags))
    for t in rd.postorder():
        u = set(td.bags[t])
        for c in ch[t]:
            u |= rd.subtree[c]
        rd.subtree[t] = frozenset(u)
    return rd


@dataclass(frozen=True)
class Entry:
    value: int
    assignment: tuple[tuple[int, int], ...]  # (vertex, value) over the bag, sorted
    child_targets: tuple[tuple[int, ...], ...]


class RootedDP:
    """Memoised evaluation of ``F_t(chi, d)`` tables."""

    def __init__(self, P: Problem2Instance, rd: RootedDecomposition,
                 oracle: Callable[[Problem2Instance], Solution] | None = None):
        self.P = P
        self.rd = rd
        self.oracle = oracle
        self.memo: dict[tuple[int, tuple], dict[tuple, Entry]] = {}
        self.rows = P.rows()
        self.wcols = [P.W.column(j) for j in range(P.n)]
        self._bag_rows = []
        for bag in rd.td.bags:
            self._bag_rows.append([r for r in self.rows if r[0] in bag and r[2] in bag])

    # -- local instances --------------------------------------------------

    def local_solve(self, t: int, chi: dict[int, int], d0: tuple) -> tuple[int, dict] | None:
        """Optimum of the local instance at ``t`` with bag target ``d0``."""
        table = self._local_table(t, chi)
        best = None
        for (proj, dd), (val, x0) in table.items():
            if dd == tuple(d0) and (best is None or val < best[0]):
                best = (val, dict(x0))
        return best

    def _local_table(self, t: int, chi: dict[int, int]) -> dict:
        """``(child projections, d0) -> (value, bag assignment)``, first minimum wins."""
        P, rd = self.P, self.rd
        bag = rd.td.bags[t]
        free = sorted(rd.local(t))
        k = P.k
        kids = rd.children[t]
        kid_adh = [sorted(rd.adh[c]) for c in kids]
        out: dict = {}
        if rd.td.types[t] == BagType.TYPE2:
            for v in free:
                if any(self.wcols[v]):
                    raise AssertionError(f"type-2 node {t} owns terminal {v}")
            sol = self._base_case(t, chi)
            if sol is not None:
                x0 = tuple(sorted(sol[1].items()))
                proj = tuple(tuple(sol[1][v] for v in a) for a in kid_adh)
                out[(proj, (0,) * k)] = (sol[0], x0)
            return out
        rows = self._bag_rows[t]
        ranges = [range(P.l[v], P.u[v] + 1) for v in free]
        base = dict(chi)
        for vals in itertools.product(*ranges):
            x = base.copy()
            x.update(zip(free, vals))
            if any(au * x[u] + av * x[v] > rhs for u, au, v, av, rhs in rows):
                continue
            d0 = tuple(sum(self.wcols[v][i] * x[v] for v in free) for i in range(k))
            proj = tuple(tuple(x[v] for v in a) for a in kid_adh)
            key = (proj, d0)
            val = sum(P.c[v] * x[v] for v in free)
            if key not in out or val < out[key][0]:
                out[key] = (val, tuple(sorted(x.items())))
        return out

    def _base_case(self, t: int, chi: dict[int, int]):
        P, rd = self.P, self.rd
        bag = sorted(rd.td.bags[t])
        pos = {v: i for i, v in enumerate(bag)}
        charged = rd.local(t)
        rows, rhs = [], []
        for u, au, v, av, r in self._bag_rows[t]:
            row = [0] * len(bag)
            row[pos[u]] = au
            row[pos[v]] = av
            rows.append(row)
            rhs.append(r)
        sub = Problem2Instance(
            ExactMatrix(rows, cols=len(bag)), ExactMatrix.zeros(0, len(bag)), rhs, (),
            [P.c[v] if v in charged else 0 for v in bag],
            [P.l[v] for v in bag], [P.u[v] for v in bag], P.delta)
        fixed = {pos[v]: val for v, val in chi.items()}
        sol = base_case_solve(sub, fixed, oracle=self.oracle)
        if not sol.optimal:
            return None
        return sol.objective, {v: sol.x[pos[v]] for v in bag}

    # -- rooted instances -------------------------------------------------

    def table(self, t: int, chi: tuple) -> dict[tuple, Entry]:
        """``d -> Entry`` for the rooted instance at ``t`` with adhesion values ``chi``."""
        key = (t, chi)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        rd = self.rd
        adh = sorted(rd.adh[t])
        chi_map = dict(zip(adh, chi))
        kids = rd.children[t]
        result: dict[tuple, Entry] = {}
        local = self._local_table(t, chi_map)
        for (proj, d0) in sorted(local):
            val0, x0 = local[(proj, d0)]
            partial = {d0: (val0, ())}
            for c, cchi in zip(kids, proj):
                ctab = self.table(c, cchi)
                nxt: dict = {}
                for dp in sorted(partial):
                    vp, picks = partial[dp]
                    for dc in sorted(ctab):
                        d = tuple(a + b for a, b in zip(dp, dc))
                        v = vp + ctab[dc].value
                        if d not in nxt or v < nxt[d][0]:
                            nxt[d] = (v, picks + (dc,))
                partial = nxt
                if not partial:
                    break
            for d, (v, picks) in partial.items():
                cur = result.get(d)
                if cur is None or v < cur.value:
                    result[d] = Entry(v, x0, picks)
        self.memo[key] = result
        return result

    def solve_root(self, d: tuple) -> int | None:
        e = self.table(self.rd.root, ()).get(tuple(d))
        return None if e is None else e.value

    def reconstruct(self, d: tuple) -> tuple[int, ...]:
        P, rd = self.P, self.rd
        x: dict[int, int] = {}
        stack = [(rd.root, (), tuple(d))]
        wsum = [0] * P.k
        while stack:
            t, chi, dd = stack.pop()
            e = self.memo[(t, chi)][dd]
            for v, val in e.assignment:
                if v in x and x[v] != val:
                    raise AssertionError(f"overlap disagreement at vertex {v}: {x[v]} vs {val}")
                x[v] = val
            for v in rd.local(t):
                for i in range(P.k):
                    wsum[i] += self.wcols[v][i] * x[v]
            amap = dict(e.assignment)
            for c, dc in zip(rd.children[t], e.child_targets):
                cchi = tuple(amap[v] for v in sorted(rd.adh[c]))
                stack.append((c, cchi, dc))
        if len(x) != P.n:
            raise AssertionError("reconstruction left variables unassigned")
        vec = tuple(x[j] for j in range(P.n))
        if tuple(wsum) != P.W.matvec(vec):
            raise AssertionError("per-node extra-row contributions do not sum to Wx")
        if not check_feasible_p2(P, vec):
            raise AssertionError("reconstructed solution is infeasible")
        return vec

    def stats(self) -> dict:
        rd = self.rd
        per_node = []
        for t in range(rd.nodes):
            tabs = [tab for (s, _), tab in self.memo.items() if s == t]
            per_node.append({
                "node": t,
                "label": rd.td.labels[t],
                "type": int(rd.td.types[t]),
                "bag": len(rd.td.bags[t]),
                "adhesion": len(rd.adh[t]),
                "chi_keys": len(tabs),
                "entries": sum(len(tab) for tab in tabs),
            })
        targets = {d for tab in self.memo.values() for d in tab}
        x_sizes = [prod(self.P.u[v] - self.P.l[v] + 1 for v in rd.adh[t]) for t in range(rd.nodes)]
        return {
            "keys": sum(len(tab) for tab in self.memo.values()),
            "chi_keys": len(self.memo),
            "distinct_targets": len(targets),
            "max_assignment_space": max(x_sizes, default=1),
            "target_space": self.target_space(),
            "nodes": per_node,
        }

    def target_space(self) -> int:
        """Number of integer targets in the interval hull of ``Wx`` over the box."""
        P = self.P
        size = 1
        for i in range(P.k):
            lo = sum(min(w * P.l[j], w * P.u[j]) for j, w in enumerate(P.W.row(i)))
            hi = sum(max(w * P.l[j], w * P.u[j]) for j, w in enumerate(P.W.row(i)))
            size *= hi - lo + 1
        return size


@dataclass
class SolverOptions:
    f_bound: str = "nd"
    fallback: str = "auto"
    size_bound: Callable[[int], int] = default_size_bound
    exact_cap: int = 12
    brute_cap: int = 10 ** 7
    audit_delta: bool = False
    threads: int = 1
    oracle: Callable[[Problem2Instance], Solution] | None = None
    keep_dp: bool = False


def instance_graph(P: Problem2Instance) -> tuple[Graph, frozenset]:
    return Graph.from_matrix(P.A), terminals(P.W)


def decorated_parameter(P: Problem2Instance) -> int:
    return 2 * P.k * P.delta + 1


def _fallback(P: Problem2Instance, opts: SolverOptions, reason: str, info: dict) -> Solution:
    info["fallback_reason"] = reason
    if opts.fallback == "off":
        return Solution(Status.INCONCLUSIVE, info=info)
    try:
        sol = brute_force_solve(P, cap=opts.brute_cap)
    except SizeError as exc:
        info["fallback_error"] = str(exc)
        return Solution(Status.INCONCLUSIVE, info=info)
    info["method"] = "brute-force"
    sol.info = info
    return sol


def solve_problem2(P: Problem2Instance, options: SolverOptions | None = None) -> Solution:
    """Solve Problem 2 through decomposition and dynamic programming.

    A decorated-tree witness means the declared ``delta`` is too small for
    this instance; the solver then falls back to brute force when the box is
    small enough (``fallback="auto"``) or reports inconclusive.
    """
    opts = options or SolverOptions()
    info: dict = {"method": "dp"}
    if opts.audit_delta:
        actual = max_abs_subdet(P.A.vstack(P.W))
        info["audited_delta"] = actual
        info["delta_ok"] = actual <= P.delta
        if actual > P.delta:
            log.warning("declared delta %d is below the audited value %d", P.delta, actual)
    if P.n:
        info["proximity_f"] = proximity_bound(P.n, P.delta, opts.f_bound)
    G, R = instance_graph(P)
    r = decorated_parameter(P)
    bound = opts.size_bound(r)
    res = decompose(G, R, r, size_bound=bound, exact_cap=opts.exact_cap)
    if isinstance(res, DecoratedWitness):
        info["witness"] = {"vertices": sorted(res.vertices), "terminal_leaves": sorted(res.terminal_leaves),
                           "r": r, "heuristic": res.heuristic}
        return _fallback(P, opts, "decorated tree found", info)
    if isinstance(res, Inconclusive):
        return _fallback(P, opts, res.reason, info)
    report = validate(res, G, R, DecompBounds.for_r(r, opts.size_bound))
    if not report.ok:
        return _fallback(P, opts, "decomposition failed validation: " + "; ".join(map(str, report.violations[:3])), info)
    rd = build_rooted(res)
    dp = RootedDP(P, rd, oracle=opts.oracle)
    info["decomposition"] = res.stats()
    try:
        val = dp.solve_root(P.d)
    except SizeError as exc:
        return _fallback(P, opts, f"base case too large: {exc}", info)
    info["dp"] = dp.stats()
    if opts.keep_dp:
        info["dp_engine"] = dp
    if val is None:
        return Solution(Status.INFEASIBLE, info=info)
    x = dp.reconstruct(P.d)
    obj = sum(a * v for a, v in zip(P.c, x))
    if obj != val:
        raise AssertionError(f"memoised value {val} differs from objective {obj} of the reconstruction")
    return Solution(Status.OPTIMAL, x, obj, info=info)
