"""From Problem 1 to Problem 2, and the partially ordered knapsack front end.

Pipeline: solve the LP relaxation exactly, shift by the floor of its optimum
so every relevant integer optimum sits in ``[-f, f]^n``, enumerate the few
extra columns, and turn the few extra rows into equalities with slack
columns.  Each guess yields one Problem 2 instance.
"""

from __future__ import annotations

import graphlib
import itertools
from dataclasses import dataclass, field
from math import floor, prod
from typing import Iterator, Sequence

from .dpengine import SolverOptions, solve_problem2
from .exactmat import ExactMatrix, gcd_normalize_row
from .ipcore import (InstanceError, Problem1Instance, Problem2Instance, Solution, Status,
                     lp_solve, proximity_bound)


class UnsupportedInstance(ValueError):
    """A row with two non-zeros that does not collapse to ``{0, +-1}``."""


# --------------------------------------------------------------------------
# recentering
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Recentered:
    problem: Problem1Instance
    offset: tuple[int, ...]
    objective_shift: int
    lo: tuple[int, ...]
    hi: tuple[int, ...]
    f: int


def recenter(P: Problem1Instance, xstar: Sequence, f: int | None = None, mode: str = "nd") -> Recentered:
    """Shift ``x -> x - floor(x*)`` and attach the box ``[-f, f]^n``."""
    if len(xstar) != P.n:
        raise InstanceError("x* has the wrong length")
    if f is None:
        f = proximity_bound(P.n, P.delta, mode)
    off = tuple(floor(v) for v in xstar)
    Moff = P.M.matvec(off)
    b = tuple(bi - mi for bi, mi in zip(P.b, Moff))
    shifted = Problem1Instance(P.A, P.B, P.C, P.D, b, P.c, P.delta, P.k)
    shift = sum(ci * oi for ci, oi in zip(P.c, off))
    return Recentered(shifted, off, shift, (-f,) * P.n, (f,) * P.n, f)


def _tighten(row: Sequence[int], rhs: int, j: int, lo: list, hi: list):
    a = row[j]
    if a > 0:
        hi[j] = min(hi[j], rhs // a)
    else:
        lo[j] = max(lo[j], -(rhs // -a))


def presolve_box(M: ExactMatrix, b: Sequence[int], lo: Sequence[int], hi: Sequence[int]) -> tuple[list, list]:
    """Intersect the box with every single-variable row of ``M x <= b``."""
    lo, hi = list(lo), list(hi)
    for row, rhs in zip(M, b):
        nz = [j for j, v in enumerate(row) if v]
        if len(nz) == 1:
            _tighten(row, rhs, nz[0], lo, hi)
    return lo, hi


# --------------------------------------------------------------------------
# guessing the extra columns
# --------------------------------------------------------------------------

class GuessIterator:
    """Every integer point of a box over the extra columns, in lexicographic order."""

    def __init__(self, columns: Sequence[int], lo: Sequence[int], hi: Sequence[int]):
        self.columns = tuple(columns)
        self.lo = tuple(lo)
        self.hi = tuple(hi)

    def __len__(self):
        return prod(max(0, h - l + 1) for l, h in zip(self.lo, self.hi))

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(l, h + 1) for l, h in zip(self.lo, self.hi)))


@dataclass
class GuessedInstance:
    guess: tuple[int, ...]
    p2: Problem2Instance | None
    slack_count: int
    note: str = ""


def _dot(a, x):
    return sum(p * q for p, q in zip(a, x))


def split_and_guess(rec: Recentered) -> Iterator[GuessedInstance]:
    """One Problem 2 instance per assignment of the extra columns.

    A guess that is infeasible for trivial reasons (violated constant row,
    empty box, negative slack range) yields ``p2=None``.
    """
    P = rec.problem
    n1, n2, m1, m2 = P.n1, P.n2, P.m1, P.m2
    lo, hi = presolve_box(P.M, P.b, rec.lo, rec.hi)
    if any(l > h for l, h in zip(lo, hi)):
        return
    guesses = GuessIterator(range(n1, n1 + n2), lo[n1:], hi[n1:])
    for g in guesses:
        yield _one_guess(P, g, lo[:n1], hi[:n1])


def _one_guess(P: Problem1Instance, g: tuple, lo: list, hi: list) -> GuessedInstance:
    n1, m2 = P.n1, P.m2
    lo, hi = list(lo), list(hi)
    rows, rhs = [], []
    for i in range(P.m1):
        a = P.A.row(i)
        r = P.b[i] - _dot(P.B.row(i), g)
        nz = [j for j, v in enumerate(a) if v]
        if not nz:
            if r < 0:
                return GuessedInstance(g, None, m2, f"constant row {i} violated")
        elif len(nz) == 1:
            _tighten(a, r, nz[0], lo, hi)
        else:
            na, nr = gcd_normalize_row(a, r)
            if any(v not in (0, 1, -1) for v in na):
                raise UnsupportedInstance(
                    f"row {i} = {list(a)} has two non-zeros that do not reduce to +-1; "
                    "general two-entry rows need a further reduction that is out of scope")
            rows.append(list(na))
            rhs.append(nr)
    if any(l > h for l, h in zip(lo, hi)):
        return GuessedInstance(g, None, m2, "empty box after tightening")
    W, d, slack_hi = [], [], []
    for i in range(m2):
        cr = P.C.row(i)
        r = P.b[P.m1 + i] - _dot(P.D.row(i), g)
        low = sum(min(v * l, v * h) for v, l, h in zip(cr, lo, hi))
        if r - low < 0:
            return GuessedInstance(g, None, m2, f"extra row {i} unreachable")
        W.append(list(cr) + [int(i == j) for j in range(m2)])
        d.append(r)
        slack_hi.append(r - low)
    n = n1 + m2
    A = ExactMatrix([row + [0] * m2 for row in rows], cols=n)
    p2 = Problem2Instance(A, ExactMatrix(W, cols=n), rhs, d,
                          list(P.c[:n1]) + [0] * m2, lo + [0] * m2, hi + slack_hi, P.delta)
    return GuessedInstance(g, p2, m2)


# --------------------------------------------------------------------------
# Problem 1
# --------------------------------------------------------------------------

def check_feasible_p1(P: Problem1Instance, x: Sequence[int]) -> bool:
    return all(l <= r for l, r in zip(P.M.matvec(x), P.b))


def solve_problem1(P: Problem1Instance, options: SolverOptions | None = None) -> Solution:
    opts = options or SolverOptions()
    M = P.M
    lp = lp_solve(M, P.b, P.c)
    info: dict = {"lp_status": str(lp.status)}
    if lp.status == Status.INFEASIBLE:
        return Solution(Status.INFEASIBLE, info=info)
    if lp.status == Status.UNBOUNDED:
        info["note"] = "LP relaxation unbounded; integer search not attempted"
        return Solution(Status.UNBOUNDED, info=info)
    info["lp_objective"] = str(lp.objective)
    info["lp_vertex"] = lp.vertex
    rec = recenter(P, lp.x, mode=opts.f_bound)
    info["f"] = rec.f
    best = None
    guesses = inconclusive = 0
    for gi in split_and_guess(rec):
        guesses += 1
        if gi.p2 is None:
            continue
        sol = solve_problem2(gi.p2, opts)
        if sol.status == Status.INCONCLUSIVE:
            inconclusive += 1
            continue
        if not sol.optimal:
            continue
        y = tuple(sol.x[: P.n1]) + tuple(gi.guess)
        x = tuple(a + b for a, b in zip(y, rec.offset))
        obj = _dot(P.c, x)
        if best is None or (obj, x) < (best[0], best[1]):
            best = (obj, x)
    info["guesses"] = guesses
    if inconclusive:
        info["inconclusive_guesses"] = inconclusive
        return Solution(Status.INCONCLUSIVE, best[1] if best else None, best[0] if best else None, info=info)
    if best is None:
        return Solution(Status.INFEASIBLE, info=info)
    if not check_feasible_p1(P, best[1]):
        raise AssertionError("assembled solution violates the original constraints")
    return Solution(Status.OPTIMAL, best[1], best[0], info=info)


# --------------------------------------------------------------------------
# partially ordered knapsack
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PokInstance:
    """Choose a down-closed set of elements maximising profit within budgets.

    ``covers`` holds pairs ``(u, v)`` meaning ``u`` precedes ``v``: taking
    ``v`` requires taking ``u``.
    """

    n: int
    covers: tuple[tuple[int, int], ...]
    profit: tuple[int, ...]
    weights: tuple[tuple[int, ...], ...]
    budgets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "covers", tuple((int(u), int(v)) for u, v in self.covers))
        object.__setattr__(self, "profit", tuple(int(p) for p in self.profit))
        object.__setattr__(self, "weights", tuple(tuple(int(w) for w in ws) for ws in self.weights))
        object.__setattr__(self, "budgets", tuple(int(b) for b in self.budgets))
        if len(self.profit) != self.n or any(len(ws) != self.n for ws in self.weights):
            raise InstanceError("profit and weight vectors must have one entry per element")
        if len(self.budgets) != len(self.weights):
            raise InstanceError("one budget per weight function")
        for u, v in self.covers:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise InstanceError(f"bad precedence pair ({u}, {v})")
        ts = graphlib.TopologicalSorter({v: set() for v in range(self.n)})
        for u, v in self.covers:
            ts.add(v, u)
        try:
            tuple(ts.static_order())
        except graphlib.CycleError as exc:
            raise InstanceError(f"precedence relation has a cycle: {exc.args[1]}") from None

    @property
    def k(self) -> int:
        return len(self.weights)

    def is_down_closed(self, chosen) -> bool:
        s = set(chosen)
        return all(u in s for u, v in self.covers if v in s)


def pok_delta(K: PokInstance) -> int:
    """Largest ``|total weight|`` of a connected element set, over all weight functions."""
    adj = [set() for _ in range(K.n)]
    for u, v in K.covers:
        adj[u].add(v)
        adj[v].add(u)
    best = 0

    # each connected set is grown once from its least element
    def grow(sub: frozenset, ext: frozenset, root: int):
        nonlocal best
        for ws in K.weights:
            best = max(best, abs(sum(ws[v] for v in sub)))
        ext = set(ext)
        while ext:
            w = min(ext)
            ext.discard(w)
            new_ext = ext | {x for x in adj[w] if x > root and x not in sub and not _touches(x, sub, adj)}
            grow(sub | {w}, frozenset(new_ext), root)

    for v in range(K.n):
        grow(frozenset([v]), frozenset(x for x in adj[v] if x > v), v)
    return best


def _touches(x, sub, adj) -> bool:
    return bool(adj[x] & sub)


def pok_to_ip(K: PokInstance, delta: int | None = None) -> Problem1Instance:
    """Binary IP: cover rows ``x_v - x_u <= 0``, box rows, budgets as extra rows."""
    rows, rhs = [], []
    for u, v in K.covers:
        r = [0] * K.n
        r[v], r[u] = 1, -1
        rows.append(r)
        rhs.append(0)
    for j in range(K.n):
        r = [0] * K.n
        r[j] = 1
        rows.append(r)
        rhs.append(1)
        rows.append([-x for x in r])
        rhs.append(0)
    A = ExactMatrix(rows, cols=K.n)
    C = ExactMatrix([list(ws) for ws in K.weights], cols=K.n)
    if delta is None:
        delta = max(1, pok_delta(K))
    return Problem1Instance(A, ExactMatrix.zeros(A.rows, 0), C, ExactMatrix.zeros(C.rows, 0),
                            rhs + list(K.budgets), [-p for p in K.profit], delta, K.k)


@dataclass
class PokResult:
    status: Status
    profit: int | None
    chosen: tuple[int, ...] = ()
    info: dict = field(default_factory=dict)


def solve_pok(K: PokInstance, options: SolverOptions | None = None) -> PokResult:
    sol = solve_problem1(pok_to_ip(K), options)
    if not sol.optimal:
        return PokResult(sol.status, None, info=sol.info)
    chosen = tuple(j for j, v in enumerate(sol.x) if v)
    if not K.is_down_closed(chosen):
        raise AssertionError("solution is not down-closed")
    return PokResult(Status.OPTIMAL, -sol.objective, chosen, sol.info)


def pok_brute_force(K: PokInstance) -> tuple[int, tuple[int, ...]] | None:
    """Best down-closed feasible set by enumerating all subsets."""
    best = None
    for mask in range(1 << K.n):
        chosen = tuple(j for j in range(K.n) if mask >> j & 1)
        if not K.is_down_closed(chosen):
            continue
        if any(sum(ws[j] for j in chosen) > b for ws, b in zip(K.weights, K.budgets)):
            continue
        p = sum(K.profit[j] for j in chosen)
        if best is None or p > best[0]:
            best = (p, chosen)
    return best
