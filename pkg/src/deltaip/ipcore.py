"""Instance models, brute-force oracles and an exact rational LP solver."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Callable, Mapping, Sequence

import numpy as np

from .exactmat import DimensionError, ExactMatrix, as_matrix, nullspace, rank


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    INCONCLUSIVE = "inconclusive"

    def __str__(self):
        return self.value


class InstanceError(ValueError):
    pass


class SizeError(RuntimeError):
    pass


def _ints(v, name) -> tuple[int, ...]:
    try:
        return tuple(int(x) if not isinstance(x, float) else _reject(name) for x in v)
    except TypeError as exc:
        raise InstanceError(f"{name}: {exc}") from None


def _reject(name):
    raise InstanceError(f"{name}: floats are not allowed")


@dataclass(frozen=True)
class Problem2Instance:
    """``min c.x  s.t.  Ax <= b, Wx = d, l <= x <= u, x integer``.

    ``A`` is a signed incidence matrix (two entries of +-1 per row).
    """

    A: ExactMatrix
    W: ExactMatrix
    b: tuple
    d: tuple
    c: tuple
    l: tuple
    u: tuple
    delta: int = 1

    def __post_init__(self):
        A, W = as_matrix(self.A), as_matrix(self.W)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "W", W)
        for name in ("b", "d", "c", "l", "u"):
            object.__setattr__(self, name, _ints(getattr(self, name), name))
        n = len(self.c)
        if A.cols != n or W.cols != n or len(self.l) != n or len(self.u) != n:
            raise InstanceError(f"column counts disagree: A {A.cols}, W {W.cols}, c {n}, l {len(self.l)}, u {len(self.u)}")
        if len(self.b) != A.rows:
            raise InstanceError(f"b has length {len(self.b)}, A has {A.rows} rows")
        if len(self.d) != W.rows:
            raise InstanceError(f"d has length {len(self.d)}, W has {W.rows} rows")
        for i, row in enumerate(A):
            nz = [v for v in row if v]
            if len(nz) != 2 or any(v not in (-1, 1) for v in nz):
                raise InstanceError(f"A row {i} must have exactly two non-zeros in {{-1,+1}}")
        for j, (lo, hi) in enumerate(zip(self.l, self.u)):
            if lo > hi:
                raise InstanceError(f"empty box at variable {j}: l={lo} > u={hi}")
        if self.delta < 1:
            raise InstanceError("delta must be a positive integer")

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return self.A.rows

    @property
    def k(self) -> int:
        return self.W.rows

    def rows(self) -> list[tuple[int, int, int, int, int]]:
        """A-rows as ``(u, a_u, v, a_v, rhs)`` with ``u < v``."""
        out = []
        for row, rhs in zip(self.A, self.b):
            (u, a), (v, bb) = [(j, x) for j, x in enumerate(row) if x]
            out.append((u, a, v, bb, rhs))
        return out


@dataclass(frozen=True)
class Problem1Instance:
    """``min c.x  s.t.  [[A, B], [C, D]] x <= b, x integer``.

    ``A`` has at most two non-zeros per row; ``C``/``D`` are the extra rows and
    ``B``/``D`` the extra columns, at most ``k`` of each.
    """

    A: ExactMatrix
    B: ExactMatrix
    C: ExactMatrix
    D: ExactMatrix
    b: tuple
    c: tuple
    delta: int = 1
    k: int = 0

    def __post_init__(self):
        for name in "ABCD":
            object.__setattr__(self, name, as_matrix(getattr(self, name)))
        object.__setattr__(self, "b", _ints(self.b, "b"))
        object.__setattr__(self, "c", _ints(self.c, "c"))
        A, B, C, D = self.A, self.B, self.C, self.D
        if B.rows != A.rows or C.cols != A.cols or D.rows != C.rows or D.cols != B.cols:
            raise InstanceError(f"block shapes inconsistent: A{A.shape} B{B.shape} C{C.shape} D{D.shape}")
        if len(self.b) != A.rows + C.rows:
            raise InstanceError("b length must equal m1 + m2")
        if len(self.c) != A.cols + B.cols:
            raise InstanceError("c length must equal n1 + n2")
        if C.rows > self.k or B.cols > self.k:
            raise InstanceError(f"extra rows/columns ({C.rows}, {B.cols}) exceed k={self.k}")
        for i, row in enumerate(A):
            if sum(1 for v in row if v) > 2:
                raise InstanceError(f"A row {i} has more than two non-zeros")
        if self.delta < 1:
            raise InstanceError("delta must be a positive integer")

    @property
    def n1(self):
        return self.A.cols

    @property
    def n2(self):
        return self.B.cols

    @property
    def m1(self):
        return self.A.rows

    @property
    def m2(self):
        return self.C.rows

    @property
    def n(self):
        return self.n1 + self.n2

    @property
    def M(self) -> ExactMatrix:
        return self.A.hstack(self.B).vstack(self.C.hstack(self.D))


@dataclass
class Solution:
    status: Status
    x: tuple | None = None
    objective: int | None = None
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.status = Status(self.status)
        if self.x is not None:
            self.x = tuple(self.x)

    @property
    def optimal(self) -> bool:
        return self.status == Status.OPTIMAL


# --------------------------------------------------------------------------
# feasibility and brute force
# --------------------------------------------------------------------------

def check_feasible_p2(P: Problem2Instance, x: Sequence[int]) -> bool:
    if len(x) != P.n:
        raise DimensionError(f"x has length {len(x)}, instance has {P.n} variables")
    if any(not (lo <= v <= hi) for v, lo, hi in zip(x, P.l, P.u)):
        return False
    if any(lhs > rhs for lhs, rhs in zip(P.A.matvec(x), P.b)):
        return False
    return P.W.matvec(x) == P.d


_CHUNK = 1 << 16


def _fits_int64(lo, hi, mats) -> bool:
    big = max([abs(v) for v in lo] + [abs(v) for v in hi] + [1])
    for M, rhs in mats:
        rowsum = max((sum(abs(a) for a in r) for r in M), default=0)
        if rowsum * big >= 1 << 60 or any(abs(v) >= 1 << 60 for v in rhs):
            return False
    return True


def box_optimum(lo: Sequence[int], hi: Sequence[int], c: Sequence[int],
                ineq: tuple = ((), ()), eq: tuple = ((), ()),
                cap: int = 10 ** 7) -> tuple[int, tuple] | None:
    """Exhaustive minimum of ``c.x`` over the integer box subject to
    ``G x <= h`` and ``E x = f``.

    Points are scanned in lexicographic order so ties go to the
    lexicographically smallest ``x``.  Returns ``(objective, x)`` or ``None``.
    """
    n = len(c)
    G, h = [list(r) for r in ineq[0]], list(ineq[1])
    E, f = [list(r) for r in eq[0]], list(eq[1])
    sizes = [hi_ - lo_ + 1 for lo_, hi_ in zip(lo, hi)]
    if any(s <= 0 for s in sizes):
        return None
    total = prod(sizes)
    if total > cap:
        raise SizeError(f"box has {total} points, cap is {cap}")
    if n == 0:
        ok = all(v >= 0 for v in h) and all(v == 0 for v in f)
        return (0, ()) if ok else None
    if not _fits_int64(lo, hi, [(G, h), (E, f), ([list(c)], [0])]):
        return _box_optimum_py(lo, hi, c, G, h, E, f)
    lo_a = np.array(lo, dtype=np.int64)
    size_a = np.array(sizes, dtype=np.int64)
    strides = np.array([prod(sizes[j + 1:]) for j in range(n)], dtype=np.int64)
    Ga = np.array(G, dtype=np.int64).reshape(len(G), n)
    ha = np.array(h, dtype=np.int64)
    Ea = np.array(E, dtype=np.int64).reshape(len(E), n)
    fa = np.array(f, dtype=np.int64)
    ca = np.array(c, dtype=np.int64)
    best = None
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        X = lo_a + (idx[:, None] // strides) % size_a
        ok = np.ones(len(idx), dtype=bool)
        if len(G):
            ok &= np.all(X @ Ga.T <= ha, axis=1)
        if len(E):
            ok &= np.all(X @ Ea.T == fa, axis=1)
        if not ok.any():
            continue
        obj = X @ ca
        cand = np.flatnonzero(ok)
        i = cand[np.argmin(obj[cand])]
        val = int(obj[i])
        if best is None or val < best[0]:
            best = (val, tuple(int(v) for v in X[i]))
    return best


def _box_optimum_py(lo, hi, c, G, h, E, f):
    best = None
    for x in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if any(sum(a * v for a, v in zip(r, x)) > rhs for r, rhs in zip(G, h)):
            continue
        if any(sum(a * v for a, v in zip(r, x)) != rhs for r, rhs in zip(E, f)):
            continue
        val = sum(a * v for a, v in zip(c, x))
        if best is None or val < best[0]:
            best = (val, x)
    return best


def brute_force_solve(P: Problem2Instance, cap: int = 10 ** 7) -> Solution:
    """Exact optimum by exhaustive enumeration of the box."""
    if any(lo > hi for lo, hi in zip(P.l, P.u)):
        return Solution(Status.INFEASIBLE)
    res = box_optimum(P.l, P.u, P.c, (P.A, P.b), (P.W, P.d), cap=cap)
    if res is None:
        return Solution(Status.INFEASIBLE)
    return Solution(Status.OPTIMAL, res[1], res[0])


# --------------------------------------------------------------------------
# exact LP
# --------------------------------------------------------------------------

@dataclass
class LPResult:
    status: Status
    x: tuple | None = None
    objective: Fraction | None = None
    vertex: bool = False


def _simplex(T: list[list[Fraction]], basis: list[int], ncols: int, allowed: Callable[[int], bool]) -> bool:
    """Bland's-rule simplex on a tableau whose last row is the reduced
    objective and last column the rhs.  Returns False when unbounded."""
    m = len(T) - 1
    while True:
        obj = T[m]
        enter = next((j for j in range(ncols) if allowed(j) and obj[j] < 0), None)
        if enter is None:
            return True
        leave = None
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return False
        _pivot(T, leave, enter)
        basis[leave] = enter


def _pivot(T, r, c):
    pv = T[r][c]
    T[r] = [v / pv for v in T[r]]
    for i in range(len(T)):
        if i != r and T[i][c] != 0:
            f = T[i][c]
            T[i] = [a - f * b for a, b in zip(T[i], T[r])]


def lp_solve(A, b: Sequence, c: Sequence, senses: Sequence[str] | None = None) -> LPResult:
    """Minimise ``c.x`` over ``{x : A_i x (<=|>=|=) b_i}`` with free variables.

    Two-phase simplex in exact rationals with Bland's rule.  The optimum is
    pushed to a vertex of the polyhedron when the polyhedron has one
    (full column rank); ``vertex`` reports whether that happened.
    """
    A = as_matrix(A)
    m, n = A.rows, A.cols
    senses = list(senses) if senses is not None else ["<="] * m
    if len(b) != m or len(c) != n or len(senses) != m:
        raise DimensionError("lp_solve: inconsistent dimensions")
    b = [Fraction(v) for v in b]
    c = [Fraction(v) for v in c]
    # standard form columns: x+ (n), x- (n), slacks (one per inequality)
    ineq = [i for i in range(m) if senses[i] != "="]
    slack_col = {i: 2 * n + k for k, i in enumerate(ineq)}
    nstd = 2 * n + len(ineq)
    rows = []
    for i in range(m):
        r = [Fraction(v) for v in A.row(i)] + [-Fraction(v) for v in A.row(i)] + [Fraction(0)] * len(ineq)
        if senses[i] == "<=":
            r[slack_col[i]] = Fraction(1)
        elif senses[i] == ">=":
            r[slack_col[i]] = Fraction(-1)
        elif senses[i] != "=":
            raise ValueError(f"unknown sense {senses[i]!r}")
        rhs = b[i]
        if rhs < 0:
            r = [-v for v in r]
            rhs = -rhs
        rows.append(r + [rhs])
    # phase 1 with artificials
    ncols = nstd + m
    T = [r[:-1] + [Fraction(int(i == k)) for k in range(m)] + [r[-1]] for i, r in enumerate(rows)]
    obj = [Fraction(0)] * (ncols + 1)
    for i in range(m):
        for j in range(nstd):
            obj[j] -= T[i][j]
        obj[-1] -= T[i][-1]
    T.append(obj)
    basis = [nstd + i for i in range(m)]
    _simplex(T, basis, ncols, lambda j: True)
    if T[m][-1] != 0:
        return LPResult(Status.INFEASIBLE)
    # drive artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(basis):
        if basis[i] >= nstd:
            j = next((j for j in range(nstd) if T[i][j] != 0), None)
            if j is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, i, j)
            basis[i] = j
        i += 1
    # phase 2
    mm = len(basis)
    cost = c + [-v for v in c] + [Fraction(0)] * len(ineq)
    obj = cost + [Fraction(0)] * m + [Fraction(0)]
    for i in range(mm):
        cb = cost[basis[i]]
        if cb:
            obj = [a - cb * t for a, t in zip(obj, T[i])]
    T[mm] = obj
    T = T[: mm + 1]
    if not _simplex(T, basis, ncols, lambda j: j < nstd):
        return LPResult(Status.UNBOUNDED)
    y = [Fraction(0)] * nstd
    for i, j in enumerate(basis):
        y[j] = T[i][-1]
    x = [y[j] - y[n + j] for j in range(n)]
    x, is_vertex = _to_vertex(A, b, senses, c, x)
    return LPResult(Status.OPTIMAL, tuple(x), sum(ci * xi for ci, xi in zip(c, x)), is_vertex)


def _to_vertex(A: ExactMatrix, b, senses, c, x):
    """Slide an optimal point along the optimal face until it is a vertex."""
    n = A.cols
    if rank([A.row(i) for i in range(A.rows)], n) < n:
        return x, False
    # every row as (a, rhs, is_equality) in <= orientation
    rows = []
    for i in range(A.rows):
        a = [Fraction(v) for v in A.row(i)]
        if senses[i] == ">=":
            rows.append(([-v for v in a], -b[i], False))
        else:
            rows.append((a, b[i], senses[i] == "="))
    dot = lambda p, q: sum(s * t for s, t in zip(p, q))
    while True:
        tight = [a for a, rhs, eq in rows if eq or dot(a, x) == rhs]
        ns = nullspace(tight, n) if tight else [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        if not ns:
            return x, True
        y = ns[0]
        if dot(c, y) != 0:
            # cannot happen at an optimum; keep the point rather than guess
            return x, False
        if not any(dot(a, y) > 0 for a, rhs, eq in rows):
            y = [-v for v in y]
        step = min((rhs - dot(a, x)) / dot(a, y) for a, rhs, eq in rows if dot(a, y) > 0)
        x = [xi + step * yi for xi, yi in zip(x, y)]


def p2_relaxation(P: Problem2Instance):
    """Constraint system ``(M, rhs, senses)`` of the LP relaxation of ``P``."""
    rows, rhs, senses = [], [], []
    for r, v in zip(P.A, P.b):
        rows.append(list(r)); rhs.append(v); senses.append("<=")
    for r, v in zip(P.W, P.d):
        rows.append(list(r)); rhs.append(v); senses.append("=")
    for j in range(P.n):
        e = [0] * P.n
        e[j] = 1
        rows.append(e); rhs.append(P.u[j]); senses.append("<=")
        rows.append(list(e)); rhs.append(P.l[j]); senses.append(">=")
    return ExactMatrix(rows, cols=P.n), rhs, senses


def proximity_bound(n: int, delta: int, mode: str = "nd") -> int:
    """Distance bound between an LP optimum and some integer optimum.

    ``"nd"`` gives ``n * delta``; ``"sharp"`` gives the largest integer
    strictly below ``(4n + 2) * delta / 9``, but at least 1.
    """
    if n < 1 or delta < 1:
        raise ValueError("proximity_bound needs n >= 1 and delta >= 1")
    if mode == "nd":
        return n * delta
    if mode == "sharp":
        return max(1, ((4 * n + 2) * delta - 1) // 9)
    raise ValueError(f"unknown proximity mode {mode!r}")


# --------------------------------------------------------------------------
# base case: no extra rows
# --------------------------------------------------------------------------

BaseCaseOracle = Callable[[Problem2Instance], Solution]


def base_case_solve(P: Problem2Instance, fixed: Mapping[int, int] | None = None,
                    oracle: BaseCaseOracle | None = None) -> Solution:
    """Solve a Problem 2 instance without extra rows, some variables fixed.

    Fixed variables are substituted; rows left with one free variable become
    bounds and the residual two-non-zero IP goes to ``oracle`` (brute force by
    default).  Any exact solver for that class can be plugged in.
    """
    fixed = dict(fixed or {})
    if any(any(r) for r in P.W):
        raise InstanceError("base_case_solve expects no extra rows")
    if oracle is None:
        oracle = brute_force_solve
    for v, val in fixed.items():
        if not (P.l[v] <= val <= P.u[v]):
            return Solution(Status.INFEASIBLE)
    free = [j for j in range(P.n) if j not in fixed]
    pos = {j: i for i, j in enumerate(free)}
    lo = [P.l[j] for j in free]
    hi = [P.u[j] for j in free]
    rows, rhs = [], []
    for u, au, v, av, r in P.rows():
        if u in fixed and v in fixed:
            if au * fixed[u] + av * fixed[v] > r:
                return Solution(Status.INFEASIBLE)
        elif u in fixed or v in fixed:
            (f, af), (g, ag) = ((u, au), (v, av)) if u in fixed else ((v, av), (u, au))
            bound = r - af * fixed[f]
            if ag == 1:
                hi[pos[g]] = min(hi[pos[g]], bound)
            else:
                lo[pos[g]] = max(lo[pos[g]], -bound)
        else:
            row = [0] * len(free)
            row[pos[u]] = au
            row[pos[v]] = av
            rows.append(row)
            rhs.append(r)
    if any(a > b for a, b in zip(lo, hi)):
        return Solution(Status.INFEASIBLE)
    sub = Problem2Instance(ExactMatrix(rows, cols=len(free)), ExactMatrix.zeros(0, len(free)), rhs, (),
                           [P.c[j] for j in free], lo, hi, P.delta)
    sol = oracle(sub)
    if not sol.optimal:
        return Solution(sol.status)
    x = [0] * P.n
    for j, val in fixed.items():
        x[j] = val
    for j, val in zip(free, sol.x):
        x[j] = val
    return Solution(Status.OPTIMAL, tuple(x), sum(a * v for a, v in zip(P.c, x)))
