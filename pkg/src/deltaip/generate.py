"""Seeded random instances.  Every generator takes a ``random.Random``."""

from __future__ import annotations

import random

import networkx as nx

from .exactmat import ExactMatrix, max_abs_subdet
from .ipcore import Problem1Instance, Problem2Instance
from .reduction import PokInstance
from .sgraph import SignedGraph, to_incidence

AUDIT_MAX_COLS = 12


def random_signed_graph(rng: random.Random, n: int, m: int, *, simple: bool = False,
                        odd: float = 0.5) -> SignedGraph:
    if n < 2:
        return SignedGraph(n, ())
    edges = []
    seen = set()
    tries = 0
    while len(edges) < m and tries < 50 * (m + 1):
        tries += 1
        u, v = rng.sample(range(n), 2)
        s = -1 if rng.random() < odd else 1
        key = (min(u, v), max(u, v)) if simple else (min(u, v), max(u, v), s)
        if key in seen:
            continue
        seen.add(key)
        edges.append((u, v, s))
    return SignedGraph(n, tuple(edges))


def random_tree(rng: random.Random, n: int, *, odd: float = 0.5) -> SignedGraph:
    perm = list(range(n))
    rng.shuffle(perm)
    edges = []
    for i in range(1, n):
        j = rng.randrange(i)
        edges.append((perm[i], perm[j], -1 if rng.random() < odd else 1))
    return SignedGraph(n, tuple(edges))


def signed_incidence(rng: random.Random, S: SignedGraph) -> ExactMatrix:
    """Incidence matrix with every row multiplied by a random sign."""
    rows = []
    for r in to_incidence(S):
        s = rng.choice((-1, 1))
        rows.append([s * v for v in r])
    return ExactMatrix(rows, cols=S.n)


def _audit(M: ExactMatrix) -> int:
    if min(M.rows, M.cols) > AUDIT_MAX_COLS:
        raise ValueError(f"matrix {M.shape} is too large for an exact audit")
    return max(1, max_abs_subdet(M))


def random_p2(rng: random.Random, n: int, m: int, k: int, *, box: int = 3, wmax: int = 3,
              max_terminals: int = 3, cmax: int = 5, feasible: bool = True,
              box_points: int | None = None) -> Problem2Instance:
    """Random Problem 2 instance; feasible by construction unless asked otherwise.

    ``box_points`` caps the number of integer points in the variable box by
    shrinking random coordinates.
    """
    S = random_signed_graph(rng, n, m)
    A = signed_incidence(rng, S)
    l = [rng.randint(-box, 0) for _ in range(n)]
    u = [rng.randint(0, box) for _ in range(n)]
    if box_points is not None:
        def size():
            p = 1
            for a, b in zip(l, u):
                p *= b - a + 1
            return p
        while size() > box_points:
            j = rng.randrange(n)
            if u[j] > l[j]:
                if rng.random() < 0.5 and u[j] > 0:
                    u[j] -= 1
                elif l[j] < 0:
                    l[j] += 1
                else:
                    u[j] -= 1
    x0 = [rng.randint(a, b) for a, b in zip(l, u)]
    b = [lhs + rng.choice((0, 0, 1, 2)) for lhs in A.matvec(x0)]
    term = rng.sample(range(n), min(n, rng.randint(1, max_terminals))) if k and n else []
    W = []
    for _ in range(k):
        row = [0] * n
        for j in term:
            row[j] = rng.randint(-wmax, wmax)
        W.append(row)
    W = ExactMatrix(W, cols=n)
    d = list(W.matvec(x0))
    if not feasible and k:
        d[0] += rng.choice((-1, 1)) * rng.randint(1, 3)
    c = [rng.randint(-cmax, cmax) for _ in range(n)]
    delta = _audit(A.vstack(W))
    return Problem2Instance(A, W, b, d, c, l, u, delta)


def random_p1(rng: random.Random, n1: int, n2: int, m1: int, m2: int, *, bound: int = 2,
              entry: int = 2, feasible: bool | None = True) -> Problem1Instance:
    """Random Problem 1 instance with explicit bound rows on every variable.

    The bound rows make the integer feasible region a known box, which lets a
    direct enumeration serve as an independent oracle.
    """
    n = n1 + n2
    lo = [rng.randint(-bound, 0) for _ in range(n)]
    hi = [rng.randint(0, bound) for _ in range(n)]
    x0 = [rng.randint(a, b) for a, b in zip(lo, hi)]
    top = []
    for _ in range(m1):
        a = [0] * n1
        if n1 >= 2 and rng.random() < 0.8:
            u, v = rng.sample(range(n1), 2)
            g = rng.choice((1, 1, 2))
            a[u], a[v] = g * rng.choice((-1, 1)), g * rng.choice((-1, 1))
        elif n1:
            a[rng.randrange(n1)] = rng.choice((-2, -1, 1, 2))
        bpart = [rng.randint(-entry, entry) if rng.random() < 0.4 else 0 for _ in range(n2)]
        top.append(a + bpart)
    for j in range(n):
        e = [0] * n
        e[j] = 1
        top.append(e)
        top.append([-v for v in e])
    bottom = [[rng.randint(-entry, entry) for _ in range(n)] for _ in range(m2)]
    M = ExactMatrix(top + bottom, cols=n)
    rhs = []
    lhs = M.matvec(x0)
    for i, v in enumerate(lhs):
        if m1 <= i < m1 + 2 * n:
            j, neg = divmod(i - m1, 2)
            rhs.append(-lo[j] if neg else hi[j])
        else:
            rhs.append(v + rng.choice((0, 0, 1, 2)))
    if feasible is False:
        i = rng.randrange(len(rhs))
        rhs[i] -= rng.randint(1, 4)
    A = M.submatrix(range(m1 + 2 * n), range(n1))
    B = M.submatrix(range(m1 + 2 * n), range(n1, n))
    C = M.submatrix(range(m1 + 2 * n, M.rows), range(n1))
    D = M.submatrix(range(m1 + 2 * n, M.rows), range(n1, n))
    c = [rng.randint(-5, 5) for _ in range(n)]
    delta = _audit(M)
    return Problem1Instance(A, B, C, D, rhs, c, delta, max(m2, n2, 1))


def random_pok(rng: random.Random, n: int, k: int, *, density: float = 0.3,
               pmax: int = 10, wmax: int = 5) -> PokInstance:
    order = list(range(n))
    rng.shuffle(order)
    D = nx.DiGraph()
    D.add_nodes_from(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                D.add_edge(order[i], order[j])
    covers = tuple(sorted(nx.transitive_reduction(D).edges()))
    profit = tuple(rng.randint(0, pmax) for _ in range(n))
    weights = tuple(tuple(rng.randint(0, wmax) for _ in range(n)) for _ in range(k))
    budgets = tuple(rng.randint(0, max(1, sum(ws) // 2)) for ws in weights)
    return PokInstance(n, covers, profit, weights, budgets)
