"""Signed graphs and the incidence-matrix correspondence.

An edge ``(u, v, s)`` is even for ``s = +1`` and odd for ``s = -1``.  A
``{0, +-1}`` matrix with two non-zeros per row is the incidence matrix of a
unique signed graph: the row of edge ``e = uv`` satisfies
``A[e, u] * A[e, v] == -sign(e)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .exactmat import ExactMatrix, as_matrix


class MalformedIncidenceError(ValueError):
    pass


@dataclass(frozen=True)
class SignedGraph:
    n: int
    edges: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        edges = tuple((int(u), int(v), int(s)) for u, v, s in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.n < 0:
            raise ValueError("negative vertex count")
        for i, (u, v, s) in enumerate(edges):
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {i} has endpoint outside 0..{self.n - 1}")
            if u == v:
                raise ValueError(f"edge {i} is a self-loop")
            if s not in (-1, 1):
                raise ValueError(f"edge {i} has sign {s}")

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def incident(self) -> list[list[tuple[int, int, int]]]:
        """Per vertex: list of ``(edge id, neighbour, sign)``."""
        inc = [[] for _ in range(self.n)]
        for e, (u, v, s) in enumerate(self.edges):
            inc[u].append((e, v, s))
            inc[v].append((e, u, s))
        return inc

    def tree(self, edge_ids: Iterable[int], vertices: Iterable[int] = ()) -> "TreeSubgraph":
        ids = tuple(edge_ids)
        vs = set(vertices)
        for e in ids:
            u, v, _ = self.edges[e]
            vs.update((u, v))
        return TreeSubgraph(frozenset(vs), tuple(self.edges[e] for e in ids))


@dataclass(frozen=True)
class TreeSubgraph:
    vertices: frozenset
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        if not self.vertices:
            raise ValueError("a tree needs at least one vertex")
        if len(self.edges) != len(self.vertices) - 1:
            raise ValueError("a tree on t vertices has t-1 edges")
        for u, v, _ in self.edges:
            if u not in self.vertices or v not in self.vertices:
                raise ValueError("tree edge leaves the vertex set")
        if len(_bfs_sides(self)) != len(self.vertices):
            raise ValueError("tree is not connected")


@dataclass(frozen=True)
class Bipartition:
    a_side: frozenset
    b_side: frozenset

    def swapped(self) -> "Bipartition":
        return Bipartition(self.b_side, self.a_side)


def from_incidence(A) -> SignedGraph:
    A = as_matrix(A)
    edges = []
    for i, row in enumerate(A):
        nz = [(j, v) for j, v in enumerate(row) if v]
        if len(nz) != 2 or any(v not in (-1, 1) for _, v in nz):
            raise MalformedIncidenceError(f"row {i} is not a signed incidence row: {list(row)}")
        (u, a), (v, b) = nz
        edges.append((u, v, -a * b))
    return SignedGraph(A.cols, tuple(edges))


def to_incidence(S: SignedGraph) -> ExactMatrix:
    """Canonical incidence matrix: +1 at the lower endpoint, ``-sign`` at the other."""
    rows = []
    for u, v, s in S.edges:
        lo, hi = min(u, v), max(u, v)
        r = [0] * S.n
        r[lo] = 1
        r[hi] = -s
        rows.append(r)
    return ExactMatrix(rows, cols=S.n)


def _bfs_sides(T: TreeSubgraph, root: int | None = None) -> dict[int, int]:
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in T.vertices}
    for u, v, s in T.edges:
        adj[u].append((v, s))
        adj[v].append((u, s))
    root = min(T.vertices) if root is None else root
    side = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y, s in adj[x]:
            if y not in side:
                side[y] = side[x] if s == 1 else 1 - side[x]
                queue.append(y)
    return side


def tree_bipartition(T: TreeSubgraph, root: int | None = None) -> Bipartition:
    """Split the tree so that even edges stay on one side and odd edges cross.

    The root (lowest vertex id unless given) goes to the A side.
    """
    side = _bfs_sides(T, root)
    return Bipartition(
        frozenset(v for v, s in side.items() if s == 0),
        frozenset(v for v, s in side.items() if s == 1),
    )


def alt_tree(T: TreeSubgraph, w: Sequence[int]) -> int:
    """Alternating weight ``|w(A_T) - w(B_T)|``."""
    part = tree_bipartition(T)
    return abs(sum(w[v] for v in part.a_side) - sum(w[v] for v in part.b_side))


def iter_subtrees(S: SignedGraph):
    """Yield ``(vertices, edge ids, signed side map)`` for every tree subgraph.

    Each tree is produced exactly once, grown from its lowest vertex by a
    binary include/exclude split on frontier edges.  Single vertices count.
    Exponential: desk-scale graphs only.
    """
    inc = S.incident

    def grow(verts, edges, side, frontier):
        # frontier: list of (edge id, inside vertex, outside vertex, sign)
        while frontier and frontier[0][2] in side:
            frontier = frontier[1:]
        if not frontier:
            yield frozenset(verts), tuple(edges), dict(side)
            return
        e, x, y, s = frontier[0]
        rest = frontier[1:]
        # exclude e
        yield from grow(verts, edges, side, rest)
        # include e
        side[y] = side[x] if s == 1 else -side[x]
        verts.append(y)
        edges.append(e)
        extra = [(f, y, z, t) for f, z, t in inc[y] if z > root and z not in side]
        yield from grow(verts, edges, side, rest + extra)
        edges.pop()
        verts.pop()
        del side[y]

    for root in range(S.n):
        start = [(f, root, z, t) for f, z, t in inc[root] if z > root]
        yield from grow([root], [], {root: 1}, start)


def alt_graph_exact(S: SignedGraph, w: Sequence[int]) -> int:
    """Maximum alternating weight over all tree subgraphs (exponential)."""
    if S.n == 0:
        return 0
    return max(abs(sum(sg * w[v] for v, sg in side.items())) for _, _, side in iter_subtrees(S))


def _odd_cycle_vertex_sets(S: SignedGraph) -> set[frozenset]:
    inc = S.incident
    found: set[frozenset] = set()

    def dfs(start, x, path, used, parity):
        for e, y, s in inc[x]:
            if e in used:
                continue
            if y == start:
                if parity * s == -1:
                    found.add(frozenset(path))
                continue
            if y < start or y in path:
                continue
            path.add(y)
            used.add(e)
            dfs(start, y, path, used, parity * s)
            used.discard(e)
            path.discard(y)

    for v in range(S.n):
        dfs(v, v, {v}, set(), 1)
    return found


def ocp_exact(S: SignedGraph) -> int:
    """Maximum number of vertex-disjoint odd cycles, by exhaustive search.

    Cycles are enumerated by DFS from their lowest vertex; the packing is a
    memoised branch on the lowest still-available vertex.  Intended n <= 10.
    """
    cycles = _odd_cycle_vertex_sets(S)
    # only inclusion-minimal vertex sets matter for packing
    minimal = [c for c in cycles if not any(o < c for o in cycles)]
    by_min: dict[int, list[int]] = {}
    for c in minimal:
        mask = 0
        for v in c:
            mask |= 1 << v
        by_min.setdefault(min(c), []).append(mask)
    memo: dict[int, int] = {}

    def best(avail: int) -> int:
        if avail == 0:
            return 0
        if avail in memo:
            return memo[avail]
        v = (avail & -avail).bit_length() - 1
        res = best(avail & ~(1 << v))
        for mask in by_min.get(v, ()):
            if mask & avail == mask:
                res = max(res, 1 + best(avail & ~mask))
        memo[avail] = res
        return res

    return best((1 << S.n) - 1)


def terminals(W) -> frozenset:
    """Columns of ``W`` with a non-zero entry in some row."""
    W = as_matrix(W)
    return frozenset(j for j in range(W.cols) if any(W[i, j] for i in range(W.rows)))
