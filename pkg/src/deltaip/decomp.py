"""Decorated trees, star decompositions and the refined tree-decomposition.

Pipeline for a graph ``G`` with terminal set ``R``:

* :func:`find_decorated_tree` looks for a subtree with ``r`` terminal leaves.
  Such a tree certifies that the declared subdeterminant bound is wrong.
* :func:`star_decomposition` builds, per connected component, a center bag
  plus pairwise disjoint leaf bags that hang off two terminals each.
* :func:`refine` turns each leaf into a comb of bags of size <= 3 (spine) and
  terminal-free leaf bags (teeth).
* :func:`decompose` glues the components and returns a rooted
  :class:`TreeDecomposition`; :func:`validate` re-checks every promise.

Bags are type 1 (bounded size) or type 2 (a leaf whose terminals all sit in
its neighbour).  The dynamic program relies on this classification.
"""

from __future__ import annotations

import enum
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .exactmat import as_matrix


class StructureError(ValueError):
    """A structural precondition does not hold; ``vertex`` names the culprit."""

    def __init__(self, msg: str, vertex: int | None = None):
        super().__init__(msg)
        self.vertex = vertex


class CenterTooLarge(StructureError):
    def __init__(self, center: frozenset, terminal_count: int, bound: int):
        super().__init__(f"center holds {terminal_count} terminals, bound is {bound}")
        self.center = center
        self.terminal_count = terminal_count
        self.bound = bound


class FormulaDomainError(ValueError):
    pass


def default_size_bound(r: int) -> int:
    return 4 * r * r


# --------------------------------------------------------------------------
# graphs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    """Undirected multigraph on ``0..n-1`` without loops."""

    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        for i, (u, v) in enumerate(edges):
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {i} has endpoint outside 0..{self.n - 1}")
            if u == v:
                raise ValueError(f"edge {i} is a self-loop")

    @classmethod
    def from_signed(cls, S) -> "Graph":
        return cls(S.n, tuple((u, v) for u, v, _ in S.edges))

    @classmethod
    def from_matrix(cls, A) -> "Graph":
        """Shadow graph of a matrix whose rows have at most two non-zeros."""
        A = as_matrix(A)
        edges = []
        for row in A:
            nz = [j for j, v in enumerate(row) if v]
            if len(nz) == 2:
                edges.append(tuple(nz))
            elif len(nz) > 2:
                raise ValueError("row with more than two non-zeros")
        return cls(A.cols, tuple(edges))

    @cached_property
    def adj(self) -> list[set[int]]:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    @cached_property
    def incident(self) -> list[list[tuple[int, int]]]:
        inc = [[] for _ in range(self.n)]
        for e, (u, v) in enumerate(self.edges):
            inc[u].append((e, v))
            inc[v].append((e, u))
        return inc

    def components(self, vertices: Iterable[int] | None = None) -> list[list[int]]:
        """Connected components of the induced subgraph, ordered by least vertex."""
        allowed = set(range(self.n)) if vertices is None else set(vertices)
        seen = set()
        comps = []
        for s in sorted(allowed):
            if s in seen:
                continue
            seen.add(s)
            comp = [s]
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y in self.adj[x]:
                    if y in allowed and y not in seen:
                        seen.add(y)
                        comp.append(y)
                        queue.append(y)
            comps.append(sorted(comp))
        return comps

    def neighbours(self, vertices: Iterable[int]) -> set[int]:
        vs = set(vertices)
        out = set()
        for v in vs:
            out |= self.adj[v]
        return out - vs

    def path(self, s: int, t: int, vertices: Iterable[int] | None = None) -> list[int] | None:
        allowed = set(range(self.n)) if vertices is None else set(vertices)
        prev = {s: None}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if x == t:
                break
            for y in sorted(self.adj[x]):
                if y in allowed and y not in prev:
                    prev[y] = x
                    queue.append(y)
        if t not in prev:
            return None
        out = [t]
        while prev[out[-1]] is not None:
            out.append(prev[out[-1]])
        return out[::-1]


# --------------------------------------------------------------------------
# decorated trees
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DecoratedWitness:
    """A subtree of ``G`` with at least ``r`` terminal leaves."""

    vertices: frozenset
    edge_ids: tuple[int, ...]
    terminal_leaves: frozenset
    r: int
    heuristic: bool = False

    def verify(self, G: Graph, R: Iterable[int]) -> bool:
        R = set(R)
        if len(self.edge_ids) != len(self.vertices) - 1:
            return False
        deg = defaultdict(int)
        for e in self.edge_ids:
            u, v = G.edges[e]
            if u not in self.vertices or v not in self.vertices:
                return False
            deg[u] += 1
            deg[v] += 1
        sub = Graph(G.n, tuple(G.edges[e] for e in self.edge_ids))
        if len(sub.components(self.vertices)) != 1:
            return False
        if len(self.vertices) == 1:
            leaves = set(self.vertices)
        else:
            leaves = {v for v in self.vertices if deg[v] == 1}
        return self.terminal_leaves <= leaves & R and len(self.terminal_leaves) >= self.r


def _spanning_tree_edges(G: Graph, comp: Sequence[int]) -> list[int]:
    allowed = set(comp)
    root = min(comp)
    seen = {root}
    out = []
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for e, y in sorted(G.incident[x], key=lambda p: (p[1], p[0])):
            if y in allowed and y not in seen:
                seen.add(y)
                out.append(e)
                queue.append(y)
    return out


def _witness_from_leafset(G: Graph, leaves: Sequence[int], comp: Sequence[int], r: int, heuristic: bool) -> DecoratedWitness:
    edges = _spanning_tree_edges(G, comp)
    cset = set(comp)
    for l in leaves:
        e = min(e for e, y in G.incident[l] if y in cset)
        edges.append(e)
    return DecoratedWitness(frozenset(comp) | frozenset(leaves), tuple(edges), frozenset(leaves), r, heuristic)


def find_decorated_tree(G: Graph, R: Iterable[int], r: int, exact_cap: int = 12) -> DecoratedWitness | None:
    """Search for a subtree of ``G`` with at least ``r`` terminal leaves.

    A tree with terminal leaves ``L`` exists iff some component of ``G - L``
    touches every vertex of ``L`` (for ``|L| >= 3``), so the exact search runs
    over ``r``-subsets of terminals.  It is used whenever ``|R| <= exact_cap``;
    otherwise a greedy pruned-BFS tree is tried and the answer is flagged
    heuristic (``None`` then proves nothing).
    """
    R = sorted(set(R))
    if r <= 0:
        raise ValueError("r must be positive")
    if len(R) < r:
        return None
    if r == 1:
        v = R[0]
        return DecoratedWitness(frozenset([v]), (), frozenset([v]), 1)
    if r == 2:
        for a, b in combinations(R, 2):
            p = G.path(a, b)
            if p is not None:
                ids = []
                for x, y in zip(p, p[1:]):
                    ids.append(min(e for e, z in G.incident[x] if z == y))
                return DecoratedWitness(frozenset(p), tuple(ids), frozenset([a, b]), 2)
        return None
    if len(R) <= exact_cap:
        for L in combinations(R, r):
            Ls = set(L)
            rest = [v for v in range(G.n) if v not in Ls]
            for comp in G.components(rest):
                nb = G.neighbours(comp)
                if Ls <= nb:
                    return _witness_from_leafset(G, L, comp, r, heuristic=False)
        return None
    return _greedy_decorated(G, set(R), r)


def _greedy_decorated(G: Graph, R: set, r: int) -> DecoratedWitness | None:
    for root in range(G.n):
        comp = next(c for c in G.components() if root in c)
        # BFS tree from root, then strip non-terminal leaves
        parent = {root: None}
        pedge = {}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for e, y in G.incident[x]:
                if y not in parent:
                    parent[y] = x
                    pedge[y] = e
                    queue.append(y)
        verts = set(comp)
        deg = defaultdict(int)
        for y, x in parent.items():
            if x is not None:
                deg[x] += 1
                deg[y] += 1
        changed = True
        while changed:
            changed = False
            for v in list(verts):
                if deg[v] <= 1 and v not in R and len(verts) > 1:
                    verts.discard(v)
                    for y, x in parent.items():
                        if y in verts and x == v or y == v and x in verts:
                            other = y if y != v else x
                            deg[other] -= 1
                    changed = True
        # tree edges inside verts
        ids = tuple(pedge[y] for y, x in parent.items() if x is not None and y in verts and x in verts)
        leaves = {v for v in verts if deg[v] == 1} & R
        if len(verts) > 1 and len(leaves) >= r:
            w = DecoratedWitness(frozenset(verts), ids, frozenset(sorted(leaves)[:r]), r, heuristic=True)
            if w.verify(G, R):
                return w
    return None


def leaf_count(edges: Sequence[tuple[int, int]], vertices: Iterable[int] = ()) -> int:
    """Number of degree-1 vertices of a tree, cross-checked against
    ``2 + sum(deg - 2 for deg >= 3)``."""
    deg = defaultdict(int)
    for v in vertices:
        deg[v] += 0
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    if len(deg) < 2:
        raise FormulaDomainError("leaf formula needs a tree with at least two vertices")
    if len(edges) != len(deg) - 1:
        raise ValueError("not a tree: edge count must be vertex count minus one")
    leaves = sum(1 for d in deg.values() if d == 1)
    formula = 2 + sum(d - 2 for d in deg.values() if d >= 3)
    if leaves != formula:
        raise ValueError(f"leaf count {leaves} disagrees with degree formula {formula}")
    return leaves


# --------------------------------------------------------------------------
# terminal ordering along a two-terminal piece
# --------------------------------------------------------------------------

def terminal_path_order(G: Graph, R_local: Iterable[int], v0: int, va: int,
                        vertices: Iterable[int] | None = None) -> list[int]:
    """Order the terminals of a two-terminal piece from ``v0`` to ``va``.

    Every inner terminal must separate ``v0`` from ``va``; then all
    ``v0``-``va`` paths meet the terminals in one order.  Also checks that each
    component of the piece minus its terminals touches at most two
    consecutive terminals.  Violations raise :class:`StructureError`.
    """
    V = set(range(G.n)) if vertices is None else set(vertices)
    Rset = set(R_local) & V
    if v0 not in Rset or va not in Rset or v0 == va:
        raise StructureError("v0 and va must be distinct terminals of the piece")
    for t in sorted(Rset - {v0, va}):
        if G.path(v0, va, V - {t}) is not None:
            raise StructureError(f"terminal {t} does not separate {v0} from {va}", vertex=t)
    p = G.path(v0, va, V)
    if p is None:
        raise StructureError(f"{v0} and {va} are disconnected", vertex=va)
    order = [v for v in p if v in Rset]
    pos = {v: i for i, v in enumerate(order)}
    for comp in G.components(V - Rset):
        att = sorted(pos[t] for t in G.neighbours(comp) if t in Rset)
        if len(att) > 2 or (len(att) == 2 and att[1] - att[0] != 1):
            raise StructureError(f"component {comp} attaches to non-consecutive terminals",
                                 vertex=order[att[0]] if att else None)
    return order


# --------------------------------------------------------------------------
# star decomposition
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LeafBag:
    bag: frozenset
    ends: tuple[int, int]


@dataclass(frozen=True)
class StarDecomposition:
    center: frozenset
    leaves: tuple[LeafBag, ...] = ()


def _leaf_ok(G: Graph, bag: frozenset, ends: tuple[int, int], R: set) -> bool:
    a, b = ends
    private = bag - {a, b}
    if G.neighbours(private) - bag:
        return False
    if len(G.components(bag)) != 1:
        return False
    for t in sorted(private & R):
        if G.path(a, b, bag - {t}) is not None:
            return False
    return True


def star_decomposition(G: Graph, R: Iterable[int], r: int, *,
                       vertices: Iterable[int] | None = None,
                       size_bound: int | None = None) -> StarDecomposition:
    """Star decomposition of one connected piece of ``G``.

    Leaves are chains of terminals ``v0, v1, ..., va`` in which every inner
    terminal is glued to exactly two chain neighbours through pieces that
    touch only the two of them.  Chains with shared end terminals compete;
    the larger one wins.  Everything not absorbed into a leaf is the center.
    """
    V = set(range(G.n)) if vertices is None else set(vertices)
    bound = default_size_bound(r) if size_bound is None else size_bound
    if V and len(G.components(V)) != 1:
        raise StructureError("star decomposition needs a connected graph")
    term = set(R) & V
    if not term:
        return StarDecomposition(frozenset(V))

    blobs = G.components(V - term)
    bundles: dict[tuple[int, int], list[int]] = defaultdict(list)
    pendants: dict[int, list[int]] = defaultdict(list)
    pinned: set[int] = set()
    for i, blob in enumerate(blobs):
        att = sorted(G.neighbours(blob) & term)
        if len(att) == 1:
            pendants[att[0]].append(i)
        elif len(att) == 2:
            bundles[(att[0], att[1])].append(i)
        else:
            pinned.update(att)
    for u, v in G.edges:
        if u in term and v in term:
            bundles.setdefault((min(u, v), max(u, v)), [])
    hn: dict[int, set[int]] = defaultdict(set)
    for a, b in bundles:
        hn[a].add(b)
        hn[b].add(a)
    inner_ok = {t for t in term if t not in pinned and len(hn[t]) == 2}

    def walk(start, first):
        seq = []
        prev, cur = start, first
        while cur in inner_ok and cur != start:
            seq.append(cur)
            nxt = (hn[cur] - {prev}).pop()
            prev, cur = cur, nxt
        return seq, cur

    chains: list[list[int]] = []
    seen: set[int] = set()
    for t in sorted(inner_ok):
        if t in seen:
            continue
        n1, n2 = sorted(hn[t])
        s1, e1 = walk(t, n1)
        if e1 == t:
            cyc = [t] + s1
            seen.update(cyc)
            # break the cycle between its least vertex and that vertex's smaller neighbour
            a = min(cyc)
            i = cyc.index(a)
            cyc = cyc[i:] + cyc[:i]
            b = min(cyc[1], cyc[-1])
            if b == cyc[1]:
                cyc = [cyc[0]] + cyc[1:][::-1]
            chains.append(cyc)
            continue
        s2, e2 = walk(t, n2)
        body = s2[::-1] + [t] + s1
        seen.update(body)
        if e1 == e2:
            chains.append([e1] + body)
        else:
            chains.append([e2] + body + [e1])
    for (a, b), bl in sorted(bundles.items()):
        if a not in inner_ok and b not in inner_ok and bl:
            chains.append([a, b])

    def chain_bag(chain):
        bag = set(chain)
        for x, y in zip(chain, chain[1:]):
            for i in bundles.get((min(x, y), max(x, y)), ()):
                bag.update(blobs[i])
        for x in chain[1:-1]:
            for i in pendants.get(x, ()):
                bag.update(blobs[i])
        return frozenset(bag)

    candidates = []
    for ch in chains:
        bag = chain_bag(ch)
        ends = (ch[0], ch[-1])
        candidates.append((-len(bag), tuple(sorted(ends)), bag, ends))
    candidates.sort(key=lambda c: (c[0], c[1]))
    used_ends: set[int] = set()
    leaves = []
    for _, _, bag, ends in candidates:
        if ends[0] == ends[1] or used_ends & set(ends):
            continue
        if not _leaf_ok(G, bag, ends, term):
            continue
        used_ends.update(ends)
        leaves.append(LeafBag(bag, ends))
    center = set(V)
    for lf in leaves:
        center -= lf.bag - set(lf.ends)
    center = frozenset(center)
    nterm = len(center & term)
    if nterm > bound:
        raise CenterTooLarge(center, nterm, bound)
    leaves.sort(key=lambda lf: min(lf.bag))
    return StarDecomposition(center, tuple(leaves))


# --------------------------------------------------------------------------
# tree decompositions
# --------------------------------------------------------------------------

class BagType(enum.IntEnum):
    TYPE1 = 1
    TYPE2 = 2


@dataclass
class TreeDecomposition:
    """Rooted tree of bags.  ``parent[root]`` is ``None``."""

    bags: list[frozenset]
    parent: list[int | None]
    types: list[BagType]
    root: int
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.bags = [frozenset(b) for b in self.bags]
        if not self.labels:
            self.labels = [f"n{i}" for i in range(len(self.bags))]

    def __len__(self):
        return len(self.bags)

    def add(self, bag, parent, btype, label="") -> int:
        self.bags.append(frozenset(bag))
        self.parent.append(parent)
        self.types.append(BagType(btype))
        self.labels.append(label or f"n{len(self.bags) - 1}")
        return len(self.bags) - 1

    def children(self) -> list[list[int]]:
        ch = [[] for _ in self.bags]
        for t, p in enumerate(self.parent):
            if p is not None:
                ch[p].append(t)
        return ch

    def adhesion(self, t: int) -> frozenset:
        p = self.parent[t]
        return frozenset() if p is None else self.bags[t] & self.bags[p]

    def degree(self, t: int) -> int:
        return len(self.children()[t]) + (self.parent[t] is not None)

    def stats(self) -> dict:
        return {
            "nodes": len(self.bags),
            "type1": sum(1 for t in self.types if t == BagType.TYPE1),
            "type2": sum(1 for t in self.types if t == BagType.TYPE2),
            "max_bag": max((len(b) for b in self.bags), default=0),
            "max_type1_bag": max((len(b) for b, t in zip(self.bags, self.types) if t == BagType.TYPE1), default=0),
            "max_adhesion": max((len(self.adhesion(t)) for t in range(len(self.bags))), default=0),
        }


def refine(G: Graph, R: Iterable[int], SD: StarDecomposition, td: TreeDecomposition | None = None,
           parent: int | None = None) -> tuple[TreeDecomposition, int]:
    """Turn a star decomposition into a tree-decomposition with typed bags.

    The center becomes a terminals-only type-1 bag ``t0`` with a pendant type-2
    bag holding the whole center.  Every star leaf with ordered terminals
    ``v0..va`` becomes an ``a``-comb: spine bags ``{v(i-1), v(i), va}`` and
    tooth bags adding the components between (or hanging off) them.

    Nodes are appended to ``td`` (a fresh one if omitted) below ``parent``;
    returns the decomposition and the id of ``t0``.
    """
    Rset = set(R)
    if td is None:
        td = TreeDecomposition([], [], [], root=0)
    t0 = td.add(SD.center & Rset, parent, BagType.TYPE1, "t0")
    if parent is None:
        td.root = t0
    td.add(SD.center, t0, BagType.TYPE2, "t-1")
    for lf in SD.leaves:
        a, b = lf.ends
        order = terminal_path_order(G, Rset, a, b, vertices=lf.bag)
        lam = len(order) - 1
        pos = {v: i for i, v in enumerate(order)}
        K = [set() for _ in range(lam + 1)]  # K[i]: attached to v(i-1) and v(i)
        L = [set() for _ in range(lam + 1)]  # L[j]: attached only to v(j)
        for comp in G.components(lf.bag - set(order)):
            att = sorted(pos[t] for t in G.neighbours(comp) if t in pos)
            if len(att) == 2:
                K[att[1]].update(comp)
            elif len(att) == 1:
                L[att[0]].update(comp)
            else:
                raise StructureError(f"component {comp} of a leaf bag is detached")
        prev = t0
        for i in range(1, lam + 1):
            spine = {order[i - 1], order[i], order[lam]}
            c = td.add(spine, prev, BagType.TYPE1, f"c{i}[{a}-{b}]")
            tooth = spine | K[i] | L[i]
            if i == 1:
                tooth |= L[0]
            td.add(tooth, c, BagType.TYPE2, f"d{i}[{a}-{b}]")
            prev = c
    return td, t0


@dataclass(frozen=True)
class Inconclusive:
    reason: str


def decompose(G: Graph, R: Iterable[int], r: int, *, size_bound: int | None = None,
              exact_cap: int = 12) -> TreeDecomposition | DecoratedWitness | Inconclusive:
    """Typed tree-decomposition of ``G`` or a decorated-tree certificate.

    Components are decomposed separately and glued along a comb of empty
    bags rooted at its first spine node; with a single component its ``t0``
    is the root.
    """
    Rset = set(R)
    bound = default_size_bound(r) if size_bound is None else size_bound
    wit = find_decorated_tree(G, Rset, r, exact_cap=exact_cap)
    if wit is not None:
        return wit
    td = TreeDecomposition([], [], [], root=0)
    if G.n == 0:
        td.add((), None, BagType.TYPE1, "root")
        return td
    if not Rset:
        td.add((), None, BagType.TYPE1, "t0")
        td.add(range(G.n), 0, BagType.TYPE2, "t-1")
        return td
    comps = G.components()
    try:
        sds = [star_decomposition(G, Rset, r, vertices=c, size_bound=bound) for c in comps]
        if len(comps) == 1:
            refine(G, Rset, sds[0], td, None)
        else:
            prev = None
            for i, sd in enumerate(sds):
                c = td.add((), prev, BagType.TYPE1, f"glue{i + 1}")
                if prev is None:
                    td.root = c
                refine(G, Rset, sd, td, c)
                prev = c
    except StructureError as exc:
        return Inconclusive(f"decomposition failed: {exc}")
    return td


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DecompBounds:
    type1_size: int
    adhesion: int
    degree: int

    @classmethod
    def for_r(cls, r: int, f: Callable[[int], int] = default_size_bound) -> "DecompBounds":
        # gluing the component decompositions may add one to the degree
        return cls(f(r), f(r), f(r) + 1)


CLAUSES = (
    "tree-structure",
    "vertex-coverage",
    "edge-coverage",
    "vertex-connectivity",
    "type2-leaf",
    "type2-terminal-containment",
    "type1-size",
    "adhesion-size",
    "degree",
)


@dataclass
class Violation:
    clause: str
    witness: object

    def __str__(self):
        return f"{self.clause}: {self.witness}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def failed(self, clause: str) -> list[Violation]:
        return [v for v in self.violations if v.clause == clause]

    def lines(self) -> list[str]:
        out = []
        for c in CLAUSES:
            bad = self.failed(c)
            out.append(f"{c}: {'ok' if not bad else 'VIOLATED ' + '; '.join(str(v.witness) for v in bad[:3])}")
        return out


def validate(td: TreeDecomposition, G: Graph, R: Iterable[int], bounds: DecompBounds) -> ValidationReport:
    rep = ValidationReport()
    Rset = set(R)
    N = len(td.bags)
    add = lambda c, w: rep.violations.append(Violation(c, w))

    roots = [t for t in range(N) if td.parent[t] is None]
    if N == 0 or roots != [td.root]:
        add("tree-structure", f"roots {roots}, declared root {td.root}")
        return rep
    for t in range(N):
        seen = set()
        x = t
        while x is not None:
            if x in seen or not (0 <= x < N):
                add("tree-structure", f"node {t} does not reach the root")
                return rep
            seen.add(x)
            x = td.parent[x]
    for t, bag in enumerate(td.bags):
        bad = [v for v in bag if not (0 <= v < G.n)]
        if bad:
            add("vertex-coverage", f"bag {t} holds unknown vertices {bad}")

    covered = set().union(*td.bags) if td.bags else set()
    missing = sorted(set(range(G.n)) - covered)
    if missing:
        add("vertex-coverage", f"vertices {missing} in no bag")

    where = defaultdict(list)
    for t, bag in enumerate(td.bags):
        for v in bag:
            where[v].append(t)
    for e, (u, v) in enumerate(G.edges):
        if not set(where[u]) & set(where[v]):
            add("edge-coverage", f"edge {e}=({u},{v})")

    for v, nodes in sorted(where.items()):
        tops = [t for t in nodes if td.parent[t] is None or v not in td.bags[td.parent[t]]]
        if len(tops) != 1:
            add("vertex-connectivity", f"vertex {v} occurs in disconnected nodes {nodes}")

    ch = td.children()
    for t in range(N):
        deg = len(ch[t]) + (td.parent[t] is not None)
        if deg > bounds.degree:
            add("degree", f"node {t} has degree {deg} > {bounds.degree}")
        if t != td.root and len(td.adhesion(t)) > bounds.adhesion:
            add("adhesion-size", f"node {t} adhesion {len(td.adhesion(t))} > {bounds.adhesion}")
        if td.types[t] == BagType.TYPE1:
            if len(td.bags[t]) > bounds.type1_size:
                add("type1-size", f"node {t} has {len(td.bags[t])} > {bounds.type1_size} vertices")
        else:
            if ch[t] or td.parent[t] is None:
                add("type2-leaf", f"type-2 node {t} is not a leaf")
                continue
            nb = td.bags[td.parent[t]]
            stray = sorted((td.bags[t] & Rset) - nb)
            if stray:
                add("type2-terminal-containment", f"node {t} terminals {stray} absent from neighbour")
    return rep
