import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from deltaip.decomp import (BagType, CenterTooLarge, DecompBounds, DecoratedWitness, FormulaDomainError, Graph,
                            StarDecomposition, StructureError, TreeDecomposition, decompose, find_decorated_tree,
                            leaf_count, refine, star_decomposition, terminal_path_order, validate)
from deltaip.props import check_decomp_case, random_decomp_case


def path(n):
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def star(leaves):
    return Graph(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def decorated_exists(G, R, r):
    """Oracle: any edge subset forming a tree with >= r terminal leaves."""
    R = set(R)
    if r <= 1:
        return len(R) >= r
    for size in range(1, G.n):
        for sub in itertools.combinations(range(len(G.edges)), size):
            H = nx.MultiGraph()
            H.add_edges_from(G.edges[e] for e in sub)
            if H.number_of_nodes() != size + 1 or not nx.is_connected(H):
                continue
            if sum(1 for v in H if H.degree(v) == 1 and v in R) >= r:
                return True
    return False


# -- decorated trees -----------------------------------------------------

def test_star_is_decorated():
    w = find_decorated_tree(star(4), {1, 2, 3, 4}, 4)
    assert w is not None and w.verify(star(4), {1, 2, 3, 4})
    assert w.terminal_leaves == {1, 2, 3, 4}


def test_path_is_not_3_decorated():
    assert find_decorated_tree(path(5), {0, 4}, 3) is None
    assert find_decorated_tree(path(5), {0, 2, 4}, 3) is None


def test_too_few_terminals():
    assert find_decorated_tree(star(6), {1, 2}, 3) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.integers(0, 9), st.integers(1, 4), st.integers(0, 10 ** 6))
def test_decorated_search_matches_oracle(n, m, r, seed):
    rng = random.Random(seed)
    edges = tuple(tuple(rng.sample(range(n), 2)) for _ in range(m))
    G = Graph(n, edges)
    R = set(rng.sample(range(n), rng.randint(0, n)))
    w = find_decorated_tree(G, R, r)
    assert (w is not None) == decorated_exists(G, R, r)
    if w is not None:
        assert w.verify(G, R)


def test_greedy_search_beyond_cap_is_flagged():
    G = star(14)
    R = set(range(1, 15))
    w = find_decorated_tree(G, R, 5, exact_cap=4)
    assert w is not None and w.heuristic and w.verify(G, R)


# -- leaf counting -------------------------------------------------------

def test_leaf_count_examples():
    assert leaf_count([(0, 1)]) == 2
    assert leaf_count([(0, 1), (0, 2), (0, 3)]) == 3
    assert leaf_count([(0, i) for i in range(1, 6)]) == 5
    with pytest.raises(FormulaDomainError):
        leaf_count([], [0])


@given(st.integers(2, 12), st.integers(0, 10 ** 6))
def test_leaf_count_random_trees(n, seed):
    rng = random.Random(seed)
    edges = [(i, rng.randrange(i)) for i in range(1, n)]
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    assert leaf_count(edges) == sum(1 for d in deg if d == 1)


# -- terminal order ------------------------------------------------------

def test_terminal_path_order_examples():
    G = path(5)
    assert terminal_path_order(G, [0, 2, 4], 0, 4) == [0, 2, 4]
    assert terminal_path_order(path(3), [0, 2], 0, 2) == [0, 2]


def test_terminal_path_order_bypass():
    # theta graph: 0-1-3 and 0-2-3; terminal 1 can be bypassed via 2
    G = Graph(4, ((0, 1), (1, 3), (0, 2), (2, 3)))
    with pytest.raises(StructureError) as exc:
        terminal_path_order(G, [0, 1, 3], 0, 3)
    assert exc.value.vertex == 1


# -- star decomposition ----------------------------------------------------

def test_star_decomposition_long_path():
    G = path(8)
    sd = star_decomposition(G, {0, 7}, 3)
    assert sd.center == {0, 7}
    assert len(sd.leaves) == 1 and sd.leaves[0].bag == frozenset(range(8))


def test_star_decomposition_all_terminal_small():
    G = Graph(4, ((0, 1), (1, 2), (2, 0), (2, 3), (3, 0), (1, 3)))
    sd = star_decomposition(G, set(range(4)), 3)
    assert sd.center == set(range(4)) and not sd.leaves


def test_center_too_large():
    G = star(6)
    with pytest.raises(CenterTooLarge) as exc:
        star_decomposition(G, set(range(1, 7)), 3, size_bound=2)
    assert exc.value.terminal_count > 2


def test_star_leaves_respect_structure():
    rng = random.Random(7)
    for _ in range(200):
        G, R, r = random_decomp_case(rng)
        if find_decorated_tree(G, R, r) is not None:
            continue
        for comp in G.components():
            sd = star_decomposition(G, R, r, vertices=comp)
            Rc = R & set(comp)
            for lf in sd.leaves:
                assert sd.center & lf.bag == set(lf.ends) and set(lf.ends) <= Rc
                assert len(G.components(lf.bag)) == 1
                for t in (lf.bag - set(lf.ends)) & R:
                    assert G.path(lf.ends[0], lf.ends[1], lf.bag - {t}) is None
            for a, b in itertools.combinations(sd.leaves, 2):
                assert not (a.bag - set(a.ends)) & (b.bag - set(b.ends))
                assert not set(a.ends) & set(b.ends)


# -- refine and decompose --------------------------------------------------

def test_refine_without_leaves():
    G = Graph(3, ((0, 1), (1, 2)))
    td, t0 = refine(G, {0}, StarDecomposition(frozenset({0, 1, 2})))
    assert len(td) == 2
    assert td.bags[t0] == {0} and td.types[t0] == BagType.TYPE1
    assert td.bags[1] == {0, 1, 2} and td.types[1] == BagType.TYPE2


def test_refine_one_comb():
    G = path(4)
    sd = star_decomposition(G, {0, 3}, 3)
    td, t0 = refine(G, {0, 3}, sd)
    spine = [t for t in range(len(td)) if td.labels[t].startswith("c")]
    assert len(spine) == 1 and td.bags[spine[0]] == {0, 3}
    assert validate(td, G, {0, 3}, DecompBounds.for_r(3)).ok


def test_decompose_no_terminals():
    G = path(5)
    td = decompose(G, set(), 3)
    assert isinstance(td, TreeDecomposition)
    assert td.bags[td.root] == frozenset() and td.types[td.root] == BagType.TYPE1
    assert [td.bags[t] for t in range(len(td)) if td.types[t] == BagType.TYPE2] == [frozenset(range(5))]


def test_decompose_two_components():
    G = Graph(4, ((0, 1), (2, 3)))
    td = decompose(G, {0, 1}, 3)
    assert isinstance(td, TreeDecomposition)
    assert validate(td, G, {0, 1}, DecompBounds.for_r(3)).ok
    glue = [t for t in range(len(td)) if td.labels[t].startswith("glue")]
    assert len(glue) == 2


def test_decompose_star_witness():
    out = decompose(star(6), set(range(7)), 4)
    assert isinstance(out, DecoratedWitness) and out.verify(star(6), set(range(7)))


def test_decompose_empty_graph():
    td = decompose(Graph(0, ()), set(), 3)
    assert isinstance(td, TreeDecomposition) and len(td) == 1


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_decompose_random_valid(seed):
    ok, why = check_decomp_case(random_decomp_case(random.Random(seed)))
    assert ok, why


# -- validator catches broken decompositions ---------------------------------

def _valid_td():
    G = path(6)
    td = decompose(G, {0, 5}, 3)
    assert isinstance(td, TreeDecomposition)
    return G, td


def test_validator_detects_missing_vertex():
    G, td = _valid_td()
    t = max(range(len(td)), key=lambda t: len(td.bags[t]))
    td.bags[t] = td.bags[t] - {3}
    rep = validate(td, G, {0, 5}, DecompBounds.for_r(3))
    assert rep.failed("vertex-coverage") or rep.failed("edge-coverage")


def test_validator_detects_disconnected_occurrence():
    G, td = _valid_td()
    leaf = td.add({2}, td.root, BagType.TYPE1)
    rep = validate(td, G, {0, 5}, DecompBounds.for_r(3))
    assert rep.failed("vertex-connectivity")


def test_validator_detects_type2_terminal_leak():
    G, td = _valid_td()
    # 3 sits only inside a tooth bag; declaring it a terminal breaks containment
    rep = validate(td, G, {0, 3, 5}, DecompBounds.for_r(3))
    assert rep.failed("type2-terminal-containment")


def test_validator_detects_type2_inner_node():
    G, td = _valid_td()
    t2 = next(t for t in range(len(td)) if td.types[t] == BagType.TYPE2)
    td.add(set(td.bags[t2]), t2, BagType.TYPE1)
    assert validate(td, G, {0, 5}, DecompBounds.for_r(3)).failed("type2-leaf")


def test_validator_size_and_degree():
    G, td = _valid_td()
    rep = validate(td, G, {0, 5}, DecompBounds(0, 0, 1))
    assert rep.failed("type1-size") and rep.failed("adhesion-size") and rep.failed("degree")
    assert any(line.startswith("degree: VIOLATED") for line in rep.lines())


def test_validator_two_roots():
    G, td = _valid_td()
    td.parent[1] = None
    assert validate(td, G, {0, 5}, DecompBounds.for_r(3)).failed("tree-structure")
