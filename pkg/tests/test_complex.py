import numpy as np
import pytest
from hypothesis import given, strategies as st

from bldgzeta.complex import (ChamberOperator, build_thin_quotient, complete_bipartite,
                              cycle_graph, load_quotient_graph, load_thin_quotient,
                              non_backtracking_operator, thin_translation_by_action,
                              thin_translation_operator, translation_operator, valid_positions,
                              verify_cover_pushforward, verify_product_law)
from bldgzeta.errors import (InvalidPosition, IrregularGraph, MalformedDocument,
                             NotBipartiteWithTypes)
from conftest import load_data

GRAPHS = ["k33.json", "k44.json", "cycle6.json", "heawood.json", "cube.json"]


def walk_count_operator(g, k):
    """T_k by explicit enumeration of non-backtracking walks of 2k edges."""
    tail, head, rev = g.directed()
    out_of = {}
    for f, t in enumerate(tail):
        out_of.setdefault(int(t), []).append(f)
    n = g.num_chambers
    m = np.zeros((n, n), dtype=np.int64)
    for c in range(n):
        stack = [(2 * c, 0)]
        while stack:
            e, steps = stack.pop()
            if steps == 2 * k:
                m[c, e // 2] += 1
                continue
            for f in out_of.get(int(head[e]), []):
                if f != rev[e]:
                    stack.append((f, steps + 1))
    return m


@st.composite
def regular_bipartite(draw):
    """Union of d perfect matchings between two sides of size n (multi-edges allowed)."""
    n = draw(st.integers(2, 4))
    d = draw(st.integers(2, 3))
    perms = [draw(st.permutations(range(n))) for _ in range(d)]
    verts = [{"id": i, "type": 0} for i in range(n)] + [{"id": n + i, "type": 1} for i in range(n)]
    edges = [[i, n + p[i]] for p in perms for i in range(n)]
    return load_quotient_graph({"vertices": verts, "edges": edges})


@pytest.mark.parametrize("name", GRAPHS)
def test_bundled_graphs_are_regular(name):
    g = load_quotient_graph(load_data(name))
    q = g.require_regular()
    t1 = translation_operator(g, 1)
    assert t1.nonnegative()
    assert set(t1.row_sums()) == {q * q}


@pytest.mark.parametrize("name", GRAPHS)
@pytest.mark.parametrize("k", [1, 2])
def test_translation_matches_walk_enumeration(name, k):
    g = load_quotient_graph(load_data(name))
    assert np.array_equal(translation_operator(g, k).matrix, walk_count_operator(g, k))


@given(regular_bipartite(), st.integers(1, 3), st.integers(1, 3))
def test_product_law_random_graphs(g, k, l):
    tk, tl = translation_operator(g, k), translation_operator(g, l)
    assert tk @ tl == translation_operator(g, k + l)
    assert tk @ tl == tl @ tk


@given(regular_bipartite(), st.integers(1, 2))
def test_row_sums_count_positions(g, k):
    q = g.require_regular()
    assert set(translation_operator(g, k).row_sums()) == {q ** (2 * k)}


def test_k33_small_traces():
    g = complete_bipartite(3, 3)
    assert translation_operator(g, 1).trace() == 0
    assert translation_operator(g, 2).trace() == 36
    assert translation_operator(g, 0) == ChamberOperator.identity(9)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_cycle_traces(m):
    g = cycle_graph(2 * m)
    for k in range(1, 2 * m + 2):
        op = translation_operator(g, k)
        assert op.is_permutation()
        assert op.trace() == (2 * m if k % m == 0 else 0)


def test_cover_pushforward():
    base = cycle_graph(6)
    cover = cycle_graph(12)
    vmap = {i: i % 6 for i in range(12)}
    for k in (1, 2, 3):
        assert verify_cover_pushforward(cover, base, vmap, k)["ok"]


def test_non_backtracking_operator_shape():
    g = complete_bipartite(2, 3)
    b = non_backtracking_operator(g).matrix
    assert b.shape == (12, 12)
    tail, head, rev = g.directed()
    for e in range(12):
        assert b[e, rev[e]] == 0


def test_graph_errors():
    with pytest.raises(NotBipartiteWithTypes):
        load_quotient_graph({"vertices": [0, 1, 2], "edges": [[0, 1], [1, 2], [2, 0]]})
    with pytest.raises(NotBipartiteWithTypes):
        load_quotient_graph({"vertices": [{"id": 0, "type": 0}, {"id": 1, "type": 0}],
                             "edges": [[0, 1]]})
    with pytest.raises(MalformedDocument):
        load_quotient_graph({"vertices": [0]})
    with pytest.raises(MalformedDocument):
        load_quotient_graph({"vertices": [0, 1], "edges": [[0, 7]]})
    with pytest.raises(MalformedDocument):
        load_quotient_graph("{not json")
    path = load_quotient_graph({"vertices": [0, 1, 2], "edges": [[0, 1], [1, 2]]})
    assert path.types == (0, 1, 0)
    with pytest.raises(IrregularGraph):
        path.require_regular()


def test_graph_json_round_trip():
    g = load_quotient_graph(load_data("heawood.json"))
    assert load_quotient_graph(g.to_json()).edges == g.edges


# thin quotients

@pytest.fixture(scope="module")
def thin_a2():
    return load_thin_quotient(load_data("thin_a2.json"))


def test_thin_a2_size(thin_a2):
    assert thin_a2.num_chambers == 24
    assert thin_a2.index == 4


def test_thin_routes_agree(thin_a2):
    for k in valid_positions(thin_a2, 3):
        a = thin_translation_operator(thin_a2, k)
        assert a.is_permutation()
        assert a == thin_translation_by_action(thin_a2, k)


def test_thin_product_law(thin_a2):
    ks = valid_positions(thin_a2, 2)
    rep = verify_product_law(lambda k: thin_translation_operator(thin_a2, k), ks)
    assert rep["ok"] and rep["checked"] == len(ks) ** 2


@pytest.mark.parametrize("tag,sub,chambers", [("C~2", [[1, 0], [0, 1]], 8),
                                              ("G~2", [[2, 0], [0, 2]], 48),
                                              ("A~1", [[3]], 6),
                                              ("A~2", [[1, 1], [-1, 2]], 18)])
def test_other_thin_quotients(tag, sub, chambers):
    t = build_thin_quotient(tag, sub)
    assert t.num_chambers == chambers
    ks = valid_positions(t, 2)
    assert ks
    for k in ks:
        assert thin_translation_operator(t, k) == thin_translation_by_action(t, k)
    assert verify_product_law(lambda k: thin_translation_operator(t, k), ks)["ok"]


def test_thin_rank_one_traces():
    t = build_thin_quotient("A~1", [[3]])
    for k in range(1, 8):
        if t.is_valid((k,)):
            assert thin_translation_operator(t, (k,)).trace() == (6 if k % 3 == 0 else 0)


def test_thin_errors(thin_a2):
    with pytest.raises(InvalidPosition):
        thin_translation_operator(thin_a2, (1,))
    with pytest.raises(InvalidPosition):
        thin_translation_operator(thin_a2, (-1, 2))
    with pytest.raises(MalformedDocument):
        build_thin_quotient("A~2", [[1, 0], [2, 0]])
    with pytest.raises(MalformedDocument):
        build_thin_quotient("A2", [[1, 0], [0, 1]])
    with pytest.raises(MalformedDocument):
        load_thin_quotient({"type": "A~2"})


def test_product_law_detects_corruption(thin_a2):
    def bad(k):
        op = thin_translation_operator(thin_a2, k)
        if tuple(k) == (2, 2):
            return ChamberOperator(np.roll(op.matrix, 1, axis=0), op.chambers)
        return op
    assert not verify_product_law(bad, valid_positions(thin_a2, 2))["ok"]
