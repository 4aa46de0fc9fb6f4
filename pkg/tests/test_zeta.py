import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from bldgzeta.complex import (build_thin_quotient, complete_bipartite, cycle_graph,
                              load_quotient_graph, load_thin_quotient, translation_operator)
from bldgzeta.poly import MultiPoly, RationalFunction, det_poly_matrix, series_expand
from bldgzeta.zeta import (direct_trace_series, faddeev_leverrier, geodesic_count_oracle,
                           lefschetz_check, reduce_resolvent, row_sum_multiplicativity,
                           s_function_probe, trace_list, zeta_closed_form,
                           zeta_closed_form_details)
from conftest import load_data

GRAPHS = ["k33.json", "k44.json", "cycle6.json", "heawood.json", "cube.json"]


def ihara_bass_traces(g, n):
    """tr T_k for k <= n from det(I - uB) = (1-u^2)^(|E|-|V|) det(I - uA + u^2 (D - I)).

    Uses only the adjacency matrix; tr T_k is half of tr B^(2k) on a bipartite graph.
    """
    u = sympy.symbols("u")
    nv = g.num_vertices
    a = sympy.zeros(nv, nv)
    for x, y in g.edges:
        a[x, y] += 1
        a[y, x] += 1
    d = sympy.diag(*[sum(a.row(i)) for i in range(nv)])
    det = (1 - u ** 2) ** (g.num_chambers - nv) * (sympy.eye(nv) - u * a + u ** 2 * (d - sympy.eye(nv))).det()
    # sum_m tr(B^m) u^m = -u d/du log det
    gen = sympy.series(-u * sympy.diff(det, u) / det, u, 0, 2 * n + 1).removeO()
    poly = sympy.Poly(gen, u)
    return [int(poly.coeff_monomial(u ** (2 * k))) // 2 for k in range(1, n + 1)]


def int_square(n):
    return st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n)


@given(st.integers(1, 5).flatmap(int_square))
def test_faddeev_matches_bareiss_and_sympy(rows):
    a = np.array(rows, dtype=np.int64)
    coeffs, mats = faddeev_leverrier(a)
    n = len(rows)
    z = MultiPoly.var(1, 0)
    m = [[MultiPoly.constant(1, int(i == j)) - z * int(rows[i][j]) for j in range(n)]
         for i in range(n)]
    assert det_poly_matrix(m) == MultiPoly.from_coeffs(coeffs)
    lam = sympy.symbols("x")
    ref = sympy.Matrix(rows).charpoly(lam).all_coeffs()
    assert [int(c) for c in ref] == coeffs
    # (I - zA) adj(I - zA) = det(I - zA) I, coefficientwise
    for t in range(n + 1):
        lhs = (mats[t] if t < n else 0) - (a @ mats[t - 1] if t >= 1 else 0)
        assert np.array_equal(np.asarray(lhs, dtype=object) * 1,
                              np.eye(n, dtype=object) * coeffs[t])


@given(st.integers(1, 4).flatmap(int_square))
def test_reduced_resolvent_is_same_function(rows):
    a = np.array(rows, dtype=np.int64)
    coeffs, mats = faddeev_leverrier(a)
    rc, rm = reduce_resolvent(coeffs, mats)
    assert rc[0] == 1
    n = len(rows)
    full_den = MultiPoly.from_coeffs(coeffs)
    red_den = MultiPoly.from_coeffs(rc)
    for i in range(n):
        for j in range(n):
            f = RationalFunction(MultiPoly.from_coeffs([int(m[i, j]) for m in mats]), full_den)
            g = RationalFunction(MultiPoly.from_coeffs([int(m[i, j]) for m in rm]), red_den)
            assert f == g


@pytest.mark.parametrize("name", GRAPHS)
def test_traces_match_ihara_bass(name):
    g = load_quotient_graph(load_data(name))
    assert trace_list(g, 6) == ihara_bass_traces(g, 6)


@pytest.mark.parametrize("name", GRAPHS)
def test_closed_form_series_matches_traces(name):
    g = load_quotient_graph(load_data(name))
    f = zeta_closed_form(g)
    assert series_expand(f, 10) == direct_trace_series(g, 10)
    assert zeta_closed_form(g, reduce=False) == f


def test_k33_closed_form():
    f = zeta_closed_form(complete_bipartite(3, 3))
    expected = RationalFunction(MultiPoly.from_coeffs([0, 0, 36, -72]),
                                MultiPoly.from_coeffs([1, -3, -6, 8]))
    assert f == expected


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_cycle_closed_form(m):
    f = zeta_closed_form(cycle_graph(2 * m))
    u_m = MultiPoly(1, {(m,): 1})
    assert f == RationalFunction(u_m * (2 * m), MultiPoly.constant(1) - u_m)


@pytest.mark.parametrize("tag,sub", [("A~2", [[2, 0], [0, 2]]), ("C~2", [[1, 0], [0, 1]]),
                                     ("G~2", [[2, 0], [0, 2]]), ("A~1", [[3]]),
                                     ("A~2", [[1, 1], [-1, 2]])])
def test_thin_closed_forms(tag, sub):
    t = build_thin_quotient(tag, sub)
    details = zeta_closed_form_details(t)
    assert len(details.residues) == details.index
    assert series_expand(details.function, 6) == direct_trace_series(t, 6)


def test_thin_a2_closed_form():
    t = load_thin_quotient(load_data("thin_a2.json"))
    f = zeta_closed_form(t)
    assert f.nvars == 2
    for d in (1, 2, 3):
        assert f.num.coeff((2 * d, 2 * d)) == 24
    assert series_expand(f, 12) == direct_trace_series(t, 12)


@pytest.mark.parametrize("name", GRAPHS)
def test_geodesic_oracle_matches_traces(name):
    g = load_quotient_graph(load_data(name))
    table = geodesic_count_oracle(g, 4)
    assert table.totals() == trace_list(g, 4)
    for k, classes in table.classes.items():
        for c in classes:
            assert k % c.primitive_k == 0
            assert len(c.representative) == 2 * k


def test_lefschetz_negative_control():
    g = complete_bipartite(3, 3)
    assert lefschetz_check(g, 5)["all_equal"]
    bad = lefschetz_check(g, 5, allow_tails=True)
    assert not bad["all_equal"] and bad["first_mismatch"] == 3


def test_s_probe():
    k33 = s_function_probe(complete_bipartite(3, 3), 5)
    assert k33["matching"] == "plain"
    assert s_function_probe(cycle_graph(6), 6)["matching"] == "both"
    assert s_function_probe(cycle_graph(6), 0)["matching"] == "vacuous"


def test_row_sums_multiply():
    g = load_quotient_graph(load_data("heawood.json"))
    rep = row_sum_multiplicativity(lambda k: translation_operator(g, k), 1, 2)
    assert rep["ok"] and rep["expected"] == 4 * 16


def test_unsupported_quotient():
    with pytest.raises(TypeError):
        direct_trace_series(object(), 3)
