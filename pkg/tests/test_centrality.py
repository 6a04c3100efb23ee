import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgso.centrality import (CentralityError, CentralityVector, DiagonalCentrality,
                             build_diagonal, centrality_diagonal, compute, degree_vector,
                             kcore_numbers, pagerank, walk_counts)
from cgso.graph import from_edges

from conftest import complete, connected_graphs, graphs, path


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges().tolist())
    return h


# k-core

def test_kcore_examples(k3, p3):
    assert kcore_numbers(k3).values.tolist() == [2, 2, 2]
    assert kcore_numbers(p3).values.tolist() == [1, 1, 1]
    k4_minus = from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    assert kcore_numbers(k4_minus).values.tolist() == [2, 2, 2, 2]


def test_kcore_isolated_node_is_zero():
    assert kcore_numbers(from_edges(3, [(0, 1)])).values.tolist() == [1, 1, 0]


@given(graphs(max_n=14))
def test_kcore_matches_networkx(g):
    ref = nx.core_number(to_nx(g))
    assert kcore_numbers(g).values.tolist() == [ref[i] for i in range(g.n)]


@given(graphs(max_n=14))
def test_kcore_bounded_by_degree(g):
    assert np.all(kcore_numbers(g).values <= degree_vector(g).values)


# PageRank

def test_pagerank_regular_is_uniform(k2, k3):
    assert np.allclose(pagerank(k2).values, [0.5, 0.5], atol=1e-9)
    assert np.allclose(pagerank(k3).values, [1 / 3] * 3, atol=1e-9)


def test_pagerank_star_closed_form(star3):
    # exact fixed point on the 3-leaf star: centre (1+3d)/(4(1+d)), leaves share the rest
    d = 0.85
    centre = (1 + 3 * d) / (4 * (1 + d))
    pr = pagerank(star3, damping=d).values
    assert pr[0] == pytest.approx(centre, abs=1e-9)
    assert np.allclose(pr[1:], (1 - centre) / 3, atol=1e-9)
    assert centre == pytest.approx(0.479730, abs=1e-6)


@settings(max_examples=40)
@given(graphs(max_n=12), st.floats(0.5, 0.95))
def test_pagerank_matches_networkx(g, d):
    ref = nx.pagerank(to_nx(g), alpha=d, tol=1e-13, max_iter=5000)
    assert np.allclose(pagerank(g, damping=d).values, [ref[i] for i in range(g.n)], atol=1e-8)


@given(graphs(max_n=12))
def test_pagerank_is_distribution(g):
    pr = pagerank(g).values
    assert pr.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(pr > 0)


@settings(max_examples=40)
@given(connected_graphs(max_n=12), st.randoms(use_true_random=False))
def test_pagerank_relabel_equivariant(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    perm = np.array(perm)
    h = from_edges(g.n, perm[g.edges()])
    assert np.allclose(pagerank(h).values[perm], pagerank(g).values, atol=1e-9)


def test_pagerank_rejects_bad_damping(k3):
    with pytest.raises(ValueError):
        pagerank(k3, damping=1.0)


# walks

def test_walks_examples(p3, k3):
    assert walk_counts(p3, 1).values.tolist() == [1, 2, 1]
    assert walk_counts(p3, 2).values.tolist() == [2, 2, 2]
    assert walk_counts(k3, 3).values.tolist() == [8, 8, 8]


@given(graphs(max_n=12), st.integers(1, 5))
def test_walks_recurrence(g, length):
    a = g.dense_adjacency().astype(np.int64)
    expected = np.linalg.matrix_power(a, length) @ np.ones(g.n, dtype=np.int64)
    assert walk_counts(g, length).values.tolist() == expected.tolist()


@pytest.mark.parametrize("n, length", [(4, 3), (6, 2), (5, 4)])
def test_walks_regular(n, length):
    assert np.all(walk_counts(complete(n), length).values == (n - 1) ** length)


def test_walks_overflow_is_detected():
    with pytest.raises(OverflowError):
        walk_counts(complete(40), 13)


def test_walks_rejects_zero_length(k3):
    with pytest.raises(ValueError):
        walk_counts(k3, 0)


# diagonal construction

def test_compute_dispatch(p3):
    assert compute(p3, "degree").values.tolist() == [1, 2, 1]
    assert compute(p3, "walks", length=1).values.tolist() == [1, 2, 1]
    with pytest.raises(ValueError, match="unknown centrality"):
        compute(p3, "betweenness")


def test_pagerank_diagonal_is_one_over_complement(star3):
    pr = pagerank(star3).values
    v = centrality_diagonal(star3, "pagerank")
    assert np.allclose(v.entries, 1 / (1 - pr))


def test_isolated_node_rejected_with_node_index():
    g = from_edges(3, [(0, 1)])
    for kind in ("degree", "kcore", "walks"):
        with pytest.raises(CentralityError, match="node 2"):
            centrality_diagonal(g, kind)


def test_pagerank_value_one_rejected():
    with pytest.raises(CentralityError):
        build_diagonal(CentralityVector("pagerank", np.array([1.0])))


@pytest.mark.parametrize("bad", [[1.0, 0.0], [1.0, -2.0], [np.inf, 1.0], [np.nan, 1.0]])
def test_diagonal_requires_positive_finite(bad):
    with pytest.raises(CentralityError):
        DiagonalCentrality(np.array(bad))


@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=10),
       st.floats(-3, 3, allow_nan=False))
def test_power_matches_numpy(vals, e):
    v = DiagonalCentrality(np.array(vals))
    assert np.allclose(v.power(e), np.array(vals) ** e, rtol=1e-12)


def test_power_exact_paths():
    v = DiagonalCentrality(np.array([2.0, 3.0]))
    assert v.power(0).tolist() == [1.0, 1.0]
    assert v.power(1).tolist() == [2.0, 3.0]
    assert v.power(-1).tolist() == [0.5, 1 / 3]


def test_path_degree_walks_agree_for_length_one():
    g = path(6)
    assert np.array_equal(walk_counts(g, 1).values, degree_vector(g).values)
