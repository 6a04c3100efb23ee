import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgso.centrality import KINDS, DiagonalCentrality, centrality_diagonal
from cgso.graph import from_edges
from cgso.operators import CgsoParams, build_parametrized, markov_operator
from cgso.spectral import (SpectralError, analytic_moments, cgso_eigs, cheeger_bruteforce,
                           closed_form_mean, eig_symmetric, eigenvalue_bounds,
                           markov_eigenvalues, spectral_gap, spectral_report)
from cgso.verify import random_connected_graph

from conftest import complete, connected_graphs, path


def jacobi_eigvals(m, sweeps=100):
    """Cyclic Jacobi rotations; an oracle independent of LAPACK."""
    a = np.array(m, dtype=float)
    n = len(a)
    for _ in range(sweeps):
        off = np.sqrt((np.triu(a, 1) ** 2).sum())
        if off < 1e-14:
            break
        for p in range(n):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                r = np.eye(n)
                r[p, p] = r[q, q] = c
                r[p, q], r[q, p] = s, -s
                a = r.T @ a @ r
    return np.sort(np.diag(a))


def degree(g):
    return centrality_diagonal(g, "degree")


# eig_symmetric

def test_eig_symmetric_diagonal():
    vals, vecs = eig_symmetric(np.diag([3.0, 1.0, 2.0]))
    assert vals.tolist() == [1, 2, 3]
    assert np.allclose(np.abs(vecs), [[0, 0, 1], [1, 0, 0], [0, 1, 0]])


def test_eig_symmetric_small_graphs(k2, p3):
    assert np.allclose(eig_symmetric(k2.dense_adjacency())[0], [-1, 1])
    r = math.sqrt(2)
    assert np.allclose(eig_symmetric(p3.dense_adjacency())[0], [-r, 0, r])


def test_eig_symmetric_rejects_asymmetric():
    with pytest.raises(SpectralError, match="asymmetry"):
        eig_symmetric(np.array([[0.0, 1.0], [0.5, 0.0]]))


@settings(max_examples=30)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_eig_symmetric_contract(n, seed):
    x = np.random.default_rng(seed).normal(size=(n, n))
    m = x + x.T
    vals, vecs = eig_symmetric(m)
    assert np.all(np.diff(vals) >= 0)
    assert np.allclose(vecs.T @ vecs, np.eye(n), atol=1e-8)
    resid = np.abs(m @ vecs - vecs * vals).max()
    assert resid <= 1e-8 * np.abs(m).sum(1).max()
    assert np.allclose(vals, jacobi_eigvals(m), atol=1e-9)


# cgso_eigs

def test_cgso_eigs_identity_exponents():
    g = random_connected_graph(8, np.random.default_rng(3))
    vals, _ = cgso_eigs(g, degree(g), 0.0, 0.0)
    assert np.allclose(vals, jacobi_eigvals(g.dense_adjacency()), atol=1e-10)


def test_markov_k3(k3):
    assert np.allclose(markov_eigenvalues(k3, degree(k3)), [-0.5, -0.5, 1])


def test_walks_p3_markov(p3):
    v = centrality_diagonal(p3, "walks", length=2)
    assert v.entries.tolist() == [2, 2, 2]
    r = math.sqrt(2) / 2
    assert np.allclose(markov_eigenvalues(p3, v), [-r, 0, r])


def test_markov_fixes_constants():
    g = random_connected_graph(9, np.random.default_rng(1))
    assert np.allclose(markov_operator(g, degree(g)).apply(np.ones(9)), 1)


def test_cgso_eigs_matches_general_solver():
    g = random_connected_graph(10, np.random.default_rng(10))
    v = centrality_diagonal(g, "pagerank")
    m = build_parametrized(g, v, CgsoParams(m2=1, e2=-1.5, e3=0.7)).materialize_dense()
    direct = np.linalg.eigvals(m)
    assert np.abs(direct.imag).max() < 1e-8
    vals, _ = cgso_eigs(g, v, -1.5, 0.7)
    assert np.allclose(np.sort(direct.real), vals, atol=1e-8)


@settings(max_examples=30)
@given(connected_graphs(max_n=10), st.floats(-2, 2), st.floats(-2, 2),
       st.sampled_from(KINDS))
def test_cgso_eigenpairs_are_eigenpairs(g, e2, e3, kind):
    v = centrality_diagonal(g, kind)
    m = build_parametrized(g, v, CgsoParams(m2=1, e2=e2, e3=e3)).materialize_dense()
    vals, vecs = cgso_eigs(g, v, e2, e3)
    assert np.allclose(np.linalg.norm(vecs, axis=0), 1)
    scale = max(1.0, np.abs(m).max())
    assert np.abs(m @ vecs - vecs * vals).max() < 1e-7 * scale


# moments

@pytest.mark.parametrize("g, v, sigma", [
    (complete(3), None, math.sqrt(0.5)),
    (complete(2), None, 1.0),
    (path(3), DiagonalCentrality(np.full(3, 2.0)), 1 / math.sqrt(3)),
])
def test_moment_examples(g, v, sigma):
    v = v or degree(g)
    mu, s = analytic_moments(g, v)
    assert mu == 0.0
    assert s == pytest.approx(sigma, abs=1e-12)


@settings(max_examples=30)
@given(connected_graphs(max_n=12), st.sampled_from(KINDS))
def test_moments_match_spectrum(g, kind):
    v = centrality_diagonal(g, kind)
    eigs = markov_eigenvalues(g, v)
    mu, sigma = analytic_moments(g, v)
    assert abs(mu - eigs.mean()) < 1e-10
    assert abs(sigma - eigs.std()) < 1e-10


def test_closed_form_mean_differs_without_self_loops(k3):
    # (1/n) sum 1/v equals the trace mean only when every A_ii = 1
    assert closed_form_mean(degree(k3)) == pytest.approx(0.5)
    a = k3.dense_adjacency() + np.eye(3)
    assert np.trace(a / 2) / 3 == pytest.approx(closed_form_mean(degree(k3)))


# spectral gap

@pytest.mark.parametrize("g, gap", [(complete(3), 1.5), (complete(2), 2.0), (path(3), 1.0)])
def test_gap_examples(g, gap):
    assert spectral_gap(g, degree(g)) == pytest.approx(gap, abs=1e-12)


def test_gap_matches_normalized_laplacian():
    g = random_connected_graph(12, np.random.default_rng(5))
    h = nx.from_edgelist(g.edges().tolist())
    lap = np.sort(nx.normalized_laplacian_spectrum(h))
    assert spectral_gap(g, degree(g)) == pytest.approx(lap[1], abs=1e-10)


def test_gap_degenerate_errors(k2):
    with pytest.raises(SpectralError):
        spectral_gap(k2, degree(k2), zero_tol=10.0)


# bounds

def test_bounds_examples(k3):
    b = eigenvalue_bounds(k3, degree(k3))
    assert (b.gamma, b.gershgorin) == (1.0, 1.0)
    assert b.spectral_radius == pytest.approx(1.0)

    b = eigenvalue_bounds(k3, DiagonalCentrality(np.full(3, 4.0)))
    assert (b.gamma, b.gershgorin) == (2.0, 0.5)
    assert b.spectral_radius == pytest.approx(0.5)

    b = eigenvalue_bounds(k3, DiagonalCentrality(np.ones(3)))
    assert (b.gamma, b.gershgorin) == (0.5, 2.0)
    assert b.spectral_radius == pytest.approx(2.0)
    assert b.spectral_radius > b.gamma  # gamma bound fails below 1


@settings(max_examples=30)
@given(connected_graphs(max_n=12), st.sampled_from(KINDS))
def test_bounds_hold(g, kind):
    b = eigenvalue_bounds(g, centrality_diagonal(g, kind))
    assert b.spectral_radius <= b.gershgorin + 1e-8
    if b.gamma >= 1:
        assert b.spectral_radius <= b.gamma + 1e-8


def test_bounds_reject_isolated():
    with pytest.raises(SpectralError, match="isolated node 2"):
        eigenvalue_bounds(from_edges(3, [(0, 1)]), DiagonalCentrality(np.ones(3)))


def test_report_fields(k3):
    r = spectral_report(k3, degree(k3))
    assert r.eigenvalues == pytest.approx([1, -0.5, -0.5])
    assert r.spectral_gap_lambda1 == pytest.approx(1.5)
    assert r.connected and r.analytic_mean == 0.0


def test_report_disconnected_has_no_gap_error():
    g = from_edges(4, [(0, 1), (2, 3)])
    r = spectral_report(g, degree(g))
    assert not r.connected
    assert r.eigenvalues[:2] == pytest.approx([1, 1])


# Cheeger

def cheeger_oracle(g, v):
    n, vals = g.n, v.entries
    total = vals.sum()
    adj = g.dense_adjacency()
    best_e = best_v = math.inf
    for size in range(1, n):
        for u in itertools.combinations(range(n), size):
            w = vals[list(u)].sum()
            if w > total / 2 + 1e-12:
                continue
            inside = np.zeros(n, bool)
            inside[list(u)] = True
            cut = adj[inside][:, ~inside]
            best_e = min(best_e, cut.sum() / w)
            best_v = min(best_v, (cut.sum(0) > 0).sum() / w)
    return best_e, best_v


def test_cheeger_k2(k2):
    r = cheeger_bruteforce(k2, degree(k2))
    assert r.h_v_edge == 1.0
    assert r.lambda1 == pytest.approx(2.0)
    assert r.bound_rhs_edge == pytest.approx(4.0)
    assert r.holds_edge and r.holds_vertex


def test_cheeger_k3(k3):
    r = cheeger_bruteforce(k3, degree(k3))
    assert r.h_v_edge == 1.0
    assert r.lambda1 == pytest.approx(1.5)
    assert r.bound_rhs_edge == pytest.approx(12.0)
    assert r.holds_edge


def test_cheeger_p3(p3):
    r = cheeger_bruteforce(p3, degree(p3))
    assert r.h_v_edge == 1.0
    assert r.h_v_vertex == 0.5  # U = {0, 2} has one outside neighbour and weight 2
    assert r.argmin_vertex == [0, 2]
    assert r.lambda1 == pytest.approx(1.0)


@settings(max_examples=25)
@given(connected_graphs(max_n=8), st.sampled_from(KINDS))
def test_cheeger_matches_oracle(g, kind):
    v = centrality_diagonal(g, kind)
    r = cheeger_bruteforce(g, v)
    e, vert = cheeger_oracle(g, v)
    assert r.h_v_edge == pytest.approx(e, rel=1e-12)
    assert r.h_v_vertex == pytest.approx(vert, rel=1e-12)
    assert r.holds_edge


def test_cheeger_preconditions():
    with pytest.raises(SpectralError, match="too large"):
        cheeger_bruteforce(path(17), degree(path(17)))
    g = from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(SpectralError, match="connected"):
        cheeger_bruteforce(g, degree(g))
