import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgso.generators import BaParams, SbbamParams, expected_avg_degree, generate_ba, generate_sbbam
from cgso.graph import connected_components, degrees


@st.composite
def ba_params(draw, max_n=120):
    n0 = draw(st.integers(1, 8))
    n = draw(st.integers(n0 + 1, max_n))
    r0 = draw(st.integers(0, n0 * (n0 - 1) // 2))
    r = draw(st.integers(1, n0))
    return BaParams(n, n0, r0, r, draw(st.integers(0, 2**63 - 1)))


def test_average_degree_example():
    p = BaParams(100, 5, 3, 5, seed=1)
    g = generate_ba(p)
    assert g.edge_count == 478
    assert 2 * g.edge_count / g.n == pytest.approx(9.56, abs=1e-12)
    assert expected_avg_degree(100, 5, 3, 5) == pytest.approx(9.56, abs=1e-12)


def test_average_degree_full_seed():
    assert expected_avg_degree(6, 5, 10, 1) == pytest.approx(11 / 3, abs=1e-12)
    g = generate_ba(BaParams(6, 5, 10, 1))
    assert g.edge_count == 11
    assert 2 * g.edge_count / 6 == pytest.approx(11 / 3, abs=1e-12)


def test_single_arrival():
    assert generate_ba(BaParams(4, 3, 0, 1)).edge_count == 1


def test_asymptote():
    assert abs(expected_avg_degree(10**6, 5, 0, 5) - 10) < 1e-3 * 10


@settings(max_examples=60)
@given(ba_params())
def test_edge_count_identity(p):
    g = generate_ba(p)
    assert g.edge_count == p.r0 + p.r * (p.n - p.n0)
    assert abs(2 * g.edge_count / p.n - expected_avg_degree(p.n, p.n0, p.r0, p.r)) < 1e-12
    # every arrival has degree at least r
    assert np.all(degrees(g)[p.n0:] >= p.r)


@settings(max_examples=20)
@given(ba_params(max_n=60))
def test_ba_deterministic(p):
    assert generate_ba(p) == generate_ba(p)


def test_different_seeds_differ():
    a = generate_ba(BaParams(200, 5, 4, 3, seed=1))
    b = generate_ba(BaParams(200, 5, 4, 3, seed=2))
    assert a != b


def test_attachment_is_degree_proportional():
    # seed is a path on 3 nodes; the arrival should hit the middle node half the time
    hits, trials = 0, 2000
    for s in range(trials):
        g = generate_ba(BaParams(4, 3, 2, 1, seed=s))
        seed_deg = degrees(g)[:3].copy()
        target = int(g.neighbors_of(3)[0])
        seed_deg[target] -= 1
        hits += seed_deg[target] == 2
    sigma = math.sqrt(trials * 0.25)
    assert abs(hits - trials / 2) < 4 * sigma


@pytest.mark.parametrize("kwargs", [
    dict(n=5, n0=5, r0=0, r=1),
    dict(n=10, n0=4, r0=7, r=1),
    dict(n=10, n0=4, r0=0, r=5),
    dict(n=10, n0=4, r0=0, r=0),
])
def test_ba_validation(kwargs):
    with pytest.raises(ValueError):
        BaParams(**kwargs)


def test_sbbam_single_block_is_ba():
    g, labels = generate_sbbam(SbbamParams((50,), (3,), 0.2, seed=4))
    assert np.all(labels == 0)
    assert g.edge_count == 4 + 3 * 45  # n0 = 5, r0 = 4


def test_sbbam_zero_probability_disconnects():
    g, labels = generate_sbbam(SbbamParams((30, 40), (2, 3), 0.0, seed=0))
    e = g.edges()
    assert np.all(labels[e[:, 0]] == labels[e[:, 1]])
    # a seed node left isolated keeps zero attachment weight, so a block may
    # split further, but no component ever spans two blocks
    comp = connected_components(g)
    assert comp.component_count >= 2
    for c in range(comp.component_count):
        assert len(set(labels[comp.labels == c].tolist())) == 1


def test_sbbam_cross_edge_count():
    p = SbbamParams((100, 100, 100), (5, 10, 15), 0.1, seed=11)
    g, labels = generate_sbbam(p)
    e = g.edges()
    mean, sigma = 1000, math.sqrt(100 * 100 * 0.1 * 0.9)
    for i in range(3):
        for j in range(i + 1, 3):
            count = np.sum(((labels[e[:, 0]] == i) & (labels[e[:, 1]] == j))
                           | ((labels[e[:, 0]] == j) & (labels[e[:, 1]] == i)))
            assert abs(count - mean) < 4 * sigma
    within = sum(b.r0 + b.r * (b.n - b.n0) for b in p.block_params())
    assert np.sum(labels[e[:, 0]] == labels[e[:, 1]]) == within


def test_sbbam_labels_contiguous():
    _, labels = generate_sbbam(SbbamParams((3 + 7, 12, 9), (2, 2, 1), 0.05, seed=2))
    assert labels.tolist() == [0] * 10 + [1] * 12 + [2] * 9


def test_sbbam_defaults_and_metadata():
    p = SbbamParams((100, 100), (3, 10), 0.1)
    assert [(b.n0, b.r0) for b in p.block_params()] == [(5, 4), (10, 9)]
    meta = p.metadata()
    assert meta["blocks"][1]["n0"] == 10
    assert meta["inter_p"] == [[0.1, 0.1], [0.1, 0.1]]


def test_sbbam_deterministic():
    p = SbbamParams((40, 40), (3, 4), 0.1, seed=9)
    (a, la), (b, lb) = generate_sbbam(p), generate_sbbam(p)
    assert a == b and np.array_equal(la, lb)


def test_sbbam_matrix_probabilities():
    p = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    g, labels = generate_sbbam(SbbamParams((10, 10, 10), (2, 2, 2), p, seed=0))
    e = g.edges()
    cross = labels[e[:, 0]] != labels[e[:, 1]]
    assert cross.sum() == 100
    # block 2 receives no cross edges
    assert not np.any(cross & ((labels[e[:, 0]] == 2) | (labels[e[:, 1]] == 2)))


@pytest.mark.parametrize("kwargs", [
    dict(block_sizes=(), r_per_block=()),
    dict(block_sizes=(10,), r_per_block=(2, 3)),
    dict(block_sizes=(10, 10), r_per_block=(2, 2), inter_p=1.5),
    dict(block_sizes=(10, 10), r_per_block=(2, 2), inter_p=np.array([[0, 0.1], [0.2, 0]])),
])
def test_sbbam_validation(kwargs):
    with pytest.raises(ValueError):
        SbbamParams(**kwargs)
