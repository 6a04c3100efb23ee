import numpy as np
import pytest
from hypothesis import strategies as st

from cgso.graph import from_edges
from cgso.verify import random_connected_graph


def complete(n):
    return from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def path(n):
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


@pytest.fixture
def k2():
    return complete(2)


@pytest.fixture
def k3():
    return complete(3)


@pytest.fixture
def p3():
    return path(3)


@pytest.fixture
def star3():
    return from_edges(4, [(0, 1), (0, 2), (0, 3)])


@st.composite
def graphs(draw, min_n=1, max_n=12):
    """Arbitrary simple graphs (possibly disconnected, possibly with isolated nodes)."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return from_edges(n, [p for p, keep in zip(pairs, mask) if keep])


@st.composite
def connected_graphs(draw, min_n=2, max_n=15):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_connected_graph(n, np.random.default_rng(seed))
