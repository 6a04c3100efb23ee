"""Undirected simple graphs in CSR form, edge-list I/O and component queries."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp


class GraphParseError(ValueError):
    """Raised for malformed edge-list input; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _frozen(a, dtype=np.int64) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    Neighbour lists are sorted, duplicate-free and contain no self-loops.
    Use :func:`from_edges` rather than the raw constructor unless the CSR
    arrays are already canonical.
    """

    n: int
    row_offsets: np.ndarray
    neighbors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "row_offsets", _frozen(self.row_offsets))
        object.__setattr__(self, "neighbors", _frozen(self.neighbors))
        if self.row_offsets.shape != (self.n + 1,):
            raise ValueError("row_offsets must have length n + 1")
        if self.row_offsets[0] != 0 or np.any(np.diff(self.row_offsets) < 0):
            raise ValueError("row_offsets must start at 0 and be non-decreasing")
        if self.row_offsets[-1] != len(self.neighbors) or len(self.neighbors) % 2:
            raise ValueError("row_offsets[n] must equal 2 * edge count")

    @property
    def edge_count(self) -> int:
        """Number of unordered edges."""
        return len(self.neighbors) // 2

    def neighbors_of(self, i: int) -> np.ndarray:
        return self.neighbors[self.row_offsets[i] : self.row_offsets[i + 1]]

    def edges(self) -> np.ndarray:
        """Unordered edges as an (m, 2) array with u < v, sorted lexicographically."""
        rows = np.repeat(np.arange(self.n), np.diff(self.row_offsets))
        keep = rows < self.neighbors
        return np.stack([rows[keep], self.neighbors[keep]], axis=1)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Read-only scipy CSR view of the 0/1 adjacency matrix."""
        data = np.ones(len(self.neighbors))
        return sp.csr_matrix(
            (data, self.neighbors, self.row_offsets), shape=(self.n, self.n)
        )

    def dense_adjacency(self) -> np.ndarray:
        return self.adjacency.toarray()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.row_offsets, other.row_offsets)
            and np.array_equal(self.neighbors, other.neighbors)
        )

    def __hash__(self):
        return hash((self.n, self.neighbors.tobytes(), self.row_offsets.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"


def from_edges(n: int, edges) -> Graph:
    """Build a canonical Graph from an iterable of (u, v) pairs.

    Edges are symmetrised and deduplicated; self-loops are dropped silently.
    """
    e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                   dtype=np.int64).reshape(-1, 2)
    if len(e) and (e.min() < 0 or e.max() >= n):
        raise ValueError(f"edge endpoint out of range for n={n}")
    e = e[e[:, 0] != e[:, 1]]
    both = np.concatenate([e, e[:, ::-1]])
    if len(both):
        both = np.unique(both, axis=0)
    counts = np.bincount(both[:, 0], minlength=n) if len(both) else np.zeros(n, int)
    offsets = np.concatenate([[0], np.cumsum(counts)])
    return Graph(n, offsets, both[:, 1] if len(both) else np.zeros(0, np.int64))


def parse_edge_list(text: str) -> Graph:
    """Parse whitespace-separated ``u v`` lines.

    An optional first line ``# nodes N`` pins the node count and ids are
    used as given. Without it, ids are compacted to ``0..n-1`` in order of
    first appearance. Other ``#`` lines and blank lines are ignored.
    Self-loops are dropped and reported through a single warning.
    """
    n_fixed = None
    pairs = []
    dropped = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            tokens = line[1:].split()
            if tokens[:1] == ["nodes"]:
                if pairs or n_fixed is not None:
                    raise GraphParseError("node-count header must come first", lineno)
                if len(tokens) != 2 or not tokens[1].isdigit():
                    raise GraphParseError(f"bad header {line!r}", lineno)
                n_fixed = int(tokens[1])
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphParseError(f"expected 2 tokens, got {len(tokens)}", lineno)
        for tok in tokens:
            if not tok.isdigit():
                raise GraphParseError(f"not a non-negative integer: {tok!r}", lineno)
        u, v = int(tokens[0]), int(tokens[1])
        if n_fixed is not None and max(u, v) >= n_fixed:
            raise GraphParseError(f"node id {max(u, v)} >= declared n={n_fixed}", lineno)
        pairs.append((u, v))
        if u == v:
            dropped += 1

    if n_fixed is None:
        if not pairs:
            raise GraphParseError("no edges and no '# nodes N' header")
        ids: dict[int, int] = {}
        for u, v in pairs:
            ids.setdefault(u, len(ids))
            ids.setdefault(v, len(ids))
        pairs = [(ids[u], ids[v]) for u, v in pairs]
        n = len(ids)
    else:
        n = n_fixed

    if dropped:
        warnings.warn(f"dropped {dropped} self-loop(s)", stacklevel=2)
    return from_edges(n, pairs)


def serialize_edge_list(g: Graph) -> str:
    lines = [f"# nodes {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_edge_list(path) -> Graph:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_edge_list(g))


def degrees(g: Graph) -> np.ndarray:
    return np.diff(g.row_offsets)


@dataclass(frozen=True)
class ComponentLabels:
    labels: np.ndarray
    component_count: int


def connected_components(g: Graph) -> ComponentLabels:
    """BFS labelling; component ids follow the smallest node id they contain."""
    labels = np.full(g.n, -1, dtype=np.int64)
    count = 0
    for start in range(g.n):
        if labels[start] >= 0:
            continue
        labels[start] = count
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in g.neighbors_of(u):
                if labels[w] < 0:
                    labels[w] = count
                    queue.append(w)
        count += 1
    return ComponentLabels(_frozen(labels), count)


def induced_subgraph(g: Graph, nodes) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``nodes`` (kept in ascending order).

    Returns the subgraph and an old->new index map with -1 for dropped nodes.
    """
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    index_map = np.full(g.n, -1, dtype=np.int64)
    index_map[nodes] = np.arange(len(nodes))
    e = g.edges()
    keep = (index_map[e[:, 0]] >= 0) & (index_map[e[:, 1]] >= 0)
    return from_edges(len(nodes), index_map[e[keep]]), index_map


def largest_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest component.

    Ties go to the component holding the smallest node id, which is the one
    with the smallest label since labels follow discovery order.
    """
    if g.n < 1:
        raise ValueError("empty graph")
    comp = connected_components(g)
    sizes = np.bincount(comp.labels, minlength=comp.component_count)
    best = int(np.argmax(sizes))
    return induced_subgraph(g, np.flatnonzero(comp.labels == best))
