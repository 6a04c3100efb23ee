"""Node centralities and the diagonal matrices built from them."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .graph import Graph, degrees

KINDS = ("degree", "kcore", "pagerank", "walks")


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class CentralityError(ValueError):
    pass


@dataclass(frozen=True)
class CentralityVector:
    kind: str
    values: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown centrality kind {self.kind!r}")


def degree_vector(g: Graph) -> CentralityVector:
    return CentralityVector("degree", degrees(g).astype(np.int64))


def kcore_numbers(g: Graph) -> CentralityVector:
    """Core numbers by bucket peeling, O(n + m).

    Nodes are kept in an array sorted by current degree with ``bin_start``
    marking where each degree bucket begins; decrementing a neighbour's
    degree swaps it to the front of its bucket.
    """
    n = g.n
    deg = degrees(g).astype(np.int64).tolist()
    if n == 0:
        return CentralityVector("kcore", np.zeros(0, np.int64))
    max_deg = max(deg)
    counts = [0] * (max_deg + 1)
    for d in deg:
        counts[d] += 1
    bin_start = [0] * (max_deg + 1)
    acc = 0
    for d in range(max_deg + 1):
        bin_start[d] = acc
        acc += counts[d]
    pos = [0] * n
    order = [0] * n
    fill = bin_start[:]
    for v in range(n):
        pos[v] = fill[deg[v]]
        order[pos[v]] = v
        fill[deg[v]] += 1

    offsets = g.row_offsets.tolist()
    nbrs = g.neighbors.tolist()
    for i in range(n):
        v = order[i]
        dv = deg[v]
        for u in nbrs[offsets[v] : offsets[v + 1]]:
            du = deg[u]
            if du > dv:
                # swap u with the first node of its bucket, then shrink the bucket
                pu, pw = pos[u], bin_start[du]
                w = order[pw]
                if u != w:
                    order[pu], order[pw] = w, u
                    pos[u], pos[w] = pw, pu
                bin_start[du] += 1
                deg[u] = du - 1
    return CentralityVector("kcore", np.asarray(deg, dtype=np.int64))


def pagerank(
    g: Graph, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 1000
) -> CentralityVector:
    """Power iteration on the damped random walk.

    Mass sitting on isolated nodes is spread uniformly. Stops when the L1
    change between iterates drops below ``tol``.
    """
    if not 0 < damping < 1:
        raise ValueError("damping must lie in (0, 1)")
    n = g.n
    deg = degrees(g).astype(float)
    dangling = deg == 0
    inv_deg = np.where(dangling, 0.0, 1.0 / np.maximum(deg, 1))
    at = g.adjacency  # symmetric, so A^T x == A x
    x = np.full(n, 1.0 / n)
    residual = np.inf
    for _ in range(max_iter):
        spread = at @ (x * inv_deg)
        nxt = damping * (spread + x[dangling].sum() / n) + (1 - damping) / n
        nxt /= nxt.sum()
        residual = np.abs(nxt - x).sum()
        x = nxt
        if residual < tol:
            params = {"damping": damping, "tol": tol, "max_iter": max_iter}
            return CentralityVector("pagerank", x, params)
    raise ConvergenceError(f"PageRank did not converge in {max_iter} iterations", residual)


_INT_LIMIT = 2**62


def walk_counts(g: Graph, length: int = 2) -> CentralityVector:
    """Number of walks of ``length`` steps starting at each node, i.e. A^l 1.

    Accumulates in int64 and refuses to continue once a step could overflow.
    """
    if length < 1:
        raise ValueError("walk length must be >= 1")
    offsets, nbrs = g.row_offsets, g.neighbors
    max_deg = int(np.diff(offsets).max(initial=0))
    a = sp.csr_matrix((np.ones(len(nbrs), np.int64), nbrs, offsets), shape=(g.n, g.n))
    w = np.ones(g.n, dtype=np.int64)
    for step in range(length):
        if max_deg and int(w.max(initial=0)) > _INT_LIMIT // max_deg:
            raise OverflowError(
                f"walk counts overflow int64 at step {step + 1}; "
                "use floating accumulation (A^l 1 in float64) instead"
            )
        w = a @ w
    return CentralityVector("walks", w, {"length": length})


def compute(g: Graph, kind: str, **params) -> CentralityVector:
    """Dispatch by name: degree, kcore, pagerank, walks."""
    if kind == "degree":
        return degree_vector(g)
    if kind == "kcore":
        return kcore_numbers(g)
    if kind == "pagerank":
        return pagerank(g, **params)
    if kind == "walks":
        return walk_counts(g, **params)
    raise ValueError(f"unknown centrality {kind!r}; expected one of {KINDS}")


@dataclass(frozen=True, eq=False)
class DiagonalCentrality:
    """Strictly positive diagonal of V, with cached logs for real powers."""

    entries: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        bad = np.flatnonzero(~(e > 0) | ~np.isfinite(e))
        if len(bad):
            raise CentralityError(
                f"diagonal entry at node {int(bad[0])} is {e[bad[0]]}, must be > 0"
            )
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return len(self.entries)

    @cached_property
    def log(self) -> np.ndarray:
        out = np.log(self.entries)
        out.setflags(write=False)
        return out

    def power(self, e: float) -> np.ndarray:
        if e == 0:
            return np.ones(self.n)
        if e == 1:
            return self.entries.copy()
        if e == -1:
            return 1.0 / self.entries
        return np.exp(e * self.log)


def build_diagonal(c: CentralityVector) -> DiagonalCentrality:
    vals = np.asarray(c.values, dtype=float)
    if c.kind == "pagerank":
        if np.any(vals >= 1):
            i = int(np.flatnonzero(vals >= 1)[0])
            raise CentralityError(f"PageRank value {vals[i]} >= 1 at node {i}")
        vals = 1.0 / (1.0 - vals)
    zero = np.flatnonzero(vals <= 0)
    if len(zero):
        raise CentralityError(
            f"{c.kind} centrality is {vals[zero[0]]:g} at node {int(zero[0])} "
            "(isolated node?); restrict to the largest component first"
        )
    return DiagonalCentrality(vals, c.kind)


def centrality_diagonal(g: Graph, kind: str, **params) -> DiagonalCentrality:
    return build_diagonal(compute(g, kind, **params))
