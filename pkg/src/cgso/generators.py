"""Barabási–Albert graphs and stochastic block models built from BA blocks."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import Graph, from_edges
from .rng import stream


@dataclass(frozen=True)
class BaParams:
    n: int
    n0: int
    r0: int
    r: int
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.n0 < self.n:
            raise ValueError(f"need 0 < n0 < n, got n0={self.n0}, n={self.n}")
        cap = self.n0 * (self.n0 - 1) // 2
        if not 0 <= self.r0 <= cap:
            raise ValueError(f"r0={self.r0} exceeds simple-graph capacity {cap} of the seed")
        if not 1 <= self.r <= self.n0:
            raise ValueError(f"need 1 <= r <= n0, got r={self.r}, n0={self.n0}")


def expected_avg_degree(n: int, n0: int, r0: int, r: int) -> float:
    return 2 * r + 2 * r0 / n - 2 * n0 * r / n


def _ba_edges(p: BaParams, rng: np.random.Generator) -> np.ndarray:
    n, n0, r = p.n, p.n0, p.r
    iu, ju = np.triu_indices(n0, k=1)
    pick = rng.choice(len(iu), size=p.r0, replace=False)
    seed_edges = np.stack([iu[pick], ju[pick]], axis=1)

    deg = np.zeros(n, dtype=float)
    np.add.at(deg, seed_edges.ravel(), 1)
    edges = [seed_edges]
    for new in range(n0, n):
        weights = deg[:new]
        positive = np.flatnonzero(weights > 0)
        if len(positive) >= r:
            targets = rng.choice(new, size=r, replace=False, p=weights / weights.sum())
        else:
            # too few nodes carry degree: take all of them, fill uniformly from the rest
            zero = np.flatnonzero(weights == 0)
            fill = rng.choice(zero, size=r - len(positive), replace=False)
            targets = np.concatenate([positive, fill])
        deg[targets] += 1
        deg[new] += r
        edges.append(np.stack([np.full(r, new), targets], axis=1))
    return np.concatenate(edges).astype(np.int64)


def generate_ba(p: BaParams) -> Graph:
    """Preferential attachment without replacement.

    The seed graph has r0 distinct uniform edges on n0 nodes; every later
    node links to r distinct existing nodes drawn proportionally to degree,
    so the result has exactly r0 + r (n - n0) edges.
    """
    return from_edges(p.n, _ba_edges(p, stream(p.seed, "ba")))


@dataclass(frozen=True)
class SbbamParams:
    block_sizes: tuple
    r_per_block: tuple
    inter_p: np.ndarray | float = 0.1
    n0: tuple | None = None
    r0: tuple | None = None
    seed: int = 0
    _p: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        k = len(self.block_sizes)
        if k < 1 or len(self.r_per_block) != k:
            raise ValueError("need at least one block and one r per block")
        p = np.asarray(self.inter_p, dtype=float)
        if p.ndim == 0:
            p = np.full((k, k), float(p))
        if p.shape != (k, k) or not np.allclose(p, p.T):
            raise ValueError("inter_p must be a scalar or a symmetric KxK matrix")
        off = p[~np.eye(k, dtype=bool)]
        if np.any((off < 0) | (off > 1)):
            raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "_p", p)
        for name in ("n0", "r0"):
            val = getattr(self, name)
            if val is not None and len(val) != k:
                raise ValueError(f"{name} needs one entry per block")

    def block_params(self) -> list[BaParams]:
        out = []
        for b, (size, r) in enumerate(zip(self.block_sizes, self.r_per_block)):
            n0 = self.n0[b] if self.n0 else max(r, 5)
            r0 = self.r0[b] if self.r0 else n0 - 1
            out.append(BaParams(int(size), int(n0), int(r0), int(r), self.seed))
        return out

    def metadata(self) -> dict:
        return {
            "block_sizes": [int(s) for s in self.block_sizes],
            "r_per_block": [int(r) for r in self.r_per_block],
            "inter_p": self._p.tolist(),
            "seed": int(self.seed),
            "blocks": [asdict(b) for b in self.block_params()],
        }


def generate_sbbam(p: SbbamParams) -> tuple[Graph, np.ndarray]:
    """Independent BA blocks on consecutive node ranges plus Bernoulli cross edges.

    Returns the graph and the block label of every node.
    """
    sizes = [int(s) for s in p.block_sizes]
    starts = np.concatenate([[0], np.cumsum(sizes)])
    edges = []
    for b, bp in enumerate(p.block_params()):
        edges.append(_ba_edges(bp, stream(p.seed, "block", b)) + starts[b])
    rng = stream(p.seed, "cross")
    for i in range(len(sizes)):
        for j in range(i + 1, len(sizes)):
            hit = rng.random((sizes[i], sizes[j])) < p._p[i, j]
            u, v = np.nonzero(hit)
            edges.append(np.stack([u + starts[i], v + starts[j]], axis=1))
    labels = np.repeat(np.arange(len(sizes)), sizes)
    return from_edges(int(starts[-1]), np.concatenate(edges)), labels
