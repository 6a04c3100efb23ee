"""Spectral clustering on shift-operator eigenvectors, k-means, AMI and ARI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .centrality import DiagonalCentrality
from .graph import Graph
from .rng import derive_seed, stream
from .spectral import cgso_eigs


@dataclass(frozen=True, eq=False)
class Partition:
    labels: np.ndarray
    k: int

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Relabel to contiguous ids 0..k-1 in order of first appearance."""
        _, first, inv = np.unique(np.asarray(labels), return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first)] = np.arange(len(first))
        lab = rank[inv]
        lab.setflags(write=False)
        return cls(lab, len(first))

    def __len__(self):
        return len(self.labels)


def _as_labels(p) -> np.ndarray:
    return p.labels if isinstance(p, Partition) else np.asarray(p)


# ---------------------------------------------------------------- k-means


@dataclass(frozen=True)
class KMeansResult:
    partition: Partition
    centers: np.ndarray
    inertia: float


def _sq_dists(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    d = (x * x).sum(1)[:, None] - 2 * x @ c.T + (c * c).sum(1)[None, :]
    return np.maximum(d, 0.0)


def _kmeanspp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    centers = [x[rng.integers(n)]]
    closest = _sq_dists(x, centers[0][None])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        idx = rng.choice(n, p=closest / total) if total > 0 else rng.integers(n)
        centers.append(x[idx])
        closest = np.minimum(closest, _sq_dists(x, x[idx][None])[:, 0])
    return np.array(centers)


def _lloyd(x, centers, max_iter, tol):
    k = len(centers)
    for _ in range(max_iter):
        d = _sq_dists(x, centers)
        labels = d.argmin(1)
        if len(np.unique(labels)) < k:
            labels = _repair(d, labels, k)
        counts = np.bincount(labels, minlength=k)
        new = np.zeros_like(centers)
        np.add.at(new, labels, x)
        new /= counts[:, None]
        shift = float(((new - centers) ** 2).sum())
        centers = new
        if shift <= tol:
            break
    d = _sq_dists(x, centers)
    labels = d.argmin(1)
    if len(np.unique(labels)) < k:
        # reassignment after the final update emptied a cluster; keep last valid labels
        labels = _repair(d, labels, k)
    inertia = float(d[np.arange(len(x)), labels].sum())
    return labels, centers, inertia


def _repair(d, labels, k):
    """Fill each empty cluster with the point farthest from its centre,
    taken only from clusters that keep at least one member."""
    labels = labels.copy()
    for empty in range(k):
        if not np.any(labels == empty):
            counts = np.bincount(labels, minlength=k)
            own = d[np.arange(len(labels)), labels].copy()
            own[counts[labels] <= 1] = -1.0
            labels[int(own.argmax())] = empty
    return labels


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    n_init: int = 10,
    max_iter: int = 300,
    tol: float = 1e-10,
) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding; best of ``n_init`` by inertia."""
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = len(x)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    best = None
    for run in range(n_init):
        rng = stream(seed, "kmeans", run)
        labels, centers, inertia = _lloyd(x, _kmeanspp(x, k, rng), max_iter, tol)
        if best is None or inertia < best[2] - 1e-12:
            best = (labels, centers, inertia)
    labels, centers, inertia = best
    return KMeansResult(Partition(labels.astype(np.int64), k), centers, inertia)


# ---------------------------------------------------------------- scores


def contingency(a, b) -> np.ndarray:
    la, lb = _as_labels(a), _as_labels(b)
    if len(la) != len(lb):
        raise ValueError(f"partition lengths differ: {len(la)} vs {len(lb)}")
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    table = np.zeros((ia.max(initial=-1) + 1, ib.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def mutual_information(table: np.ndarray) -> float:
    n = table.sum()
    nz = table > 0
    outer = np.outer(table.sum(1), table.sum(0))
    return float((table[nz] / n * np.log(table[nz] * n / outer[nz])).sum())


def expected_mutual_information(row: np.ndarray, col: np.ndarray) -> float:
    """E[MI] when labels are permuted at random with fixed cluster sizes.

    Sums over the hypergeometric distribution of every contingency cell,
    with probabilities from log-factorial tables.
    """
    n = int(row.sum())
    lf = gammaln(np.arange(n + 2))  # lf[k] = log((k-1)!) ; use lf[k+1] = log k!
    logfact = lambda k: lf[k + 1]  # noqa: E731
    emi = 0.0
    for a in row:
        for b in col:
            lo, hi = max(1, a + b - n), min(a, b)
            if lo > hi:
                continue
            nij = np.arange(lo, hi + 1)
            log_p = (
                logfact(a) + logfact(b) + logfact(n - a) + logfact(n - b)
                - logfact(n) - logfact(nij) - logfact(a - nij) - logfact(b - nij)
                - logfact(n - a - b + nij)
            )
            term = nij / n * np.log(n * nij / (a * b))
            emi += float((term * np.exp(log_p)).sum())
    return emi


def ami(a, b) -> float:
    """Adjusted mutual information, max-entropy normalisation."""
    table = contingency(a, b)
    r, c = table.shape
    n = int(table.sum())
    if (r == c == 1) or (r == c == n):
        return 1.0
    row, col = table.sum(1), table.sum(0)
    mi = mutual_information(table)
    emi = expected_mutual_information(row, col)
    denom = max(_entropy(row), _entropy(col)) - emi
    if abs(denom) < 1e-15:
        return 1.0 if _same_partition(table) else 0.0
    return (mi - emi) / denom


def _same_partition(table: np.ndarray) -> bool:
    return table.shape[0] == table.shape[1] == int((table > 0).sum())


def _pairs(x):
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def ari(a, b) -> float:
    """Adjusted Rand index from the pair-counting contingency table.

    When Max == Expected (both partitions trivial) the index is undefined;
    1.0 is returned for identical partitions and 0.0 otherwise.
    """
    table = contingency(a, b)
    n = int(table.sum())
    index = int(_pairs(table).sum())
    sa, sb = int(_pairs(table.sum(1)).sum()), int(_pairs(table.sum(0)).sum())
    total = n * (n - 1) // 2
    # (index - sa sb / total) / ((sa + sb) / 2 - sa sb / total), scaled by
    # 2 total so numerator and denominator stay exact integers
    num = 2 * (total * index - sa * sb)
    den = total * (sa + sb) - 2 * sa * sb
    if den == 0:
        return 1.0 if _same_partition(table) else 0.0
    return num / den


# ---------------------------------------------------------------- spectral clustering


def spectral_embedding(
    g: Graph, v: DiagonalCentrality, e2: float, e3: float, c: int, by: str = "algebraic"
) -> np.ndarray:
    """Rows of the c eigenvectors of V^e2 A V^e3 with the largest eigenvalues."""
    vals, vecs = cgso_eigs(g, v, e2, e3)
    if by == "algebraic":
        order = np.argsort(-vals, kind="stable")
    elif by == "modulus":
        order = np.argsort(-np.abs(vals), kind="stable")
    else:
        raise ValueError("by must be 'algebraic' or 'modulus'")
    return vecs[:, order[:c]]


def spectral_cluster(
    g: Graph,
    v: DiagonalCentrality,
    e2: float,
    e3: float,
    c: int,
    seed: int = 0,
    n_init: int = 10,
    max_iter: int = 300,
    by: str = "algebraic",
) -> Partition:
    if c < 1:
        raise ValueError("number of clusters must be >= 1")
    u = spectral_embedding(g, v, e2, e3, c, by)
    return kmeans(u, c, seed=seed, n_init=n_init, max_iter=max_iter).partition


# ---------------------------------------------------------------- heatmap


@dataclass(frozen=True)
class HeatmapGrid:
    e2_values: np.ndarray
    e3_values: np.ndarray
    ami_mean: np.ndarray
    ami_std: np.ndarray
    ari_mean: np.ndarray
    ari_std: np.ndarray
    repeats: int
    seed: int

    def to_json(self) -> dict:
        return {
            "e2_values": self.e2_values.tolist(),
            "e3_values": self.e3_values.tolist(),
            "ami_mean": self.ami_mean.tolist(),
            "ami_std": self.ami_std.tolist(),
            "ari_mean": self.ari_mean.tolist(),
            "ari_std": self.ari_std.tolist(),
            "repeats": self.repeats,
            "seed": self.seed,
        }

    def to_csv(self, which: str = "ami") -> str:
        """Mean grid; first row holds e3 values, first column e2 values."""
        grid = getattr(self, f"{which}_mean")
        lines = ["e2\\e3," + ",".join(repr(float(x)) for x in self.e3_values)]
        for e2, row in zip(self.e2_values, grid):
            lines.append(repr(float(e2)) + "," + ",".join(repr(float(x)) for x in row))
        return "\n".join(lines) + "\n"


def grid_values(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1:
        return np.array([float(lo)])
    return np.linspace(lo, hi, steps)


def heatmap(
    g: Graph,
    v: DiagonalCentrality,
    truth: Partition,
    e2_range=(-1.5, 1.5),
    e3_range=(-1.5, 1.5),
    steps: int = 7,
    repeats: int = 10,
    seed: int = 0,
    n_init: int = 10,
) -> HeatmapGrid:
    """AMI/ARI of spectral clustering over an (e2, e3) grid.

    Each repeat reruns k-means with its own derived seed; the eigenvectors of
    a cell are computed once.
    """
    e2s, e3s = grid_values(*e2_range, steps), grid_values(*e3_range, steps)
    shape = (len(e2s), len(e3s))
    stats = {k: np.zeros(shape) for k in ("ami_mean", "ami_std", "ari_mean", "ari_std")}
    for i, e2 in enumerate(e2s):
        for j, e3 in enumerate(e3s):
            u = spectral_embedding(g, v, e2, e3, truth.k)
            amis, aris = [], []
            for rep in range(repeats):
                part = kmeans(u, truth.k, seed=derive_seed(seed, i, j, rep), n_init=n_init).partition
                amis.append(ami(truth, part))
                aris.append(ari(truth, part))
            stats["ami_mean"][i, j], stats["ami_std"][i, j] = np.mean(amis), np.std(amis)
            stats["ari_mean"][i, j], stats["ari_std"][i, j] = np.mean(aris), np.std(aris)
    return HeatmapGrid(e2s, e3s, repeats=repeats, seed=seed, **stats)
