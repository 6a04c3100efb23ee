"""Spectra of centrality shift operators and executable spectral bounds."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .centrality import DiagonalCentrality
from .graph import Graph, connected_components, degrees
from .operators import check_dense_limit


class SpectralError(ValueError):
    pass


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Flip each column so its first entry of non-negligible size is positive."""
    scale = np.abs(vecs).max(axis=0, keepdims=True)
    big = np.abs(vecs) > 1e-10 * np.maximum(scale, 1e-300)
    first = big.argmax(axis=0)
    signs = np.sign(vecs[first, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1
    return vecs * signs


def eig_symmetric(m: np.ndarray, sym_tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues ascending and orthonormal eigenvectors of a symmetric matrix."""
    m = np.asarray(m, dtype=float)
    check_dense_limit(m.shape[0])
    asym = float(np.abs(m - m.T).max(initial=0.0))
    if asym > sym_tol * max(1.0, float(np.abs(m).max(initial=0.0))):
        raise SpectralError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    vals, vecs = np.linalg.eigh((m + m.T) / 2)
    return vals, _fix_signs(vecs)


def cgso_eigs(
    g: Graph, v: DiagonalCentrality, e2: float, e3: float
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of V^e2 A V^e3, ascending.

    The operator is similar to the symmetric S = V^c A V^c with
    c = (e2 + e3) / 2, via V^d with d = (e2 - e3) / 2, so the eigenvalues are
    real and eigenvectors of S map to eigenvectors V^d u. Returned vectors are
    rescaled to unit Euclidean norm.
    """
    check_dense_limit(g.n)
    c = v.power((e2 + e3) / 2)
    s = c[:, None] * g.dense_adjacency() * c[None, :]
    vals, vecs = eig_symmetric(s)
    if e2 != e3:
        vecs = v.power((e2 - e3) / 2)[:, None] * vecs
        vecs /= np.linalg.norm(vecs, axis=0, keepdims=True)
        vecs = _fix_signs(vecs)
    return vals, vecs


def markov_eigenvalues(g: Graph, v: DiagonalCentrality) -> np.ndarray:
    return cgso_eigs(g, v, -1.0, 0.0)[0]


def analytic_moments(g: Graph, v: DiagonalCentrality) -> tuple[float, float]:
    """Mean and standard deviation of the spectrum of V^-1 A from traces.

    mean = tr(M)/n, which vanishes on loop-free graphs; the second moment is
    tr(M^2)/n, a sum of 1/(v_i v_j) over ordered adjacent pairs.
    """
    n = g.n
    mu = 0.0  # A_ii = 0 for stored graphs
    rows = np.repeat(np.arange(n), degrees(g))
    second = float(np.sum(1.0 / (v.entries[rows] * v.entries[g.neighbors]))) / n
    return mu, float(np.sqrt(max(second - mu * mu, 0.0)))


def closed_form_mean(v: DiagonalCentrality) -> float:
    """(1/n) sum 1/v(i): the published mean, which assumes unit self-loops."""
    return float(np.mean(1.0 / v.entries))


def default_zero_tol(eigs: np.ndarray) -> float:
    return 1e-8 * float(np.abs(eigs).max(initial=0.0))


def spectral_gap(g: Graph, v: DiagonalCentrality, zero_tol: float | None = None) -> float:
    """Smallest eigenvalue of I - V^-1 A that exceeds ``zero_tol``."""
    lap = np.sort(1.0 - markov_eigenvalues(g, v))
    if zero_tol is None:
        zero_tol = default_zero_tol(lap)
    above = lap[lap > zero_tol]
    if not len(above):
        raise SpectralError("no eigenvalue of I - M exceeds the zero tolerance")
    return float(above[0])


@dataclass(frozen=True)
class Bounds:
    gamma: float
    gershgorin: float
    spectral_radius: float


def eigenvalue_bounds(g: Graph, v: DiagonalCentrality) -> Bounds:
    """gamma = min v/deg, the row-sum bound max deg/v, and the actual radius of V^-1 A."""
    deg = degrees(g)
    if np.any(deg == 0):
        raise SpectralError(f"isolated node {int(np.flatnonzero(deg == 0)[0])}")
    ratio = v.entries / deg
    radius = float(np.abs(markov_eigenvalues(g, v)).max())
    return Bounds(float(ratio.min()), float((1.0 / ratio).max()), radius)


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: list
    analytic_mean: float
    analytic_std: float
    closed_form_mean: float
    gamma: float
    gershgorin_bound: float
    spectral_radius: float
    spectral_gap_lambda1: float | None
    zero_tolerance: float
    connected: bool

    def to_json(self) -> dict:
        return asdict(self)


def spectral_report(g: Graph, v: DiagonalCentrality) -> SpectralReport:
    eigs = np.sort(markov_eigenvalues(g, v))[::-1]
    mu, sigma = analytic_moments(g, v)
    b = eigenvalue_bounds(g, v)
    tol = default_zero_tol(1.0 - eigs)
    try:
        gap = spectral_gap(g, v, tol)
    except SpectralError:
        gap = None
    return SpectralReport(
        eigenvalues=[float(x) for x in eigs],
        analytic_mean=mu,
        analytic_std=sigma,
        closed_form_mean=closed_form_mean(v),
        gamma=b.gamma,
        gershgorin_bound=b.gershgorin,
        spectral_radius=b.spectral_radius,
        spectral_gap_lambda1=gap,
        zero_tolerance=tol,
        connected=connected_components(g).component_count == 1,
    )


CHEEGER_MAX_N = 16


@dataclass(frozen=True)
class CheegerReport:
    h_v_vertex: float
    h_v_edge: float
    argmin_vertex: list
    argmin_edge: list
    v_minus: float
    v_plus: float
    lambda1: float
    bound_factor: float
    bound_rhs_vertex: float
    bound_rhs_edge: float
    holds_vertex: bool
    holds_edge: bool

    def to_json(self) -> dict:
        return asdict(self)


def _subset_nodes(mask: int, n: int) -> list:
    return [i for i in range(n) if mask >> i & 1]


def cheeger_bruteforce(g: Graph, v: DiagonalCentrality) -> CheegerReport:
    """Enumerate every non-empty U with |U|_v <= |V|_v / 2.

    Two boundary notions are scored against |U|_v: the number of outside
    vertices adjacent to U, and the number of edges leaving U. Each is
    plugged into lambda1 <= 2 N v+^2 / v- * h.
    """
    n = g.n
    if n > CHEEGER_MAX_N:
        raise SpectralError(f"n={n} too large for exhaustive enumeration (max {CHEEGER_MAX_N})")
    if n < 2 or connected_components(g).component_count != 1:
        raise SpectralError("graph must be connected with at least two nodes")

    masks = np.arange(1, 1 << n, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n)) & 1  # (2^n - 1, n)
    weight = bits @ v.entries
    total = float(v.entries.sum())
    ok = weight <= total / 2 * (1 + 1e-12)
    masks, bits, weight = masks[ok], bits[ok], weight[ok]

    e = g.edges()
    edge_cut = (bits[:, e[:, 0]] != bits[:, e[:, 1]]).sum(axis=1)
    nbr_mask = np.zeros(n, dtype=np.int64)
    for u, w in e:
        nbr_mask[u] |= 1 << int(w)
        nbr_mask[w] |= 1 << int(u)
    touches = (masks[:, None] & nbr_mask[None, :]) != 0
    vertex_cut = (touches & (bits == 0)).sum(axis=1)

    ratio_e = edge_cut / weight
    ratio_v = vertex_cut / weight
    ie, iv = int(np.argmin(ratio_e)), int(np.argmin(ratio_v))
    lam = spectral_gap(g, v)
    vm, vp = float(v.entries.min()), float(v.entries.max())
    factor = 2 * n * vp**2 / vm
    rhs_e, rhs_v = factor * float(ratio_e[ie]), factor * float(ratio_v[iv])
    slack = 1e-10 * max(1.0, abs(lam))
    return CheegerReport(
        h_v_vertex=float(ratio_v[iv]),
        h_v_edge=float(ratio_e[ie]),
        argmin_vertex=_subset_nodes(int(masks[iv]), n),
        argmin_edge=_subset_nodes(int(masks[ie]), n),
        v_minus=vm,
        v_plus=vp,
        lambda1=lam,
        bound_factor=factor,
        bound_rhs_vertex=rhs_v,
        bound_rhs_edge=rhs_e,
        holds_vertex=bool(lam <= rhs_v + slack),
        holds_edge=bool(lam <= rhs_e + slack),
    )
