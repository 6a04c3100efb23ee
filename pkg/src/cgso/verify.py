"""Property checks behind ``cgso verify``.

Each check returns a :class:`Check`; suites group them so the CLI can print
a pass/fail table. These are quick randomized versions of the properties the
test suite covers exhaustively.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from . import centrality as cen
from .clustering import Partition, ami, ari, spectral_cluster
from .generators import BaParams, expected_avg_degree, generate_ba
from .graph import (Graph, connected_components, degrees, from_edges, induced_subgraph,
                    parse_edge_list, serialize_edge_list)
from .operators import markov_operator
from .rng import stream
from .spectral import analytic_moments, cgso_eigs, cheeger_bruteforce, eigenvalue_bounds


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def random_connected_graph(n: int, rng: np.random.Generator, p: float | None = None) -> Graph:
    """Random spanning tree plus G(n, p) edges."""
    if p is None:
        p = rng.uniform(0.1, 0.6)
    perm = rng.permutation(n)
    tree = [(perm[i], perm[rng.integers(i)]) for i in range(1, n)]
    iu, ju = np.triu_indices(n, 1)
    extra = rng.random(len(iu)) < p
    return from_edges(n, np.concatenate([np.array(tree, dtype=np.int64).reshape(-1, 2),
                                         np.stack([iu[extra], ju[extra]], 1)]))


def all_diagonals(g: Graph) -> dict:
    return {kind: cen.centrality_diagonal(g, kind) for kind in cen.KINDS}


def _timed(fn):
    def run(*args, **kwargs):
        t = time.perf_counter()
        c = fn(*args, **kwargs)
        c.seconds = time.perf_counter() - t
        return c
    run.__name__ = fn.__name__
    return run


@_timed
def check_roundtrip(seed: int, graphs: int = 20) -> Check:
    rng = stream(seed, "verify-roundtrip")
    for _ in range(graphs):
        g = random_connected_graph(int(rng.integers(2, 30)), rng)
        if parse_edge_list(serialize_edge_list(g)) != g:
            return Check("edge-list round trip", False, repr(g))
        if degrees(g).sum() != 2 * g.edge_count:
            return Check("edge-list round trip", False, "degree sum mismatch")
    return Check("edge-list round trip", True, f"{graphs} graphs")


@_timed
def check_self_adjoint(seed: int, graphs: int = 20) -> Check:
    rng = stream(seed, "verify-spectral")
    worst = 0.0
    for _ in range(graphs):
        g = random_connected_graph(int(rng.integers(5, 41)), rng)
        for v in all_diagonals(g).values():
            vm = v.entries[:, None] * markov_operator(g, v).materialize_dense()
            worst = max(worst, float(np.abs(vm - vm.T).max()))
    return Check("V*M self-adjoint", worst < 1e-12, f"max asymmetry {worst:.2e}")


@_timed
def check_real_and_moments(seed: int, graphs: int = 20) -> Check:
    rng = stream(seed, "verify-spectral")
    imag = mom = 0.0
    for _ in range(graphs):
        g = random_connected_graph(int(rng.integers(5, 41)), rng)
        for v in all_diagonals(g).values():
            ev = np.linalg.eigvals(markov_operator(g, v).materialize_dense())
            imag = max(imag, float(np.abs(ev.imag).max()))
            eigs = cgso_eigs(g, v, -1.0, 0.0)[0]
            mu, sigma = analytic_moments(g, v)
            mom = max(mom, abs(mu - eigs.mean()), abs(sigma - eigs.std()))
    ok = imag < 1e-8 and mom < 1e-8
    return Check("real spectrum and trace moments", ok,
                 f"max |imag| {imag:.2e}, moment error {mom:.2e}")


@_timed
def check_bounds(seed: int, graphs: int = 20) -> Check:
    rng = stream(seed, "verify-spectral")
    bad_g = bad_gamma = 0
    for _ in range(graphs):
        g = random_connected_graph(int(rng.integers(5, 41)), rng)
        for v in all_diagonals(g).values():
            b = eigenvalue_bounds(g, v)
            bad_g += b.spectral_radius > b.gershgorin + 1e-8
            bad_gamma += b.gamma >= 1 and b.spectral_radius > b.gamma + 1e-8
    k3 = from_edges(3, [(0, 1), (1, 2), (0, 2)])
    cex = eigenvalue_bounds(k3, cen.DiagonalCentrality(np.ones(3)))
    ok = bad_g == 0 and bad_gamma == 0 and cex.spectral_radius > cex.gamma
    return Check("eigenvalue bounds", ok,
                 f"gershgorin violations {bad_g}, gamma>=1 violations {bad_gamma}, "
                 f"V=I on K3: radius {cex.spectral_radius:g} > gamma {cex.gamma:g}")


@_timed
def check_components(seed: int, graphs: int = 10) -> Check:
    rng = stream(seed, "verify-components")
    worst, amis = 0.0, []
    for t in range(graphs):
        sizes = rng.integers(3, 10, size=int(rng.integers(2, 4)))
        parts, off = [], 0
        for s in sizes:
            h = random_connected_graph(int(s), rng)
            parts.append(h.edges() + off)
            off += int(s)
        g = from_edges(off, np.concatenate(parts))
        comp = connected_components(g)
        for v in all_diagonals(g).values():
            whole = np.sort(cgso_eigs(g, v, -1.0, 0.0)[0])
            pieces = []
            for c in range(comp.component_count):
                nodes = np.flatnonzero(comp.labels == c)
                sub, _ = induced_subgraph(g, nodes)
                pieces.append(cgso_eigs(sub, cen.DiagonalCentrality(v.entries[nodes]), -1.0, 0.0)[0])
            worst = max(worst, float(np.abs(np.sort(np.concatenate(pieces)) - whole).max()))
        # with V = D every component contributes eigenvalue 1, so the top
        # C eigenvectors are exactly the component indicators
        part = spectral_cluster(g, cen.centrality_diagonal(g, "degree"), -1.0, 0.0,
                                comp.component_count, seed=t)
        amis.append(ami(Partition.from_labels(comp.labels), part))
    ok = worst < 1e-8 and min(amis) > 1 - 1e-12
    return Check("component spectra and recovery", ok,
                 f"spectrum mismatch {worst:.2e}, min AMI {min(amis):.3f}")


@_timed
def check_cheeger(seed: int, graphs: int = 40) -> Check:
    rng = stream(seed, "verify-cheeger")
    violations = 0
    for _ in range(graphs):
        g = random_connected_graph(int(rng.integers(2, 9)), rng)
        for v in all_diagonals(g).values():
            violations += not cheeger_bruteforce(g, v).holds_edge
    return Check("Cheeger bound (edge boundary)", violations == 0,
                 f"{violations} violations over {graphs} graphs x 4 centralities")


@_timed
def check_ba_edge_count(seed: int, draws: int = 20) -> Check:
    rng = stream(seed, "verify-ba")
    bad = 0
    for t in range(draws):
        n0 = int(rng.integers(2, 10))
        p = BaParams(n=int(rng.integers(n0 + 1, 200)), n0=n0,
                     r0=int(rng.integers(0, n0 * (n0 - 1) // 2 + 1)),
                     r=int(rng.integers(1, n0 + 1)), seed=t)
        g = generate_ba(p)
        bad += g.edge_count != p.r0 + p.r * (p.n - p.n0)
        bad += abs(2 * g.edge_count / p.n - expected_avg_degree(p.n, p.n0, p.r0, p.r)) > 1e-12
    return Check("BA edge count and average degree", bad == 0, f"{bad} mismatches in {draws} draws")


@_timed
def check_scores(seed: int) -> Check:
    ok = abs(ari([0, 0, 1, 1], [0, 1, 0, 1]) + 0.5) < 1e-15
    ok &= abs(ami([0, 0, 1, 1], [1, 1, 0, 0]) - 1.0) < 1e-12
    rng = stream(seed, "verify-scores")
    sym = 0.0
    for _ in range(50):
        a, b = rng.integers(0, 3, 12), rng.integers(0, 4, 12)
        sym = max(sym, abs(ami(a, b) - ami(b, a)), abs(ari(a, b) - ari(b, a)))
    ok &= sym < 1e-12
    return Check("AMI / ARI identities", bool(ok), f"asymmetry {sym:.1e}")


@_timed
def check_gradients(seed: int, instances: int = 3) -> Check:
    from .cgnn import init_model, loss_and_grads

    rng = stream(seed, "verify-grad")
    worst = 0.0
    for t in range(instances):
        n = int(rng.integers(6, 16))
        g = random_connected_graph(n, rng)
        kinds = ("walks", "degree")
        vs = [cen.centrality_diagonal(g, k) for k in kinds]
        model = init_model([4, 5, 3], kinds=kinds, seed=t)
        model.cgso += rng.normal(0, 0.2, model.cgso.shape)
        x, y, mask = rng.normal(size=(n, 4)), rng.integers(0, 3, n), np.ones(n, bool)
        _, _, dc = loss_and_grads(model, g, vs, x, y, mask)
        h = 1e-5
        for idx in itertools.product(range(len(kinds)), range(7)):
            model.cgso[idx] += h
            lp = loss_and_grads(model, g, vs, x, y, mask)[0]
            model.cgso[idx] -= 2 * h
            lm = loss_and_grads(model, g, vs, x, y, mask)[0]
            model.cgso[idx] += h
            fd = (lp - lm) / (2 * h)
            worst = max(worst, abs(fd - dc[idx]) / max(abs(fd), abs(dc[idx]), 1e-6))
    return Check("CGSO gradient vs finite differences", worst < 1e-4, f"max rel err {worst:.1e}")


SUITES = {
    "graph": [check_roundtrip],
    "spectral": [check_self_adjoint, check_real_and_moments, check_bounds,
                 check_components, check_cheeger],
    "generators": [check_ba_edge_count],
    "clustering": [check_scores],
    "cgnn": [check_gradients],
}


def run_suite(name: str, seed: int) -> list[Check]:
    if name == "all":
        fns = [f for suite in SUITES.values() for f in suite]
    elif name in SUITES:
        fns = SUITES[name]
    else:
        raise ValueError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    return [fn(seed) for fn in fns]


def format_table(checks: list[Check]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  status  time    detail"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL':<6}  "
                     f"{c.seconds:5.2f}s  {c.detail}")
    return "\n".join(lines)
