"""The parametrised centrality shift operator and its presets.

    Phi(A, V) = m1 V^e1 + m2 V^e2 (A + a I) V^e3 + m3 I

``apply`` never forms a dense matrix: two diagonal scalings and one sparse
product per term.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, astuple, dataclass

import numpy as np

from .centrality import DiagonalCentrality
from .graph import Graph

PARAM_NAMES = ("m1", "m2", "m3", "e1", "e2", "e3", "a")


@dataclass(frozen=True)
class CgsoParams:
    m1: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    e1: float = 0.0
    e2: float = 0.0
    e3: float = 0.0
    a: float = 0.0

    def __post_init__(self):
        for name in PARAM_NAMES:
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValueError(f"CGSO parameter {name} is not finite: {val}")
            object.__setattr__(self, name, val)

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, values) -> "CgsoParams":
        return cls(*(float(x) for x in values))

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "CgsoParams":
        missing = set(PARAM_NAMES) - set(obj)
        if missing:
            raise ValueError(f"missing CGSO parameters: {sorted(missing)}")
        return cls(**{k: obj[k] for k in PARAM_NAMES})


# Classical operators recovered when V = D.
PRESETS = {
    "adjacency": CgsoParams(0, 1, 0, 0, 0, 0, 0),
    "laplacian": CgsoParams(1, -1, 0, 1, 0, 0, 0),
    "signless_laplacian": CgsoParams(1, 1, 0, 1, 0, 0, 0),
    "rw_laplacian": CgsoParams(0, -1, 1, 0, -1, 0, 0),
    "sym_laplacian": CgsoParams(0, -1, 1, 0, -0.5, -0.5, 0),
    "normalized_adjacency": CgsoParams(0, 1, 0, 0, -0.5, -0.5, 1),
    "mean_aggregation": CgsoParams(0, 1, 0, 0, -1, 0, 0),
}


def preset(name: str) -> CgsoParams:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}"
        ) from None


def parse_gso(spec: str) -> CgsoParams:
    """Resolve ``preset:NAME`` or ``params:FILE.json``; a bare name is a preset."""
    kind, _, rest = spec.partition(":")
    if not rest:
        return preset(kind)
    if kind == "preset":
        return preset(rest)
    if kind == "params":
        with open(rest) as fh:
            return CgsoParams.from_json(json.load(fh))
    raise ValueError(f"bad --gso value {spec!r}; use preset:NAME or params:FILE")


def dense_limit() -> int:
    return int(os.environ.get("CGSO_DENSE_LIMIT", "5000"))


class DenseLimitError(ValueError):
    pass


def check_dense_limit(n: int) -> None:
    limit = dense_limit()
    if n > limit:
        raise DenseLimitError(
            f"n={n} exceeds the dense limit {limit}; use the matrix-free apply "
            "path or raise CGSO_DENSE_LIMIT"
        )


@dataclass(frozen=True, eq=False)
class CgsoOperator:
    """Sum of one or more ``Phi(A, V; params)`` terms on a shared graph."""

    graph: Graph
    terms: tuple[tuple[DiagonalCentrality, CgsoParams], ...]

    def __post_init__(self):
        for v, _ in self.terms:
            if v.n != self.graph.n:
                raise ValueError("centrality length does not match graph size")

    @property
    def n(self) -> int:
        return self.graph.n

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        col = (slice(None),) + (None,) * (x.ndim - 1)
        adj = self.graph.adjacency
        out = np.zeros_like(x)
        for v, p in self.terms:
            if p.m1:
                out += p.m1 * v.power(p.e1)[col] * x
            if p.m2:
                y = v.power(p.e3)[col] * x
                y = adj @ y + p.a * y
                out += p.m2 * v.power(p.e2)[col] * y
            if p.m3:
                out += p.m3 * x
        return out

    __call__ = apply

    def materialize_dense(self) -> np.ndarray:
        check_dense_limit(self.n)
        a = self.graph.dense_adjacency()
        eye = np.eye(self.n)
        out = np.zeros((self.n, self.n))
        for v, p in self.terms:
            out += p.m1 * np.diag(v.power(p.e1))
            out += p.m2 * v.power(p.e2)[:, None] * (a + p.a * eye) * v.power(p.e3)[None, :]
            out += p.m3 * eye
        return out


def build_parametrized(g: Graph, v: DiagonalCentrality, p: CgsoParams) -> CgsoOperator:
    return CgsoOperator(g, ((v, p),))


def markov_operator(g: Graph, v: DiagonalCentrality) -> CgsoOperator:
    """M_G = V^-1 A, the centrality-weighted neighbour average."""
    return build_parametrized(g, v, PRESETS["mean_aggregation"])


def combine(op1: CgsoOperator, op2: CgsoOperator) -> CgsoOperator:
    if op1.graph is not op2.graph and op1.graph != op2.graph:
        raise ValueError("cannot combine operators defined on different graphs")
    return CgsoOperator(op1.graph, op1.terms + op2.terms)


def materialize_dense(op: CgsoOperator) -> np.ndarray:
    return op.materialize_dense()
