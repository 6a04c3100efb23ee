"""Small dense GCN / SGC with a learnable centrality shift operator.

Node features are dense numpy arrays; the graph enters only through the
operator, whose forward and backward passes are matrix-free. Operator
parameters live in a (terms, 7) array ordered like ``PARAM_NAMES``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .centrality import DiagonalCentrality, centrality_diagonal
from .graph import Graph, degrees
from .operators import PARAM_NAMES, CgsoParams, preset
from .rng import derive_seed, stream

EXPONENTS = np.array([False, False, False, True, True, True, False])


# ---------------------------------------------------------------- operator pass


def phi_forward(params: np.ndarray, logs: list, adj, h: np.ndarray):
    """Apply sum_t Phi_t to ``h`` and keep what the backward pass needs."""
    out = np.zeros_like(h)
    cache = []
    for (m1, m2, m3, e1, e2, e3, a), lv in zip(params, logs):
        s1, s2, s3 = np.exp(e1 * lv)[:, None], np.exp(e2 * lv)[:, None], np.exp(e3 * lv)[:, None]
        p = s3 * h
        q = adj @ p + a * p
        r = s2 * q
        out += m1 * s1 * h + m2 * r + m3 * h
        cache.append((s1, s2, s3, p, r))
    return out, (params, logs, adj, h, cache)


def phi_backward(ctx, grad: np.ndarray):
    """Gradients w.r.t. the input and every operator scalar."""
    params, logs, adj, h, cache = ctx
    dh = np.zeros_like(h)
    dparams = np.zeros_like(params)
    for t, ((m1, m2, m3, e1, e2, e3, a), lv, (s1, s2, s3, p, r)) in enumerate(
        zip(params, logs, cache)
    ):
        lv = lv[:, None]
        s1h = s1 * h
        dr = m2 * grad
        dq = s2 * dr
        dp = adj @ dq + a * dq  # A is symmetric
        dparams[t] = (
            np.sum(grad * s1h),            # m1
            np.sum(grad * r),              # m2
            np.sum(grad * h),              # m3
            m1 * np.sum(grad * lv * s1h),  # e1
            np.sum(dr * lv * r),           # e2
            np.sum(dp * lv * p),           # e3
            np.sum(dq * p),                # a
        )
        dh += m1 * s1 * grad + m3 * grad + s3 * dp
    return dh, dparams


# ---------------------------------------------------------------- model


@dataclass
class CgcnModel:
    weights: list
    cgso: np.ndarray
    kinds: tuple = ("kcore",)
    dropout: float = 0.5
    arch: str = "gcn"
    hops: int = 2

    @property
    def layer_dims(self) -> list:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def params(self) -> list:
        return [*self.weights, self.cgso]

    def copy(self) -> "CgcnModel":
        return CgcnModel([w.copy() for w in self.weights], self.cgso.copy(),
                         self.kinds, self.dropout, self.arch, self.hops)

    def learned(self) -> list:
        return [
            {"centrality": k, **CgsoParams.from_array(row).to_json()}
            for k, row in zip(self.kinds, self.cgso)
        ]


def glorot(rng: np.random.Generator, d_in: int, d_out: int) -> np.ndarray:
    lim = math.sqrt(6.0 / (d_in + d_out))
    return rng.uniform(-lim, lim, size=(d_in, d_out))


def init_model(
    dims,
    kinds=("kcore",),
    init: str = "normalized_adjacency",
    seed: int = 0,
    dropout: float = 0.5,
    arch: str = "gcn",
    hops: int = 2,
    zero_extra_terms: bool = False,
) -> CgcnModel:
    """Glorot weights for ``dims`` (d0, ..., dL) and preset operator parameters.

    With ``zero_extra_terms`` every operator term after the first starts with
    m1 = m2 = m3 = 0, so it does not change the initial forward pass.
    """
    dims = list(dims)
    if arch == "sgc" and len(dims) != 2:
        raise ValueError("sgc uses a single linear map: dims must be (d_in, n_classes)")
    rng = stream(seed, "init")
    weights = [glorot(rng, a, b) for a, b in zip(dims[:-1], dims[1:])]
    base = preset(init).as_array()
    cgso = np.tile(base, (len(kinds), 1))
    if zero_extra_terms:
        cgso[1:, :3] = 0.0
    return CgcnModel(weights, cgso, tuple(kinds), dropout, arch, hops)


def _logs(vs) -> list:
    return [np.asarray(v.log) for v in vs]


def _check_finite(x: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(x)):
        raise FloatingPointError(f"non-finite values in {where}")


def cgcn_forward(model: CgcnModel, g: Graph, vs, x, train: bool = False, seed: int = 0):
    """Logits and the cache for :func:`backward`.

    GCN layers: dropout on the input (train mode only), operator, linear map,
    ReLU on all but the last layer. SGC: ``hops`` operator applications then
    one linear map.
    """
    adj, logs = g.adjacency, _logs(vs)
    rng = stream(seed, "dropout") if train and model.dropout > 0 else None
    h = np.asarray(x, dtype=float)
    layers = []
    if model.arch == "sgc":
        ctxs = []
        for _ in range(model.hops):
            h, ctx = phi_forward(model.cgso, logs, adj, h)
            ctxs.append(ctx)
        _check_finite(h, "propagated features")
        logits = h @ model.weights[0]
        _check_finite(logits, "logits")
        return logits, ("sgc", ctxs, h)
    last = len(model.weights) - 1
    for l, w in enumerate(model.weights):
        mask = None
        if rng is not None:
            keep = 1.0 - model.dropout
            mask = (rng.random(h.shape) < keep) / keep
            h_in = h * mask
        else:
            h_in = h
        m, ctx = phi_forward(model.cgso, logs, adj, h_in)
        z = m @ w
        _check_finite(z, f"layer {l}")
        h = z if l == last else np.maximum(z, 0.0)
        layers.append((mask, ctx, m, z))
    return h, ("gcn", layers)


def hidden_states(model: CgcnModel, g: Graph, vs, x) -> list:
    """Eval-mode representations: the input, then each layer's output."""
    out = [np.asarray(x, dtype=float)]
    _, cache = cgcn_forward(model, g, vs, x)
    if cache[0] == "gcn":
        for l, (_, _, _, z) in enumerate(cache[1]):
            out.append(z if l == len(cache[1]) - 1 else np.maximum(z, 0.0))
    else:
        out.append(cache[2])
    return out


def backward(model: CgcnModel, cache, dlogits: np.ndarray):
    """Gradients for every weight matrix and the operator array."""
    dcgso = np.zeros_like(model.cgso)
    if cache[0] == "sgc":
        _, ctxs, h = cache
        dw = [h.T @ dlogits]
        dh = dlogits @ model.weights[0].T
        for ctx in reversed(ctxs):
            dh, dp = phi_backward(ctx, dh)
            dcgso += dp
        return dw, dcgso
    layers = cache[1]
    dws = [None] * len(layers)
    dz = dlogits
    for l in range(len(layers) - 1, -1, -1):
        mask, ctx, m, z = layers[l]
        if l != len(layers) - 1:
            dz = dz * (z > 0)
        dws[l] = m.T @ dz
        dm = dz @ model.weights[l].T
        dh, dp = phi_backward(ctx, dm)
        dcgso += dp
        if mask is not None:
            dh = dh * mask
        dz = dh
    return dws, dcgso


def softmax_xent(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray):
    """Mean cross-entropy over masked nodes and its gradient w.r.t. the logits."""
    idx = np.flatnonzero(mask)
    z = logits[idx]
    z = z - z.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    loss = -float(logp[np.arange(len(idx)), labels[idx]].mean())
    grad = np.zeros_like(logits)
    p = np.exp(logp)
    p[np.arange(len(idx)), labels[idx]] -= 1.0
    grad[idx] = p / len(idx)
    return loss, grad


def loss_and_grads(model, g, vs, x, labels, mask, train: bool = False, seed: int = 0):
    logits, cache = cgcn_forward(model, g, vs, x, train=train, seed=seed)
    loss, dlogits = softmax_xent(logits, np.asarray(labels), np.asarray(mask, bool))
    dws, dcgso = backward(model, cache, dlogits)
    return loss, dws, dcgso


def sgc_forward(g: Graph, v, params: CgsoParams, hops: int, x, w) -> np.ndarray:
    """Phi^hops(x) @ w for a single operator term."""
    if hops < 1:
        raise ValueError("hops must be >= 1")
    vs = v if isinstance(v, (list, tuple)) else [v]
    p = np.atleast_2d(params.as_array() if isinstance(params, CgsoParams) else params)
    h = np.asarray(x, dtype=float)
    for _ in range(hops):
        h, _ = phi_forward(p, _logs(vs), g.adjacency, h)
    return h @ w


def dirichlet_energy(g: Graph, h: np.ndarray) -> float:
    """(1/n) sum over edges of ||h_i/sqrt(1+d_i) - h_j/sqrt(1+d_j)||^2."""
    h = np.asarray(h, dtype=float)
    if h.ndim == 1:
        h = h[:, None]
    scaled = h / np.sqrt(1.0 + degrees(g))[:, None]
    e = g.edges()
    diff = scaled[e[:, 0]] - scaled[e[:, 1]]
    return float((diff**2).sum() / g.n)


# ---------------------------------------------------------------- optimisation


@dataclass
class TrainConfig:
    epochs: int = 200
    lr_weights: float = 0.01
    lr_exponents: float = 0.005
    weight_decay: float = 5e-4
    betas: tuple = (0.9, 0.999)
    eps: float = 1e-8
    seed: int = 0
    init: str = "normalized_adjacency"
    centralities: tuple = ("kcore",)
    hidden: int = 64
    layers: int = 2
    dropout: float = 0.5
    arch: str = "gcn"
    hops: int = 2
    learn_cgso: bool = True
    zero_extra_terms: bool = False
    walk_length: int = 2
    damping: float = 0.85
    dirichlet_probe: bool = False

    def __post_init__(self):
        if self.lr_weights <= 0 or self.lr_exponents <= 0:
            raise ValueError("learning rates must be positive")
        self.betas = tuple(self.betas)
        self.centralities = tuple(self.centralities)

    @classmethod
    def from_json(cls, obj: dict) -> "TrainConfig":
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown TrainConfig keys: {sorted(unknown)}")
        return cls(**obj)

    def to_json(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


@dataclass
class AdamState:
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)


def adam_step(params: list, grads: list, state: AdamState, lrs: list,
              betas=(0.9, 0.999), eps: float = 1e-8, weight_decay: float = 0.0) -> AdamState:
    """In-place Adam update with bias correction and L2 weight decay.

    ``lrs`` holds one learning rate per parameter array; an array-valued rate
    gives per-entry groups.
    """
    b1, b2 = betas
    if not state.m:
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
    state.step += 1
    c1, c2 = 1 - b1**state.step, 1 - b2**state.step
    for p, gr, m, v, lr in zip(params, grads, state.m, state.v, lrs):
        gr = gr + weight_decay * p
        m *= b1
        m += (1 - b1) * gr
        v *= b2
        v += (1 - b2) * gr * gr
        p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    return state


def param_lrs(model: CgcnModel, cfg: TrainConfig) -> list:
    row = np.where(EXPONENTS, cfg.lr_exponents, cfg.lr_weights)
    return [cfg.lr_weights] * len(model.weights) + [np.tile(row, (len(model.cgso), 1))]


# ---------------------------------------------------------------- training


@dataclass
class NodeTask:
    graph: Graph
    features: np.ndarray
    labels: np.ndarray
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        if np.any(self.train & self.val) or np.any(self.train & self.test) or np.any(self.val & self.test):
            raise ValueError("train/val/test masks must be disjoint")
        if len(self.features) != self.graph.n or len(self.labels) != self.graph.n:
            raise ValueError("features and labels need one row per node")

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1


@dataclass
class TrainReport:
    train_loss: list
    val_acc: list
    best_epoch: int
    best_val_acc: float
    test_acc: float
    learned: list
    init: list
    final_train_loss: float
    diverged: bool = False
    dirichlet: list | None = None
    config: dict | None = None

    def to_json(self) -> dict:
        return dict(self.__dict__)


def accuracy(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray) -> float:
    idx = np.flatnonzero(mask)
    if not len(idx):
        return float("nan")
    return float((logits[idx].argmax(1) == labels[idx]).mean())


def build_model(task: NodeTask, cfg: TrainConfig) -> CgcnModel:
    d_in, k = task.features.shape[1], task.n_classes
    if cfg.arch == "sgc":
        dims = [d_in, k]
    else:
        dims = [d_in] + [cfg.hidden] * (cfg.layers - 1) + [k]
    return init_model(dims, cfg.centralities, cfg.init, cfg.seed, cfg.dropout,
                      cfg.arch, cfg.hops, cfg.zero_extra_terms)


def task_centralities(g: Graph, cfg: TrainConfig) -> list[DiagonalCentrality]:
    out = []
    for kind in cfg.centralities:
        params = {}
        if kind == "walks":
            params["length"] = cfg.walk_length
        elif kind == "pagerank":
            params["damping"] = cfg.damping
        out.append(centrality_diagonal(g, kind, **params))
    return out


def train(task: NodeTask, cfg: TrainConfig, model: CgcnModel | None = None) -> TrainReport:
    """Full-batch Adam training; reports test accuracy at the best validation epoch.

    Ties in validation accuracy keep the earliest epoch.
    """
    model = build_model(task, cfg) if model is None else model.copy()
    vs = task_centralities(task.graph, cfg)
    g, x, y = task.graph, task.features, task.labels
    init = model.learned()
    lrs = param_lrs(model, cfg)
    state = AdamState()

    best = model.copy()
    best_epoch, best_val = 0, accuracy(cgcn_forward(model, g, vs, x)[0], y, task.val)
    losses, vals = [], []
    diverged = False
    for epoch in range(1, cfg.epochs + 1):
        try:
            loss, dws, dcgso = loss_and_grads(model, g, vs, x, y, task.train,
                                              train=True, seed=derive_seed(cfg.seed, "epoch", epoch))
        except FloatingPointError:
            diverged = True
            break
        if not math.isfinite(loss):
            diverged = True
            break
        if not cfg.learn_cgso:
            dcgso = np.zeros_like(dcgso)
        params = model.params()
        grads = [*dws, dcgso]
        if cfg.learn_cgso:
            adam_step(params, grads, state, lrs, cfg.betas, cfg.eps, cfg.weight_decay)
        else:
            adam_step(params[:-1], grads[:-1], state, lrs[:-1], cfg.betas, cfg.eps, cfg.weight_decay)
        losses.append(loss)
        try:
            val = accuracy(cgcn_forward(model, g, vs, x)[0], y, task.val)
        except FloatingPointError:
            diverged = True
            break
        vals.append(val)
        if val > best_val:
            best, best_epoch, best_val = model.copy(), epoch, val

    logits = cgcn_forward(best, g, vs, x)[0]
    final_loss = softmax_xent(cgcn_forward(model, g, vs, x)[0], y, task.train)[0] if not diverged else float("nan")
    dirichlet = None
    if cfg.dirichlet_probe:
        dirichlet = [dirichlet_energy(g, h) for h in hidden_states(best, g, vs, x)]
    return TrainReport(
        train_loss=losses,
        val_acc=vals,
        best_epoch=best_epoch,
        best_val_acc=best_val,
        test_acc=accuracy(logits, y, task.test),
        learned=best.learned(),
        init=init,
        final_train_loss=final_loss,
        diverged=diverged,
        dirichlet=dirichlet,
        config=cfg.to_json(),
    )


# ---------------------------------------------------------------- data


def synthetic_node_task(g: Graph, labels, noise: float = 0.5, fractions=(0.2, 0.2),
                        seed: int = 0) -> NodeTask:
    """One-hot class features plus Gaussian noise, random train/val/test split."""
    labels = np.asarray(labels, dtype=np.int64)
    k = int(labels.max()) + 1
    rng = stream(seed, "node-task")
    x = np.eye(k)[labels] + noise * rng.standard_normal((g.n, k))
    perm = rng.permutation(g.n)
    n_tr, n_va = int(round(fractions[0] * g.n)), int(round(fractions[1] * g.n))
    masks = [np.zeros(g.n, bool) for _ in range(3)]
    masks[0][perm[:n_tr]] = True
    masks[1][perm[n_tr : n_tr + n_va]] = True
    masks[2][perm[n_tr + n_va :]] = True
    return NodeTask(g, x, labels, *masks)


SPLITS = ("train", "val", "test")


def write_node_task(task: NodeTask, features_path, labels_path, masks_path) -> None:
    np.savetxt(features_path, task.features, delimiter=",", fmt="%.17g")
    with open(labels_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "label"])
        w.writerows((i, int(c)) for i, c in enumerate(task.labels))
    with open(masks_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "split"])
        for name, mask in zip(SPLITS, (task.train, task.val, task.test)):
            w.writerows((int(i), name) for i in np.flatnonzero(mask))


def read_node_csv(path, n: int, cast=int) -> np.ndarray:
    """Read ``node,value`` rows (header optional) into a length-n array."""
    out = [None] * n
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip().lstrip("-").isdigit():
                continue
            out[int(row[0])] = cast(row[1].strip())
    return np.array(out, dtype=object)


def read_node_task(g: Graph, features_path, labels_path, masks_path) -> NodeTask:
    feats = np.loadtxt(features_path, delimiter=",", ndmin=2)
    labels = read_node_csv(labels_path, g.n)
    if any(l is None for l in labels):
        raise ValueError(f"{labels_path}: missing labels for some nodes")
    split = read_node_csv(masks_path, g.n, cast=str)
    bad = {s for s in split if s is not None and s not in SPLITS}
    if bad:
        raise ValueError(f"{masks_path}: unknown split names {sorted(bad)}")
    masks = [np.array([s == name for s in split]) for name in SPLITS]
    return NodeTask(g, feats, labels.astype(np.int64), *masks)


__all__ = [
    "CgcnModel", "TrainConfig", "TrainReport", "NodeTask", "AdamState",
    "init_model", "cgcn_forward", "backward", "loss_and_grads", "adam_step",
    "sgc_forward", "dirichlet_energy", "train", "synthetic_node_task",
    "phi_forward", "phi_backward", "PARAM_NAMES",
]
