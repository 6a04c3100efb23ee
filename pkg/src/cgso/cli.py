"""Command-line driver.

Every subcommand that takes ``-o DIR`` writes its outputs there together with
``manifest.json`` (argv, resolved options, input/output hashes, duration).
Without ``-o`` the main JSON result goes to stdout.

Exit codes: 0 success, 1 usage or input error, 2 computational failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import centrality as cen
from .clustering import Partition, ami, ari, heatmap, spectral_cluster
from .generators import BaParams, SbbamParams, generate_ba, generate_sbbam
from .graph import GraphParseError, largest_component, read_edge_list, serialize_edge_list
from .operators import parse_gso
from .rng import derive_seed
from .spectral import SpectralError, cheeger_bruteforce, spectral_report


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _range(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("expected LO,HI")
    return vals[0], vals[1]


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


class Run:
    """Collects outputs of one invocation and writes them plus the manifest."""

    def __init__(self, args, argv):
        self.args, self.argv = args, argv
        self.out = Path(args.out) if getattr(args, "out", None) else None
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.start = time.perf_counter()

    def input(self, path) -> Path:
        p = Path(path)
        if not p.is_file():
            raise FileNotFoundError(f"no such file: {p}")
        self.inputs[str(p)] = sha256(p)
        return p

    def write(self, name: str, text: str) -> None:
        if self.out is None:
            return
        path = self.out / name
        atomic_write(path, text)
        self.outputs[name] = hashlib.sha256(text.encode()).hexdigest()

    def result(self, name: str, obj) -> None:
        text = _json(obj)
        if self.out is None:
            sys.stdout.write(text)
        else:
            self.write(name, text)

    def finish(self) -> None:
        if self.out is None:
            return
        config = {k: v for k, v in vars(self.args).items() if k != "func"}
        manifest = {
            "command": self.argv,
            "version": __version__,
            "config": config,
            "seed": config.get("seed"),
            "inputs": self.inputs,
            "outputs": self.outputs,
            "duration_seconds": time.perf_counter() - self.start,
        }
        atomic_write(self.out / "manifest.json", _json(manifest))


# ---------------------------------------------------------------- helpers


def _centrality_params(args) -> dict:
    if args.centrality == "walks":
        return {"length": args.walk_length}
    if args.centrality == "pagerank":
        return {"damping": args.damping, "tol": args.tol}
    return {}


def _load_graph(run: Run, args):
    g = read_edge_list(run.input(args.graph))
    index_map = np.arange(g.n)
    if not args.keep_all:
        g, index_map = largest_component(g)
    return g, index_map


def _load_labels(run: Run, args, n_original: int, index_map: np.ndarray) -> Partition:
    path = args.labels
    if path is None:
        guess = Path(args.graph).with_name("labels.csv")
        if not guess.is_file():
            raise UsageError("ground-truth labels required: pass --labels PATH")
        path = guess
    from .cgnn import read_node_csv

    raw = read_node_csv(run.input(path), n_original)
    keep = index_map >= 0
    if any(raw[i] is None for i in np.flatnonzero(keep)):
        raise UsageError(f"{path}: missing labels for some nodes")
    labels = np.empty(int(keep.sum()), dtype=np.int64)
    labels[index_map[keep]] = raw[keep].astype(np.int64)
    return Partition.from_labels(labels)


def _diag(g, args):
    return cen.build_diagonal(cen.compute(g, args.centrality, **_centrality_params(args)))


# ---------------------------------------------------------------- commands


def cmd_generate(run: Run, args) -> None:
    if args.model == "ba":
        p = BaParams(args.n, args.n0, args.r0, args.r, args.seed)
        g, labels = generate_ba(p), None
        meta = {"model": "ba", "n": p.n, "n0": p.n0, "r0": p.r0, "r": p.r, "seed": p.seed}
    else:
        p = SbbamParams(
            tuple(_ints(args.blocks)), tuple(_ints(args.r)), args.p,
            n0=tuple(_ints(args.n0)) if args.n0 else None,
            r0=tuple(_ints(args.r0)) if args.r0 else None, seed=args.seed,
        )
        g, labels = generate_sbbam(p)
        meta = {"model": "sbbam", **p.metadata()}
    meta.update(nodes=g.n, edges=g.edge_count)
    run.write("edges.txt", serialize_edge_list(g))
    if labels is not None:
        run.write("labels.csv", "node,block\n" + "".join(f"{i},{b}\n" for i, b in enumerate(labels)))
        if args.features_noise is not None:
            from .cgnn import synthetic_node_task, write_node_task

            task = synthetic_node_task(g, labels, args.features_noise, seed=args.seed)
            with tempfile.TemporaryDirectory() as tmp:
                paths = [Path(tmp) / f for f in ("features.csv", "classes.csv", "masks.csv")]
                write_node_task(task, *paths)
                for path in paths:
                    run.write(path.name, path.read_text())
            meta["features_noise"] = args.features_noise
    run.result("meta.json", meta)


def cmd_centrality(run: Run, args) -> None:
    g, index_map = _load_graph(run, args)
    c = cen.compute(g, args.centrality, **_centrality_params(args))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node", "value"])
    w.writerows((i, repr(float(x)) if c.kind == "pagerank" else int(x)) for i, x in enumerate(c.values))
    run.write("centrality.csv", buf.getvalue())
    meta = {"kind": c.kind, "params": c.params, "nodes": g.n,
            "original_ids": np.flatnonzero(index_map >= 0).tolist()}
    if run.out is None:
        meta["values"] = [float(x) for x in c.values]
    run.result("centrality.json", meta)


def cmd_spectrum(run: Run, args) -> None:
    g, _ = _load_graph(run, args)
    rep = spectral_report(g, _diag(g, args)).to_json()
    rep["centrality"] = {"kind": args.centrality, **_centrality_params(args)}
    run.result("spectrum.json", rep)


def cmd_cheeger(run: Run, args) -> None:
    g, _ = _load_graph(run, args)
    rep = cheeger_bruteforce(g, _diag(g, args)).to_json()
    rep["centrality"] = {"kind": args.centrality, **_centrality_params(args)}
    run.result("cheeger.json", rep)


def cmd_cluster(run: Run, args) -> None:
    n_original = read_edge_list(args.graph).n if Path(args.graph).is_file() else 0
    g, index_map = _load_graph(run, args)
    truth = _load_labels(run, args, n_original, index_map)
    v = _diag(g, args)
    amis, aris, first = [], [], None
    for rep in range(args.repeats):
        part = spectral_cluster(g, v, args.e2, args.e3, args.C, seed=derive_seed(args.seed, rep),
                                n_init=args.n_init, by=args.by)
        first = part if first is None else first
        amis.append(ami(truth, part))
        aris.append(ari(truth, part))
    run.write("partition.csv", "node,cluster\n" + "".join(
        f"{i},{c}\n" for i, c in zip(np.flatnonzero(index_map >= 0), first.labels)))
    run.result("cluster.json", {
        "ami_mean": float(np.mean(amis)), "ami_std": float(np.std(amis)),
        "ari_mean": float(np.mean(aris)), "ari_std": float(np.std(aris)),
        "ami": amis, "ari": aris, "repeats": args.repeats,
        "e2": args.e2, "e3": args.e3, "C": args.C, "seed": args.seed,
        "kmeans": {"n_init": args.n_init, "max_iter": 300, "init": "k-means++"},
        "eigen_order": args.by,
        "centrality": {"kind": args.centrality, **_centrality_params(args)},
    })


def cmd_heatmap(run: Run, args) -> None:
    n_original = read_edge_list(args.graph).n if Path(args.graph).is_file() else 0
    g, index_map = _load_graph(run, args)
    truth = _load_labels(run, args, n_original, index_map)
    grid = heatmap(g, _diag(g, args), truth, args.e2_range, args.e3_range,
                   args.steps, args.repeats, args.seed, n_init=args.n_init)
    run.write("heatmap_ami.csv", grid.to_csv("ami"))
    run.write("heatmap_ari.csv", grid.to_csv("ari"))
    out = grid.to_json()
    out["kmeans"] = {"n_init": args.n_init, "max_iter": 300, "init": "k-means++"}
    out["centrality"] = {"kind": args.centrality, **_centrality_params(args)}
    out["clusters"] = truth.k
    run.result("heatmap.json", out)


def cmd_train(run: Run, args) -> None:
    from .cgnn import TrainConfig, read_node_task, train

    cfg = {}
    if args.config:
        cfg = json.loads(run.input(args.config).read_text())
    if args.centrality:
        cfg["centralities"] = args.centrality.split("+")
    if args.gso:
        kind, _, rest = args.gso.partition(":")
        if kind == "params":
            cfg["init"] = "adjacency"  # overwritten below
        else:
            cfg["init"] = rest or kind
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.epochs is not None:
        cfg["epochs"] = args.epochs
    config = TrainConfig.from_json(cfg)
    g = read_edge_list(run.input(args.graph))
    task = read_node_task(g, run.input(args.features), run.input(args.labels), run.input(args.masks))
    model = None
    if args.gso and args.gso.startswith("params:"):
        from .cgnn import build_model

        model = build_model(task, config)
        model.cgso[:] = parse_gso(args.gso).as_array()
    report = train(task, config, model)
    run.result("report.json", report.to_json())
    if report.diverged:
        raise FloatingPointError("training diverged (non-finite loss); report written")


def cmd_verify(run: Run, args) -> None:
    from .verify import format_table, run_suite

    checks = run_suite(args.suite, args.seed)
    print(format_table(checks))
    if run.out is not None:
        run.write("verify.json", _json([c.__dict__ for c in checks]))
    if not all(c.passed for c in checks):
        raise AssertionError(f"{sum(not c.passed for c in checks)} check(s) failed")


# ---------------------------------------------------------------- parser


def _graph_opts(p, labels: bool = False) -> None:
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--centrality", choices=cen.KINDS, default="degree")
    p.add_argument("--walk-length", type=int, default=2)
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-10, help="PageRank L1 tolerance")
    p.add_argument("--keep-all", action="store_true",
                   help="skip the largest-connected-component restriction")
    if labels:
        p.add_argument("--labels", help="node,label CSV (default: labels.csv next to --graph)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cgso", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="sample BA or SBBAM graphs")
    p.add_argument("model", choices=("ba", "sbbam"))
    p.add_argument("--n", type=int, help="BA: node count")
    p.add_argument("--n0", help="initial nodes (BA: int; SBBAM: per block, comma separated)")
    p.add_argument("--r0", help="initial random edges (BA: int; SBBAM: per block)")
    p.add_argument("--r", help="edges per new node (BA: int; SBBAM: per block)")
    p.add_argument("--blocks", help="SBBAM block sizes, e.g. 100,100,100")
    p.add_argument("--p", type=float, default=0.1, help="SBBAM cross-block edge probability")
    p.add_argument("--features-noise", type=float,
                   help="SBBAM: also write a node-classification task with this feature noise")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("centrality", help="per-node centrality values")
    _graph_opts(p)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("spectrum", help="spectrum, moments and bounds of V^-1 A")
    _graph_opts(p)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("cheeger", help="exhaustive centrality Cheeger constant (n <= 16)")
    _graph_opts(p)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_cheeger)

    for name, fn in (("cluster", cmd_cluster), ("heatmap", cmd_heatmap)):
        p = sub.add_parser(name, help="spectral clustering" if name == "cluster"
                           else "AMI/ARI over an (e2, e3) grid")
        _graph_opts(p, labels=True)
        p.add_argument("--repeats", type=int, default=10)
        p.add_argument("--n-init", type=int, default=10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("-o", "--out")
        if name == "cluster":
            p.add_argument("--e2", type=float, default=-1.0)
            p.add_argument("--e3", type=float, default=0.0)
            p.add_argument("--C", type=int, required=True)
            p.add_argument("--by", choices=("algebraic", "modulus"), default="algebraic")
        else:
            p.add_argument("--e2-range", type=_range, default=(-1.5, 1.5))
            p.add_argument("--e3-range", type=_range, default=(-1.5, 1.5))
            p.add_argument("--steps", type=int, default=7)
        p.set_defaults(func=fn)

    p = sub.add_parser("train", help="train a CGCN / CSGC node classifier")
    p.add_argument("--graph", required=True)
    p.add_argument("--features", required=True, help="CSV, one row per node")
    p.add_argument("--labels", required=True, help="node,label CSV")
    p.add_argument("--masks", required=True, help="node,split CSV with train/val/test")
    p.add_argument("--config", help="TrainConfig JSON")
    p.add_argument("--centrality", help="kind, or two joined by '+' for a combined operator")
    p.add_argument("--gso", help="preset:NAME or params:FILE.json")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("verify", help="run property checks and print a pass/fail table")
    p.add_argument("--suite", default="all",
                   choices=("all", "graph", "spectral", "generators", "clustering", "cgnn"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_verify)
    return parser


COMPUTE_ERRORS = (cen.CentralityError, cen.ConvergenceError, SpectralError,
                  FloatingPointError, OverflowError, AssertionError, np.linalg.LinAlgError)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "generate":
            _check_generate(args)
        run = Run(args, argv)
        args.func(run, args)
        run.finish()
        return 0
    except UsageError as exc:
        print(f"cgso: error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, GraphParseError) as exc:
        print(f"cgso: error: {exc}", file=sys.stderr)
        return 1
    except COMPUTE_ERRORS as exc:
        print(f"cgso: computation failed: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"cgso: error: {exc}", file=sys.stderr)
        return 1


def _check_generate(args) -> None:
    if args.model == "ba":
        missing = [f for f in ("n", "n0", "r0", "r") if getattr(args, f) is None]
        if missing:
            raise UsageError(f"generate ba needs --{', --'.join(missing)}")
        args.n0, args.r0, args.r = int(args.n0), int(args.r0), int(args.r)
    elif args.blocks is None or args.r is None:
        raise UsageError("generate sbbam needs --blocks and --r")


if __name__ == "__main__":
    sys.exit(main())
