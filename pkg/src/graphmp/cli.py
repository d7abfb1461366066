"""Command-line entry point: ``graphmp detect|synth|bench|verify``."""
import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .bench import BenchCell, detect, records_to_csv, run_bench
from .errors import GraphMPError
from .graph import SparsityModel, load_graph, serialize_graph
from .io import dump_json, read_attrs, result_document, write_attrs
from .objectives import make_cost, normalize_features
from .solver import SolverConfig
from .synth import MODES, SynthSpec, synth_instance
from .verify import run_verify

STATS = ("ems", "kulldorff", "ebp", "ls")
HALT = {"obj": "objective_change", "est": "estimate_change"}


class IOFailure(Exception):
    kind = "io"


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc.strerror}") from None


def _solver_args(p):
    p.add_argument("--eps", type=float, default=0.001)
    p.add_argument("--halt", choices=sorted(HALT), default="obj")
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--no-timing", action="store_true",
                   help="write 0 for wall times so output is byte-reproducible")


def _config(args):
    return SolverConfig(max_iter=args.max_iter, epsilon=args.eps, halting_mode=HALT[args.halt])


def _csv_list(kind):
    def parse(text):
        return [kind(v) for v in text.split(",") if v]
    return parse


def build_parser():
    parser = argparse.ArgumentParser(prog="graphmp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="find an anomalous connected subgraph")
    p.add_argument("--graph", required=True, help="edge list: 'u v [cost]' per line")
    p.add_argument("--attrs", required=True, help="CSV: node,feature or node,observed,expected")
    p.add_argument("--stat", choices=STATS, default="ems")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--g", type=int, default=1)
    p.add_argument("--normalize", action="store_true", help="rescale features onto [0, 0.999]")
    p.add_argument("--out", default=None)
    _solver_args(p)

    p = sub.add_parser("synth", help="write a planted-cluster grid instance")
    p.add_argument("--rows", type=int, default=16)
    p.add_argument("--cols", type=int, default=16)
    p.add_argument("--cluster", type=int, default=12)
    p.add_argument("--mu", type=float, default=3.0)
    p.add_argument("--flip", type=float, default=0.0)
    p.add_argument("--mode", choices=MODES, default="gaussian_mean")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="directory for graph.txt, attrs.csv, truth.json")

    p = sub.add_parser("bench", help="run a grid of planted-cluster experiments")
    p.add_argument("--rows", type=int, default=16)
    p.add_argument("--cols", type=int, default=16)
    p.add_argument("--cluster", type=_csv_list(int), default=[12])
    p.add_argument("--mu", type=_csv_list(float), default=[3.0])
    p.add_argument("--flip", type=_csv_list(float), default=[0.0])
    p.add_argument("--mode", type=_csv_list(str), default=["gaussian_mean"])
    p.add_argument("--stat", type=_csv_list(str), default=["ems"])
    p.add_argument("--k", type=_csv_list(int), default=[12])
    p.add_argument("--g", type=int, default=1)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    _solver_args(p)

    p = sub.add_parser("verify", help="compare head/tail oracles with brute force")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=25)
    return parser


def cmd_detect(args):
    graph, ids = load_graph(_read(args.graph))
    data = read_attrs(_read(args.attrs), ids)
    if args.normalize:
        if data.feature is None:
            raise GraphMPError("--normalize needs a feature column")
        data = normalize_features(data.feature)
    warnings = []
    k, g = args.k, args.g
    if k > graph.n:
        warnings.append(f"k={k} clamped to node count {graph.n}")
        k = graph.n
    if g > k:
        warnings.append(f"g={g} clamped to k={k}")
        g = k
    model = SparsityModel(k, g)
    cfg = _config(args)
    result, found, score = detect(make_cost(args.stat, data), graph, model, cfg)
    doc = result_document(result, found, score, ids, args.stat, model, cfg,
                          warning="; ".join(warnings) or None, timing=not args.no_timing)
    _write(args.out, dump_json(doc))
    return 0


def cmd_synth(args):
    spec = SynthSpec(args.rows, args.cols, args.cluster, args.mu, args.flip, args.seed, args.mode)
    graph, data, truth = synth_instance(spec)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IOFailure(f"cannot create {out}: {exc.strerror}") from None
    _write(out / "graph.txt", serialize_graph(graph))
    _write(out / "attrs.csv", write_attrs(data))
    _write(out / "truth.json", dump_json({"support": list(truth), "spec": asdict(spec)}))
    return 0


def cmd_bench(args):
    cells = []
    for mode in args.mode:
        for cluster in args.cluster:
            for mu in args.mu:
                for flip in args.flip:
                    spec = SynthSpec(args.rows, args.cols, cluster, mu, flip, 0, mode)
                    for stat in args.stat:
                        for k in args.k:
                            cells.append(BenchCell(spec, stat, k, args.g))
    records = run_bench(cells, args.repeats, args.seed, args.workers, _config(args),
                        timing=not args.no_timing)
    _write(args.out, records_to_csv(records))
    return 0


def cmd_verify(args):
    lines = run_verify(args.seed, args.trials)
    for name, ok, detail in lines:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return 0 if all(ok for _, ok, _ in lines) else 1


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": {"kind": kind, "message": message}}) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"detect": cmd_detect, "synth": cmd_synth,
               "bench": cmd_bench, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except IOFailure as exc:
        return _fail(exc.kind, str(exc), 2)
    except GraphMPError as exc:
        return _fail(exc.kind, str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
